#pragma once

#include <complex>

#include "meanvort/fft.hpp"
#include "meanvort/field.hpp"

namespace meanvort {

// Fourier-collocation derivatives on the periodic grid. Exact on resolved
// trigonometric modes; the Nyquist column/row is annihilated by the odd
// derivative multipliers, which keeps d/dx skew-adjoint on real samples.

inline double mean(const ScalarField& s) {
  double sum = 0.0;
  for (double v : s.data) sum += v;
  return sum / static_cast<double>(s.size());
}

inline void remove_mean(ScalarField& s) {
  const double m = mean(s);
  for (double& v : s.data) v -= m;
}

namespace detail {

inline SpectralCoeffs forward(const ScalarField& s) {
  const auto& tf = SpectralTransform::get(s.grid);
  SpectralCoeffs c(tf.spectral_size());
  tf.forward(s.data.data(), c.data());
  return c;
}

inline ScalarField backward(const Grid2D& grid, const SpectralCoeffs& c) {
  const auto& tf = SpectralTransform::get(grid);
  ScalarField s(grid);
  tf.backward(c.data(), s.data.data());
  return s;
}

}  // namespace detail

/// Spectral gradient (d1 s, d2 s).
inline VectorField gradient(const ScalarField& s) {
  const auto& tf = SpectralTransform::get(s.grid);
  SpectralCoeffs c = detail::forward(s);
  SpectralCoeffs gx(c.size()), gy(c.size());
  const std::complex<double> I(0.0, 1.0);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      gx[k] = I * tf.kx_deriv(ikx) * c[k];
      gy[k] = I * tf.ky_deriv(iky) * c[k];
    }
  return VectorField(detail::backward(s.grid, gx), detail::backward(s.grid, gy));
}

/// Spectral divergence d1 F1 + d2 F2.
inline ScalarField divergence(const VectorField& v) {
  const auto& tf = SpectralTransform::get(v.grid);
  SpectralCoeffs cu = detail::forward(v.u);
  SpectralCoeffs cw = detail::forward(v.w);
  const std::complex<double> I(0.0, 1.0);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      cu[k] = I * (tf.kx_deriv(ikx) * cu[k] + tf.ky_deriv(iky) * cw[k]);
    }
  return detail::backward(v.grid, cu);
}

/// Spectral curl d1 F2 - d2 F1.
inline ScalarField curl(const VectorField& v) {
  const auto& tf = SpectralTransform::get(v.grid);
  SpectralCoeffs cu = detail::forward(v.u);
  SpectralCoeffs cw = detail::forward(v.w);
  const std::complex<double> I(0.0, 1.0);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      cu[k] = I * (tf.kx_deriv(ikx) * cw[k] - tf.ky_deriv(iky) * cu[k]);
    }
  return detail::backward(v.grid, cu);
}

inline ScalarField laplacian(const ScalarField& s) {
  const auto& tf = SpectralTransform::get(s.grid);
  SpectralCoeffs c = detail::forward(s);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      c[k] *= -tf.k2_full(ikx, iky);
    }
  return detail::backward(s.grid, c);
}

/// Zero-mean solution of -lap u = f - mean(f) by direct spectral division.
inline ScalarField poisson_zero_mean(const ScalarField& f) {
  const auto& tf = SpectralTransform::get(f.grid);
  SpectralCoeffs c = detail::forward(f);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      const double k2 = tf.k2_full(ikx, iky);
      c[k] = (ikx == 0 && iky == 0) ? 0.0 : c[k] / k2;
    }
  return detail::backward(f.grid, c);
}

/// Periodic translation by (sx, sy) via phase shift; exact for resolved modes.
inline ScalarField spectral_shift(const ScalarField& s, double sx, double sy) {
  const auto& tf = SpectralTransform::get(s.grid);
  SpectralCoeffs c = detail::forward(s);
  const std::complex<double> I(0.0, 1.0);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      c[k] *= std::exp(-I * (tf.kx_full(ikx) * sx + tf.ky_full(iky) * sy));
    }
  return detail::backward(s.grid, c);
}

/// Sum of |f|^2 dx^2 evaluated in Fourier space (Parseval), for cross-checks.
inline double l2_norm_spectral(const ScalarField& s) {
  const auto& tf = SpectralTransform::get(s.grid);
  SpectralCoeffs c = detail::forward(s);
  double sum = 0.0;
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      const double w = (ikx == 0 || ikx == tf.n() / 2) ? 1.0 : 2.0;  // conjugate pairs
      sum += w * std::norm(c[k]);
    }
  const double nn = static_cast<double>(s.grid.n) * s.grid.n;
  return std::sqrt(sum / nn * s.grid.cell_area());
}

}  // namespace meanvort
