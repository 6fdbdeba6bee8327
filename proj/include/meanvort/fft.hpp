#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "meanvort/grid.hpp"

namespace meanvort {

/// Real-to-complex FFT pair for one grid size, with scratch buffers.
/// Plans are FFTW_ESTIMATE (deterministic); instances are cached per thread,
/// plan creation is serialized globally (FFTW requirement).
class SpectralTransform {
 public:
  static const SpectralTransform& get(const Grid2D& grid) {
    thread_local std::map<std::pair<int, long long>, std::unique_ptr<SpectralTransform>> cache;
    const auto key = std::make_pair(grid.n, static_cast<long long>(grid.l * 1e12));
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, std::unique_ptr<SpectralTransform>(new SpectralTransform(grid))).first;
    return *it->second;
  }

  ~SpectralTransform() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
  }

  int n() const { return n_; }
  int nkx() const { return n_ / 2 + 1; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(n_) * nkx(); }

  /// Forward transform of n*n real samples into n*(n/2+1) coefficients.
  void forward(const double* in, std::complex<double>* out) const {
    std::copy(in, in + static_cast<std::size_t>(n_) * n_, real_buf_);
    fftw_execute(fwd_);
    const double* src = reinterpret_cast<const double*>(cplx_buf_);
    std::copy(src, src + 2 * spectral_size(), reinterpret_cast<double*>(out));
  }

  /// Inverse transform, normalized so backward(forward(x)) == x.
  void backward(const std::complex<double>* in, double* out) const {
    const double* src = reinterpret_cast<const double*>(in);
    std::copy(src, src + 2 * spectral_size(), reinterpret_cast<double*>(cplx_buf_));
    fftw_execute(bwd_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    const std::size_t m = static_cast<std::size_t>(n_) * n_;
    for (std::size_t k = 0; k < m; ++k) out[k] = real_buf_[k] * scale;
  }

  /// Angular wavenumber along x for spectral column ikx in [0, n/2];
  /// derivative flavor zeroes the Nyquist column.
  double kx_deriv(int ikx) const { return ikx == n_ / 2 ? 0.0 : two_pi_over_l_ * ikx; }
  double ky_deriv(int iky) const {
    const int f = iky <= n_ / 2 ? iky : iky - n_;
    return iky == n_ / 2 ? 0.0 : two_pi_over_l_ * f;
  }
  /// Full-magnitude wavenumbers (Nyquist kept) for symmetric multipliers.
  double kx_full(int ikx) const { return two_pi_over_l_ * ikx; }
  double ky_full(int iky) const { return two_pi_over_l_ * (iky <= n_ / 2 ? iky : iky - n_); }
  double k2_full(int ikx, int iky) const {
    const double kx = kx_full(ikx), ky = ky_full(iky);
    return kx * kx + ky * ky;
  }

  /// True for the spectral modes annihilated by the derivative multipliers:
  /// the mean and the three Nyquist corner modes.
  bool kernel_mode(int ikx, int iky) const {
    const bool nx = (ikx == 0 || ikx == n_ / 2);
    const bool ny = (iky == 0 || iky == n_ / 2);
    return nx && ny;
  }

 private:
  explicit SpectralTransform(const Grid2D& grid)
      : n_(grid.n), two_pi_over_l_(2.0 * M_PI / grid.l) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    real_buf_ = fftw_alloc_real(static_cast<std::size_t>(n_) * n_);
    cplx_buf_ = fftw_alloc_complex(spectral_size());
    fwd_ = fftw_plan_dft_r2c_2d(n_, n_, real_buf_, cplx_buf_, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(n_, n_, cplx_buf_, real_buf_, FFTW_ESTIMATE);
  }

  static std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  double two_pi_over_l_;
  mutable double* real_buf_ = nullptr;
  mutable fftw_complex* cplx_buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

using SpectralCoeffs = std::vector<std::complex<double>>;

}  // namespace meanvort
