#pragma once

#include <cmath>
#include <optional>

#include "meanvort/calculus.hpp"
#include "meanvort/field.hpp"
#include "meanvort/params.hpp"
#include "meanvort/pinning.hpp"

namespace meanvort {

struct EllipticOptions {
  double tol = 1e-10;       // relative residual target
  int max_iter = 0;         // 0 means 10*n
  enum class Precond { SpectralLaplacian } precond = Precond::SpectralLaplacian;

  int effective_max_iter(int n) const { return max_iter > 0 ? max_iter : 10 * n; }
};

struct EllipticReport {
  int iters = 0;
  double residual = 0.0;
  double mean_removed = 0.0;
};

namespace detail {

/// Remove the spectral modes annihilated by the derivative multipliers
/// (mean and Nyquist corners) so the CG operator is SPD on the remainder.
inline void project_resolved(ScalarField& f) {
  const auto& tf = SpectralTransform::get(f.grid);
  SpectralCoeffs c = forward(f);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx)
      if (tf.kernel_mode(ikx, iky)) c[static_cast<std::size_t>(iky) * tf.nkx() + ikx] = 0.0;
  f = backward(f.grid, c);
}

/// u -> -div(b grad u), the CG operator, all derivatives spectral.
inline ScalarField apply_div_b_grad(const ScalarField& b, const ScalarField& u) {
  VectorField g = gradient(u);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g.u[k] *= b[k];
    g.w[k] *= b[k];
  }
  ScalarField out = divergence(g);
  out *= -1.0;
  return out;
}

/// Inverse constant-coefficient Laplacian scaled by mean(b); the kernel
/// modes are zeroed so preconditioning stays inside the resolved subspace.
inline ScalarField precond_spectral(const ScalarField& r, double b_mean) {
  const auto& tf = SpectralTransform::get(r.grid);
  SpectralCoeffs c = forward(r);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      if (tf.kernel_mode(ikx, iky))
        c[k] = 0.0;
      else
        c[k] /= b_mean * tf.k2_full(ikx, iky);
    }
  return backward(r.grid, c);
}

}  // namespace detail

/// Zero-mean u with -div(b grad u) = f - mean(f), preconditioned conjugate
/// gradients with the constant-coefficient inverse Laplacian. The removed
/// mean is reported; the residual is L2-relative to ||f - mean(f)||.
inline std::pair<ScalarField, EllipticReport> solve_div_b_grad(const ScalarField& b,
                                                               const ScalarField& f,
                                                               const EllipticOptions& opts = {}) {
  if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw ValidationError("elliptic tol must be in (0,1)");
  const double b_min = b.min();
  if (!(b_min > 0.0)) throw ValidationError("elliptic coefficient must be strictly positive");
  if (!f.all_finite()) throw ValidationError("elliptic right-hand side must be finite");

  EllipticReport report;
  report.mean_removed = mean(f);

  ScalarField rhs = f;
  remove_mean(rhs);
  detail::project_resolved(rhs);
  const double rhs_norm = norm_l2(rhs);
  const Grid2D& grid = f.grid;
  if (rhs_norm == 0.0) {
    report.iters = 0;
    report.residual = 0.0;
    return {ScalarField(grid), report};
  }

  const double b_max = b.max();
  const double b_mean = mean(b);

  // Constant coefficient: the preconditioner is the exact inverse.
  if (b_max - b_min <= 1e-14 * b_max) {
    ScalarField u = detail::precond_spectral(rhs, b_mean);
    report.iters = 1;
    report.residual = norm_l2(rhs - detail::apply_div_b_grad(b, u)) / rhs_norm;
    return {u, report};
  }

  ScalarField u(grid);
  ScalarField r = rhs;
  ScalarField z = detail::precond_spectral(r, b_mean);
  ScalarField p = z;
  double rz = dot_l2(r, z);
  const int max_iter = opts.effective_max_iter(grid.n);

  for (int it = 1; it <= max_iter; ++it) {
    ScalarField ap = detail::apply_div_b_grad(b, p);
    const double pap = dot_l2(p, ap);
    const double alpha = rz / pap;
    for (std::size_t k = 0; k < u.size(); ++k) {
      u[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    const double res = norm_l2(r) / rhs_norm;
    if (res <= opts.tol) {
      remove_mean(u);
      report.iters = it;
      report.residual = res;
      return {u, report};
    }
    z = detail::precond_spectral(r, b_mean);
    const double rz_new = dot_l2(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  throw NonConvergence(max_iter, norm_l2(r) / rhs_norm, opts.tol);
}

struct ReconstructReport {
  EllipticReport omega_solve;
  EllipticReport zeta_solve;
};

/// Velocity from (omega, zeta) through the weighted decomposition
///   v = a^{-1} perp(grad phi1) + grad phi2,
///   div(a^{-1} grad phi1) = omega - mean,  div(a grad phi2) = zeta - mean.
/// The output satisfies curl v = omega - mean and div(a v) = zeta - mean
/// within 10x the solver tolerance, and has zero harmonic component.
inline std::pair<VectorField, ReconstructReport> reconstruct_velocity(
    const ScalarField& omega, const ScalarField& zeta, const PinningProfile& pin,
    const EllipticOptions& opts = {}) {
  ReconstructReport rep;
  ScalarField neg_omega = omega;
  neg_omega *= -1.0;
  auto [phi1, r1] = solve_div_b_grad(pin.a_inv, neg_omega, opts);
  rep.omega_solve = r1;
  rep.omega_solve.mean_removed = -r1.mean_removed;

  VectorField v = perp(gradient(phi1));
  for (std::size_t k = 0; k < v.size(); ++k) {
    v.u[k] *= pin.a_inv[k];
    v.w[k] *= pin.a_inv[k];
  }

  if (zeta.max_abs() > 0.0) {
    ScalarField neg_zeta = zeta;
    neg_zeta *= -1.0;
    auto [phi2, r2] = solve_div_b_grad(pin.a, neg_zeta, opts);
    rep.zeta_solve = r2;
    rep.zeta_solve.mean_removed = -r2.mean_removed;
    v += gradient(phi2);
  }
  return {v, rep};
}

/// Basis of the two-dimensional harmonic kernel on the torus: fields
/// e_i + grad(phi_i) with curl = 0 and div(a .) = 0. Precomputed once per
/// pinning profile; used to pin the mean velocity during evolution.
struct HarmonicBasis {
  VectorField h1, h2;  // mean(h1) = e1, mean(h2) = e2

  static HarmonicBasis make(const PinningProfile& pin, const EllipticOptions& opts = {}) {
    HarmonicBasis basis;
    const Grid2D& grid = pin.h.grid;
    if (pin.is_flat()) {
      basis.h1 = VectorField(grid);
      basis.h2 = VectorField(grid);
      for (std::size_t k = 0; k < basis.h1.size(); ++k) {
        basis.h1.u[k] = 1.0;
        basis.h2.w[k] = 1.0;
      }
      return basis;
    }
    // div(a (e_i + grad phi)) = 0  =>  -div(a grad phi) = d_i a
    VectorField grad_a = gradient(pin.a);
    auto [p1, r1] = solve_div_b_grad(pin.a, grad_a.u, opts);
    auto [p2, r2] = solve_div_b_grad(pin.a, grad_a.w, opts);
    basis.h1 = gradient(p1);
    basis.h2 = gradient(p2);
    for (std::size_t k = 0; k < basis.h1.size(); ++k) {
      basis.h1.u[k] += 1.0;
      basis.h2.w[k] += 1.0;
    }
    return basis;
  }

  /// Add the kernel element with mean (cx, cy).
  void add_to(VectorField& v, double cx, double cy) const {
    for (std::size_t k = 0; k < v.size(); ++k) {
      v.u[k] += cx * h1.u[k] + cy * h2.u[k];
      v.w[k] += cx * h1.w[k] + cy * h2.w[k];
    }
  }
};

/// Zero-mean pressure recovering the gradient part of the momentum balance:
///   P = (-div a grad)^{-1} div( a omega (-alpha(Psi+v) + beta(Psi+v)^perp) ).
inline std::pair<ScalarField, EllipticReport> solve_pressure(
    const ScalarField& omega, const VectorField& v, const PinningProfile& pin,
    const VectorField& forcing, double alpha, double beta, const EllipticOptions& opts = {}) {
  const Grid2D& grid = omega.grid;
  VectorField flux(grid);
  for (std::size_t k = 0; k < flux.size(); ++k) {
    const double pu = forcing.u[k] + v.u[k];
    const double pw = forcing.w[k] + v.w[k];
    const double aw = pin.a[k] * omega[k];
    flux.u[k] = aw * (-alpha * pu - beta * pw);
    flux.w[k] = aw * (-alpha * pw + beta * pu);
  }
  ScalarField src = divergence(flux);
  if (omega.max_abs() == 0.0 || (alpha == 0.0 && beta == 0.0)) {
    EllipticReport rep;
    return {ScalarField(grid), rep};
  }
  return solve_div_b_grad(pin.a, src, opts);
}

}  // namespace meanvort
