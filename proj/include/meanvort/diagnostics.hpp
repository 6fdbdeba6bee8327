#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "meanvort/elliptic.hpp"
#include "meanvort/trajectory.hpp"
#include "meanvort/transport.hpp"

namespace meanvort {

/// Box integral of the density (dx^2-weighted sum).
inline double mass(const ScalarField& omega) {
  double s = 0.0;
  for (double v : omega.data) s += v;
  return s * omega.grid.cell_area();
}

/// dx^2-weighted L^p norm; p = infinity means the grid max norm.
inline double lp_norm(const ScalarField& omega, double p) {
  if (!(p >= 1.0)) throw ValidationError("lp_norm requires p >= 1");
  if (std::isinf(p)) return omega.max_abs();
  double s = 0.0;
  for (double v : omega.data) s += std::pow(std::fabs(v), p);
  return std::pow(s * omega.grid.cell_area(), 1.0 / p);
}

/// Reference pair for relative energies (defaults to zero fields).
struct EnergyReference {
  VectorField v_ref;
  ScalarField zeta_ref;

  static EnergyReference zero(const Grid2D& g) { return {VectorField(g), ScalarField(g)}; }
};

/// Relative residual of the weighted Delort identity
///   omega v = -1/2 |v|^2 perp(grad h) - a^{-1} perp(div(a S_v))
/// which holds exactly for div(a v) = 0; all derivatives spectral.
inline double delort_residual(const VectorField& v, const PinningProfile& pin) {
  const Grid2D& g = v.grid;
  ScalarField om = curl(v);
  VectorField lhs(g);
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    lhs.u[k] = om[k] * v.u[k];
    lhs.w[k] = om[k] * v.w[k];
  }
  const double denom = std::sqrt(dot_l2(lhs.u, lhs.u) + dot_l2(lhs.w, lhs.w));
  if (denom == 0.0) return 0.0;

  TensorField s = stress_energy(v);
  ScalarField axx(g), axy(g), ayx(g), ayy(g);
  for (std::size_t k = 0; k < axx.size(); ++k) {
    axx[k] = pin.a[k] * s.xx[k];
    axy[k] = pin.a[k] * s.xy[k];
    ayx[k] = pin.a[k] * s.yx[k];
    ayy[k] = pin.a[k] * s.yy[k];
  }
  VectorField div_as(divergence(VectorField(axx, axy)), divergence(VectorField(ayx, ayy)));

  VectorField rhs(g);
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    const double v2 = v.u[k] * v.u[k] + v.w[k] * v.w[k];
    // perp(grad h) = (-d2 h, d1 h); perp(div aS) likewise
    rhs.u[k] = -0.5 * v2 * (-pin.grad_h.w[k]) - pin.a_inv[k] * (-div_as.w[k]);
    rhs.w[k] = -0.5 * v2 * pin.grad_h.u[k] - pin.a_inv[k] * div_as.u[k];
  }
  double num = 0.0;
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    const double du = lhs.u[k] - rhs.u[k], dw = lhs.w[k] - rhs.w[k];
    num += du * du + dw * dw;
  }
  return std::sqrt(num) / denom;
}

/// Per-snapshot relative residual of the relative-energy balance
///   d_t int a|v - v_ref|^2 = -2 lam int a^{-1} zeta^2 + 2 lam int a^{-1} zeta zeta_ref
///     - 2 alpha int a|v - v_ref|^2 omega
///     + 2 int a (-alpha(Psi+v_ref) + beta(Psi+v_ref)^perp) . (v - v_ref) omega,
/// with the time derivative taken by 3-point finite differences on the
/// snapshot grid. Residuals are normalized by the largest magnitude either
/// side attains over the trajectory.
inline std::vector<double> energy_identity_residual(const Trajectory& traj,
                                                    const PinningProfile& pin,
                                                    const VectorField& forcing,
                                                    const ModelParams& params,
                                                    const EnergyReference& ref) {
  if (traj.snapshots.size() < 3)
    throw InsufficientSnapshots("energy identity residual needs at least 3 snapshots");
  const std::size_t m = traj.snapshots.size();
  const double area = pin.h.grid.cell_area();

  std::vector<double> energy(m), rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const State& st = traj.snapshots[k];
    double e = 0.0, r = 0.0;
    for (std::size_t j = 0; j < st.v.size(); ++j) {
      const double du = st.v.u[j] - ref.v_ref.u[j];
      const double dw = st.v.w[j] - ref.v_ref.w[j];
      const double diff2 = du * du + dw * dw;
      e += pin.a[j] * diff2;
      const double lam_terms =
          params.lambda * pin.a_inv[j] *
          (-2.0 * st.zeta[j] * st.zeta[j] + 2.0 * st.zeta[j] * ref.zeta_ref[j]);
      const double pu = forcing.u[j] + ref.v_ref.u[j];
      const double pw = forcing.w[j] + ref.v_ref.w[j];
      const double drive_u = -params.alpha * pu - params.beta * pw;
      const double drive_w = -params.alpha * pw + params.beta * pu;
      r += lam_terms - 2.0 * params.alpha * pin.a[j] * diff2 * st.omega[j] +
           2.0 * pin.a[j] * (drive_u * du + drive_w * dw) * st.omega[j];
    }
    energy[k] = e * area;
    rhs[k] = r * area;
  }

  // 3-point derivative on a possibly nonuniform time grid
  std::vector<double> dedt(m, 0.0);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double t0 = traj.times[k - 1], t1 = traj.times[k], t2 = traj.times[k + 1];
    const double h1 = t1 - t0, h2 = t2 - t1;
    dedt[k] = (energy[k + 1] * h1 * h1 - energy[k - 1] * h2 * h2 +
               energy[k] * (h2 * h2 - h1 * h1)) /
              (h1 * h2 * (h1 + h2));
  }

  double scale = 0.0;
  for (std::size_t k = 1; k + 1 < m; ++k)
    scale = std::max({scale, std::fabs(rhs[k]), std::fabs(dedt[k])});
  // floor: the energy's own rate scale, so near-stationary runs do not
  // normalize noise by noise
  const double span = traj.times.back() - traj.times.front();
  double e_max = 0.0;
  for (double e : energy) e_max = std::max(e_max, std::fabs(e));
  if (span > 0.0) scale = std::max(scale, e_max / span);
  if (scale == 0.0) scale = 1.0;

  std::vector<double> res(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k + 1 < m; ++k) res[k] = std::fabs(dedt[k] - rhs[k]) / scale;
  return res;
}

struct DecayMargins {
  std::vector<double> t;
  std::vector<double> sharp;  // measured / (int |omega0|^p (1 + alpha t omega0)^{1-p})^{1/p}
  std::vector<double> univ;   // measured / (M^{1/p} (alpha t)^{-(1-1/p)}), M = mass(omega0)
};

/// Sharp self-improving bound evaluated from the initial data by quadrature.
inline double decay_sharp_bound(const ScalarField& omega0, double alpha, double t, double p) {
  double s = 0.0;
  for (double v : omega0.data) {
    const double base = std::fabs(v);
    s += std::pow(base, p) * std::pow(1.0 + alpha * t * v, 1.0 - p);
  }
  return std::pow(s * omega0.grid.cell_area(), 1.0 / p);
}

/// Margins of the forcing-free parabolic decay: valid for Psi = 0 and
/// (beta = 0, or incompressible with flat weight). Refuses other regimes.
inline DecayMargins check_decay_margins(const Trajectory& traj, const ScalarField& omega0,
                                         const ModelParams& params, const PinningProfile& pin,
                                         const VectorField& forcing, double p) {
  if (forcing.max_norm() > 1e-14)
    throw RegimeMismatch("decay margins require zero forcing");
  if (!(params.alpha > 0.0)) throw RegimeMismatch("decay margins require alpha > 0");
  const bool flat = pin.is_flat();
  const bool ok = params.beta == 0.0 || (params.regime == Regime::Incompressible && flat);
  if (!ok)
    throw RegimeMismatch("decay margins require beta = 0 or a flat-weight incompressible run");
  if (!(p > 1.0) || std::isinf(p))
    throw ValidationError("decay margins are stated for finite p > 1");

  DecayMargins out;
  const double exponent = 1.0 - 1.0 / p;
  // scaling: a mass-M solution is a rescaled mass-1 solution, so the
  // universal ceiling carries the factor M^{1/p}
  const double mass_factor = std::pow(std::max(mass(omega0), 1e-300), 1.0 / p);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const double t = traj.times[k];
    const double measured = lp_norm(traj.snapshots[k].omega, p);
    out.t.push_back(t);
    if (t <= 0.0) {
      out.sharp.push_back(measured / lp_norm(omega0, p));
      out.univ.push_back(0.0);  // universal bound blows up at t = 0
      continue;
    }
    out.sharp.push_back(measured / decay_sharp_bound(omega0, params.alpha, t, p));
    out.univ.push_back(measured * std::pow(params.alpha * t, exponent) / mass_factor);
  }
  return out;
}

struct FittedBound {
  double C = 0.0;
  bool finite = true;
};

/// Smallest C >= 0 with max|omega^t| <= (alpha t)^{-1} + C alpha^{-1} e^{C t}
/// over the recorded times (t > 0), by bisection; parabolic regime only.
inline FittedBound fit_smoothing_bound(const Trajectory& traj, const ModelParams& params) {
  if (!(params.alpha > 0.0) || params.beta != 0.0)
    throw RegimeMismatch("the parabolic L^inf bound requires alpha > 0, beta = 0");
  auto feasible = [&](double C) {
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      const double t = traj.times[k];
      if (t <= 0.0) continue;  // bound singular at t = 0
      const double bound = 1.0 / (params.alpha * t) + C / params.alpha * std::exp(C * t);
      if (traj.snapshots[k].omega.max_abs() > bound) return false;
    }
    return true;
  };
  FittedBound out;
  if (feasible(0.0)) {
    out.C = 0.0;
    return out;
  }
  double hi = 1.0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (hi > 1e6) {
      out.C = hi;
      out.finite = false;
      return out;
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.C = hi;
  return out;
}

/// Relative residual of the Helmholtz-Leray identity behind the pressure:
///   a^{-1} perp(grad) (div a^{-1} grad)^{-1} div(omega w)
///     = omega w^perp + grad P,     w = alpha(Psi+v)^perp + beta(Psi+v),
/// with P from the weighted pressure solve. Incompressible states only.
inline double pressure_consistency(const State& state, const PinningProfile& pin,
                                   const VectorField& forcing, const ModelParams& params,
                                   const EllipticOptions& opts = {}) {
  const Grid2D& g = state.omega.grid;
  if (state.omega.max_abs() == 0.0) return 0.0;

  VectorField w = transport_velocity(state.v, forcing, params);
  VectorField omw(g);
  for (std::size_t k = 0; k < omw.size(); ++k) {
    omw.u[k] = state.omega[k] * w.u[k];
    omw.w[k] = state.omega[k] * w.w[k];
  }
  ScalarField rhs_elliptic = divergence(omw);
  rhs_elliptic *= -1.0;
  auto [phi, rep] = solve_div_b_grad(pin.a_inv, rhs_elliptic, opts);
  VectorField lhs = perp(gradient(phi));
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    lhs.u[k] *= pin.a_inv[k];
    lhs.w[k] *= pin.a_inv[k];
  }

  auto [P, prep] = solve_pressure(state.omega, state.v, pin, forcing, params.alpha, params.beta, opts);
  VectorField grad_p = gradient(P);
  VectorField diff(g);
  double den = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    const double ru = state.omega[k] * (-w.w[k]) + grad_p.u[k];
    const double rw = state.omega[k] * w.u[k] + grad_p.w[k];
    diff.u[k] = lhs.u[k] - ru;
    diff.w[k] = lhs.w[k] - rw;
    const double vu = state.omega[k] * state.v.u[k], vw = state.omega[k] * state.v.w[k];
    den += vu * vu + vw * vw;
  }
  if (den == 0.0) return 0.0;

  // On the torus the decomposition behind the identity carries a harmonic
  // kernel component with no whole-plane analogue; measure the residual
  // modulo that two-dimensional kernel (least squares).
  const HarmonicBasis hb = HarmonicBasis::make(pin, opts);
  const double g11 = dot_l2(hb.h1.u, hb.h1.u) + dot_l2(hb.h1.w, hb.h1.w);
  const double g12 = dot_l2(hb.h1.u, hb.h2.u) + dot_l2(hb.h1.w, hb.h2.w);
  const double g22 = dot_l2(hb.h2.u, hb.h2.u) + dot_l2(hb.h2.w, hb.h2.w);
  const double b1 = dot_l2(diff.u, hb.h1.u) + dot_l2(diff.w, hb.h1.w);
  const double b2 = dot_l2(diff.u, hb.h2.u) + dot_l2(diff.w, hb.h2.w);
  const double det = g11 * g22 - g12 * g12;
  const double c1 = (g22 * b1 - g12 * b2) / det;
  const double c2 = (g11 * b2 - g12 * b1) / det;
  double num = 0.0;
  for (std::size_t k = 0; k < diff.size(); ++k) {
    const double du = diff.u[k] - c1 * hb.h1.u[k] - c2 * hb.h2.u[k];
    const double dw = diff.w[k] - c1 * hb.h1.w[k] - c2 * hb.h2.w[k];
    num += du * du + dw * dw;
  }
  return std::sqrt(num / den);
}

/// Full diagnostics rows for a recorded trajectory (the CSV payload).
struct DiagnosticsConfig {
  double p = 2.0;             // the configurable Lp column
  bool with_delort = true;    // incompressible runs only
  bool with_energy = true;
  bool with_margins = true;   // only when the regime preconditions hold
  bool with_fit_112 = true;
  EnergyReference ref;
};

inline std::vector<DiagRow> compute_diag_rows(const Trajectory& traj, const PinningProfile& pin,
                                              const VectorField& forcing, const ModelParams& params,
                                              const ScalarField& omega0,
                                              const DiagnosticsConfig& cfg) {
  std::vector<DiagRow> rows(traj.snapshots.size());

  std::vector<double> energy_res;
  if (cfg.with_energy && traj.snapshots.size() >= 3)
    energy_res = energy_identity_residual(traj, pin, forcing, params, cfg.ref);

  DecayMargins margins;
  bool have_margins = false;
  if (cfg.with_margins) {
    try {
      margins = check_decay_margins(traj, omega0, params, pin, forcing, cfg.p);
      have_margins = true;
    } catch (const RegimeMismatch&) {
    }
  }
  double fitted_c = std::numeric_limits<double>::quiet_NaN();
  if (cfg.with_fit_112) {
    try {
      fitted_c = fit_smoothing_bound(traj, params).C;
    } catch (const RegimeMismatch&) {
    }
  }

  const double area = pin.h.grid.cell_area();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const State& st = traj.snapshots[k];
    DiagRow& row = rows[k];
    row.t = traj.times[k];
    row.mass = mass(st.omega);
    row.linf = st.omega.max_abs();
    row.l2 = lp_norm(st.omega, 2.0);
    row.p = cfg.p;
    row.lp = lp_norm(st.omega, cfg.p);

    {
      VectorField av = st.v;
      for (std::size_t j = 0; j < av.size(); ++j) {
        av.u[j] *= pin.a[j];
        av.w[j] *= pin.a[j];
      }
      ScalarField d = divergence(av);
      ScalarField target = st.zeta;
      remove_mean(target);
      d -= target;
      const double vn = norm_l2(st.v);
      row.div_a_v_rel = vn > 0.0 ? norm_l2(d) * std::sqrt(area) / vn : 0.0;
    }

    if (cfg.with_delort && params.regime == Regime::Incompressible)
      row.delort_res = delort_residual(st.v, pin);

    {
      double e = 0.0;
      for (std::size_t j = 0; j < st.v.size(); ++j) {
        const double du = st.v.u[j] - cfg.ref.v_ref.u[j];
        const double dw = st.v.w[j] - cfg.ref.v_ref.w[j];
        e += pin.a[j] * (du * du + dw * dw);
      }
      row.energy = e * area;
    }
    if (!energy_res.empty()) row.energy_rhs_res = energy_res[k];
    if (have_margins) {
      row.margin_r44_sharp = margins.sharp[k];
      row.margin_r44_univ = margins.univ[k];
    }
    row.fitted_C_112 = fitted_c;
  }
  return rows;
}

}  // namespace meanvort
