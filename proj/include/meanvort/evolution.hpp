#pragma once

#include <cmath>

#include "meanvort/elliptic.hpp"
#include "meanvort/trajectory.hpp"
#include "meanvort/transport.hpp"

namespace meanvort {

enum class ZetaScheme { IMEX, Explicit };

inline std::string to_string(ZetaScheme z) {
  return z == ZetaScheme::IMEX ? "imex" : "explicit";
}

inline ZetaScheme zeta_scheme_from_string(const std::string& s) {
  if (s == "imex") return ZetaScheme::IMEX;
  if (s == "explicit") return ZetaScheme::Explicit;
  throw ValidationError("solver.zeta_scheme must be imex | explicit, got '" + s + "'");
}

struct StepOptions {
  double cfl = 0.4;
  double dt_max = std::numeric_limits<double>::infinity();
  Limiter limiter = Limiter::VanLeer;
  ZetaScheme zeta_scheme = ZetaScheme::IMEX;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 0.9)) throw ValidationError("cfl must be in (0, 0.9]");
    if (!(dt_max > 0.0)) throw ValidationError("dt_max must be positive");
  }
};

namespace detail {

/// Exact Fourier integrating factor for d_t zeta = lambda lap zeta over dt.
inline ScalarField heat_factor(const ScalarField& zeta, double lambda, double dt) {
  if (lambda == 0.0 || dt == 0.0) return zeta;
  const auto& tf = SpectralTransform::get(zeta.grid);
  SpectralCoeffs c = forward(zeta);
  for (int iky = 0; iky < tf.n(); ++iky)
    for (int ikx = 0; ikx < tf.nkx(); ++ikx) {
      const std::size_t k = static_cast<std::size_t>(iky) * tf.nkx() + ikx;
      c[k] *= std::exp(-lambda * tf.k2_full(ikx, iky) * dt);
    }
  return backward(zeta.grid, c);
}

/// Source of the divergence equation: div( a omega (-alpha(Psi+v) + beta(Psi+v)^perp) ).
inline ScalarField zeta_source(const ScalarField& omega, const VectorField& v,
                               const PinningProfile& pin, const VectorField& forcing,
                               const ModelParams& params) {
  VectorField flux(omega.grid);
  for (std::size_t k = 0; k < flux.size(); ++k) {
    const double pu = forcing.u[k] + v.u[k];
    const double pw = forcing.w[k] + v.w[k];
    const double aw = pin.a[k] * omega[k];
    flux.u[k] = aw * (-params.alpha * pu - params.beta * pw);
    flux.w[k] = aw * (-params.alpha * pw + params.beta * pu);
  }
  return divergence(flux);
}

}  // namespace detail

/// One step of the divergence equation
///   d_t zeta - lambda lap zeta + lambda div(zeta grad h) = source(omega, v)
/// with the diffusion handled by the exact Fourier factor (IMEX, Strang
/// split), the drift in conservative flux form, and the source explicit.
/// With lambda = 0 this reduces to an explicit Heun quadrature of the source.
/// The passed omega/v freeze the source over the step; callers wanting
/// second order in dt should pass time-centered fields.
inline ScalarField step_zeta(const ScalarField& zeta, const ScalarField& omega,
                             const VectorField& v, const PinningProfile& pin,
                             const VectorField& forcing, const ModelParams& params, double dt,
                             const StepOptions& opts) {
  if (params.regime == Regime::Incompressible)
    throw RegimeMismatch("step_zeta is defined for the compressible regimes only");
  const double lambda = params.lambda;
  const Grid2D& grid = zeta.grid;

  VectorField drift(grid);  // flux velocity of the drift term: -lambda grad h
  for (std::size_t k = 0; k < drift.size(); ++k) {
    drift.u[k] = -lambda * pin.grad_h.u[k];
    drift.w[k] = -lambda * pin.grad_h.w[k];
  }
  if (lambda > 0.0) {
    const double dt_drift = cfl_dt(drift, opts.cfl, grid.dx());
    if (dt > dt_drift * (1.0 + 1e-12))
      throw CflViolation("dt exceeds the CFL bound of the zeta drift term");
  }
  ScalarField src = detail::zeta_source(omega, v, pin, forcing, params);

  const bool exact_diffusion = opts.zeta_scheme == ZetaScheme::IMEX && lambda > 0.0;
  if (opts.zeta_scheme == ZetaScheme::Explicit && lambda > 0.0) {
    const double dt_diff = 0.1 * grid.dx() * grid.dx() / lambda;
    if (dt > dt_diff)
      throw CflViolation("dt exceeds the explicit diffusion stability bound; use the imex scheme");
  }

  auto explicit_rhs = [&](const ScalarField& z) {
    ScalarField rhs = detail::flux_divergence(z, drift, opts.limiter);
    rhs += src;
    if (!exact_diffusion && lambda > 0.0) {
      ScalarField lap = laplacian(z);
      lap *= lambda;
      rhs += lap;
    }
    return rhs;
  };

  ScalarField z = exact_diffusion ? detail::heat_factor(zeta, lambda, 0.5 * dt) : zeta;
  ScalarField g1 = explicit_rhs(z);
  ScalarField stage = z;
  for (std::size_t k = 0; k < stage.size(); ++k) stage[k] += dt * g1[k];
  ScalarField g2 = explicit_rhs(stage);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] += 0.5 * dt * (g1[k] + g2[k]);
  if (exact_diffusion) z = detail::heat_factor(z, lambda, 0.5 * dt);
  return z;
}

namespace detail {

struct MeanVec {
  double x = 0.0, y = 0.0;
};

inline MeanVec mean_velocity(const VectorField& v) {
  MeanVec m;
  for (std::size_t k = 0; k < v.size(); ++k) {
    m.x += v.u[k];
    m.y += v.w[k];
  }
  const double inv = 1.0 / static_cast<double>(v.size());
  m.x *= inv;
  m.y *= inv;
  return m;
}

/// Mean of omega * w_flux^perp, the drift of the harmonic velocity component
/// (the projection of the momentum equation onto torus-constant fields).
inline MeanVec mean_force(const ScalarField& omega, const VectorField& w) {
  MeanVec m;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    m.x += omega[k] * (-w.w[k]);
    m.y += omega[k] * w.u[k];
  }
  const double inv = 1.0 / static_cast<double>(omega.size());
  m.x *= inv;
  m.y *= inv;
  return m;
}

inline VectorField reconstruct_with_mean(const ScalarField& omega, const ScalarField& zeta,
                                         const PinningProfile& pin, const HarmonicBasis& hb,
                                         const MeanVec& target, const EllipticOptions& eopts) {
  auto [v, rep] = reconstruct_velocity(omega, zeta, pin, eopts);
  const MeanVec got = mean_velocity(v);
  hb.add_to(v, target.x - got.x, target.y - got.y);
  return v;
}

}  // namespace detail

/// One coupled step of the vorticity formulation: transport omega, step zeta
/// (or keep it zero in the incompressible regime), re-derive the velocity.
/// A predictor provides time-centered fields so the step is second order in
/// dt even though each sub-step freezes its advecting field.
inline State advance(const State& s, const PinningProfile& pin, const HarmonicBasis& hb,
                     const VectorField& forcing, const ModelParams& params, double dt,
                     const StepOptions& opts, const EllipticOptions& eopts = {}) {
  const bool with_zeta = params.evolves_zeta();
  const detail::MeanVec mv0 = detail::mean_velocity(s.v);

  VectorField w0 = transport_velocity(s.v, forcing, params);
  ScalarField omega_p = step_vorticity(s.omega, w0, dt, opts.cfl, opts.limiter);
  ScalarField zeta_p =
      with_zeta ? step_zeta(s.zeta, s.omega, s.v, pin, forcing, params, dt, opts) : ScalarField(s.omega.grid);
  detail::MeanVec f0 = detail::mean_force(s.omega, w0);
  VectorField v_p = detail::reconstruct_with_mean(
      omega_p, zeta_p, pin, hb, {mv0.x + dt * f0.x, mv0.y + dt * f0.y}, eopts);

  // midpoint fields for the corrector
  VectorField v_mid = s.v;
  v_mid += v_p;
  v_mid *= 0.5;
  ScalarField omega_mid = s.omega;
  omega_mid += omega_p;
  omega_mid *= 0.5;
  VectorField w_mid = transport_velocity(v_mid, forcing, params);

  ScalarField omega_n = step_vorticity(s.omega, w_mid, dt, opts.cfl, opts.limiter);
  ScalarField zeta_n =
      with_zeta ? step_zeta(s.zeta, omega_mid, v_mid, pin, forcing, params, dt, opts)
                : ScalarField(s.omega.grid);
  detail::MeanVec fm = detail::mean_force(omega_mid, w_mid);
  VectorField v_n = detail::reconstruct_with_mean(
      omega_n, zeta_n, pin, hb, {mv0.x + dt * fm.x, mv0.y + dt * fm.y}, eopts);

  return State(s.t + dt, std::move(v_n), std::move(omega_n), std::move(zeta_n));
}

/// Full problem description for a run.
struct EvolutionSetup {
  Grid2D grid;
  ModelParams params;
  PinningProfile pin;
  VectorField forcing;
  ScalarField omega0;
  ScalarField zeta0;
  StepOptions step;
  EllipticOptions elliptic;
  double t_final = 1.0;
  int snapshot_stride = 1;     // record every k-th step
  double snapshot_dt = 0.0;    // if > 0, record at exact multiples instead
};

/// Initial state: velocity reconstructed from the mean-removed data with zero
/// harmonic component.
inline State initial_state(const EvolutionSetup& setup) {
  auto [v, rep] = reconstruct_velocity(setup.omega0, setup.zeta0, setup.pin, setup.elliptic);
  return State(0.0, std::move(v), setup.omega0, setup.zeta0);
}

struct RunStatus {
  bool completed = true;
  std::string error;
};

/// Time integration with adaptive dt = min(dt_max, cfl dx / max|w|), recording
/// snapshots at the configured stride. Deterministic for a given setup.
/// With a status out-parameter, solver failures mid-run return the partial
/// trajectory instead of throwing.
inline Trajectory run(const EvolutionSetup& setup, RunStatus* status = nullptr) {
  setup.step.validate();
  setup.params.validate();
  if (setup.t_final < 0.0) throw ValidationError("t_final must be >= 0");
  if (setup.snapshot_stride < 1) throw ValidationError("snapshot_stride must be >= 1");

  Trajectory traj;
  State state;
  auto record = [&](const State& s) {
    traj.times.push_back(s.t);
    traj.snapshots.push_back(s);
  };
  double mass0 = 0.0;
  const double t_end = setup.t_final;
  double next_snap_time = setup.snapshot_dt > 0.0 ? setup.snapshot_dt : 0.0;
  long steps_since_record = 0;

  try {
  const HarmonicBasis hb = HarmonicBasis::make(setup.pin, setup.elliptic);
  state = initial_state(setup);
  traj.min_omega_ever = state.omega.min();
  mass0 = mean(state.omega);
  record(state);

  while (state.t < t_end * (1.0 - 1e-14)) {
    VectorField w = transport_velocity(state.v, setup.forcing, setup.params);
    // 5% margin: the corrector's midpoint velocity may exceed the current one
    double dt = std::min(setup.step.dt_max, 0.95 * cfl_dt(w, setup.step.cfl, setup.grid.dx()));
    if (setup.params.evolves_zeta() && setup.params.lambda > 0.0) {
      VectorField drift = setup.pin.grad_h;
      drift *= -setup.params.lambda;
      dt = std::min(dt, cfl_dt(drift, setup.step.cfl, setup.grid.dx()));
    }
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw SolverError("adaptive dt collapsed (non-finite velocity?)");
    dt = std::min(dt, t_end - state.t);
    if (setup.snapshot_dt > 0.0 && next_snap_time > state.t)
      dt = std::min(dt, next_snap_time - state.t);

    State next = state;
    for (int attempt = 0;; ++attempt) {
      try {
        next = advance(state, setup.pin, hb, setup.forcing, setup.params, dt, setup.step,
                       setup.elliptic);
        break;
      } catch (const CflViolation&) {
        if (attempt >= 3) throw;
        dt *= 0.5;  // rare: the midpoint velocity grew past the margin
      }
    }
    state = std::move(next);
    ++traj.steps_taken;
    ++steps_since_record;

    traj.min_omega_ever = std::min(traj.min_omega_ever, state.omega.min());
    if (mass0 != 0.0)
      traj.max_mass_rel_drift =
          std::max(traj.max_mass_rel_drift, std::fabs(mean(state.omega) - mass0) / std::fabs(mass0));

    bool do_record = false;
    if (setup.snapshot_dt > 0.0) {
      if (state.t >= next_snap_time * (1.0 - 1e-12)) {
        do_record = true;
        next_snap_time += setup.snapshot_dt;
      }
    } else if (steps_since_record >= setup.snapshot_stride) {
      do_record = true;
    }
    if (state.t >= t_end * (1.0 - 1e-14)) do_record = true;
    if (do_record) {
      record(state);
      steps_since_record = 0;
    }
  }
  } catch (const SolverError& e) {
    if (!status) throw;
    if (!traj.times.empty() && traj.times.back() < state.t) record(state);
    status->completed = false;
    status->error = e.what();
    return traj;
  }
  if (status) *status = RunStatus{};
  return traj;
}

}  // namespace meanvort
