#pragma once

#include <vector>

#include "meanvort/evolution.hpp"

namespace meanvort {

struct PicardReport {
  int iterates = 0;
  std::vector<double> sup_diffs;  // max_t ||v_{n+1} - v_n||_inf per iterate
};

struct PicardOptions {
  int n_iters = 8;
  double stop_tol = 1e-13;  // early exit when the sup difference drops below
  StepOptions step;
  EllipticOptions elliptic;
};

/// Local-existence fixed-point iteration: freeze the velocity trajectory
/// v_n(t), integrate the linear transport for omega_{n+1} and the linear
/// transport-diffusion (source built from the frozen omega_n, v_n) for
/// zeta_{n+1} over [0, T], then re-derive v_{n+1} by elliptic reconstruction.
/// The time grid is fixed by the initial data's CFL bound and shared by all
/// iterates; sub-steps use the frozen field interpolated to midpoints.
/// Divergence (3 consecutive increases of the sup difference) signals a too
/// large window T.
inline std::pair<Trajectory, PicardReport> picard_local(const State& initial,
                                                        const PinningProfile& pin,
                                                        const VectorField& forcing,
                                                        const ModelParams& params, double T,
                                                        const PicardOptions& opts) {
  params.validate();
  if (params.regime == Regime::Compressible && !(params.lambda > 0.0))
    throw RegimeMismatch("picard iteration covers lambda > 0 or the incompressible regime");
  if (params.regime == Regime::DegenerateParabolic)
    throw RegimeMismatch("picard iteration covers lambda > 0 or the incompressible regime");
  if (!(T > 0.0)) throw ValidationError("picard window T must be positive");
  opts.step.validate();

  const Grid2D& grid = initial.omega.grid;
  const bool with_zeta = params.evolves_zeta();
  const HarmonicBasis hb = HarmonicBasis::make(pin, opts.elliptic);

  // fixed time grid from the initial data
  VectorField w0 = transport_velocity(initial.v, forcing, params);
  double dt = std::min(opts.step.dt_max, 0.5 * cfl_dt(w0, opts.step.cfl, grid.dx()));
  if (params.lambda > 0.0) {
    VectorField drift = pin.grad_h;
    drift *= -params.lambda;
    dt = std::min(dt, cfl_dt(drift, opts.step.cfl, grid.dx()));
  }
  if (!std::isfinite(dt)) dt = T;
  const int m = std::max(2, static_cast<int>(std::ceil(T / dt)));
  dt = T / m;

  // iterate 0: constant-in-time initial fields
  std::vector<State> prev(m + 1, initial);
  for (int k = 0; k <= m; ++k) prev[k].t = k * dt;

  PicardReport report;
  std::vector<State> cur = prev;
  int rising = 0;
  for (int it = 1; it <= opts.n_iters; ++it) {
    cur[0] = initial;
    for (int k = 0; k < m; ++k) {
      // the frozen advecting field, time-centered on the sub-interval
      VectorField v_mid = prev[k].v;
      v_mid += prev[k + 1].v;
      v_mid *= 0.5;
      VectorField w_mid = transport_velocity(v_mid, forcing, params);
      ScalarField om_next = step_vorticity(cur[k].omega, w_mid, dt, opts.step.cfl,
                                           opts.step.limiter);
      ScalarField ze_next(grid);
      if (with_zeta) {
        ScalarField om_mid = prev[k].omega;
        om_mid += prev[k + 1].omega;
        om_mid *= 0.5;
        ze_next = step_zeta(cur[k].zeta, om_mid, v_mid, pin, forcing, params, dt, opts.step);
      }
      auto [v_next, rep] = reconstruct_velocity(om_next, ze_next, pin, opts.elliptic);
      // pin the harmonic component to the projected mean-velocity equation
      detail::MeanVec mv = detail::mean_velocity(cur[k].v);
      ScalarField om_mid2 = cur[k].omega;  // frozen-field force at midpoint
      detail::MeanVec force = detail::mean_force(om_mid2, w_mid);
      detail::MeanVec target{mv.x + dt * force.x, mv.y + dt * force.y};
      detail::MeanVec got = detail::mean_velocity(v_next);
      hb.add_to(v_next, target.x - got.x, target.y - got.y);
      cur[k + 1] = State((k + 1) * dt, std::move(v_next), std::move(om_next), std::move(ze_next));
    }

    double sup = 0.0;
    for (int k = 0; k <= m; ++k) {
      VectorField d = cur[k].v;
      d -= prev[k].v;
      sup = std::max(sup, d.max_norm());
    }
    report.sup_diffs.push_back(sup);
    report.iterates = it;

    if (report.sup_diffs.size() >= 2 && sup > report.sup_diffs[report.sup_diffs.size() - 2]) {
      if (++rising >= 3)
        throw Divergence("picard sup differences increased for 3 consecutive iterates; shrink T");
    } else {
      rising = 0;
    }
    prev = cur;
    if (sup <= opts.stop_tol) break;
  }

  Trajectory traj;
  for (int k = 0; k <= m; ++k) {
    traj.times.push_back(prev[k].t);
    traj.snapshots.push_back(prev[k]);
  }
  traj.steps_taken = m;
  traj.min_omega_ever = 0.0;
  for (const State& st : traj.snapshots)
    traj.min_omega_ever = std::min(traj.min_omega_ever, st.omega.min());
  return {traj, report};
}

}  // namespace meanvort
