#pragma once

#include "meanvort/config.hpp"
#include "meanvort/presets.hpp"
#include "meanvort/snapshot.hpp"

namespace meanvort {

/// Materialize the evolution problem described by a config.
inline EvolutionSetup build_setup(const RunConfig& c) {
  EvolutionSetup s;
  s.grid = Grid2D(c.grid_n, c.grid_l);

  if (!c.pinning_path.empty()) {
    auto [h, t] = read_scalar_snapshot(c.pinning_path);
    if (!(h.grid == s.grid))
      throw ValidationError("pinning snapshot grid does not match the configured grid");
    s.pin = make_pinning(h);
  } else {
    s.pin = make_pinning(pinning_samples(s.grid, c.pinning_preset, c.pinning_amplitude,
                                         static_cast<std::uint64_t>(c.pinning_seed)));
  }

  if (!c.forcing_path.empty()) {
    auto [psi, t] = read_vector_snapshot(c.forcing_path);
    if (!(psi.grid == s.grid))
      throw ValidationError("forcing snapshot grid does not match the configured grid");
    s.forcing = std::move(psi);
  } else if (c.forcing_preset == "zero") {
    s.forcing = VectorField(s.grid);
  } else if (c.forcing_preset == "constant") {
    s.forcing = VectorField(s.grid);
    for (std::size_t k = 0; k < s.forcing.size(); ++k) {
      s.forcing.u[k] = c.forcing_cx;
      s.forcing.w[k] = c.forcing_cy;
    }
  } else if (c.forcing_preset == "smooth") {
    s.forcing = random_band_limited_vector(s.grid, static_cast<std::uint64_t>(c.forcing_seed), 3,
                                           1.0);
    const double m = s.forcing.max_norm();
    if (m > 0.0) s.forcing *= c.forcing_amplitude / m;
  } else if (c.forcing_preset == "minus_perp_grad_h") {
    // the pinning drift component of the physical forcing
    s.forcing = perp(s.pin.grad_h);
    s.forcing *= -1.0;
  } else {
    throw ValidationError("unknown forcing preset '" + c.forcing_preset + "'");
  }

  InitialPreset ip;
  ip.name = c.initial_preset;
  ip.c = c.initial_c;
  ip.r = c.initial_r;
  ip.ramp = c.initial_ramp;
  ip.sigma = c.initial_sigma;
  ip.center_x = c.initial_center_x;
  ip.center_y = c.initial_center_y;
  ip.normalize = c.initial_normalize;
  if (c.initial_mass > 0.0 && c.initial_preset == "uniform_patch") {
    const double ramp = ip.ramp > 0.0 ? ip.ramp : 4.0 * s.grid.dx();
    ip.r = patch_radius_for_mass(c.initial_mass, ip.c, ramp);
    ip.normalize = false;  // the plateau amplitude is the point of this mode
  }
  auto [om, ze] = preset_initial(s.grid, ip);
  s.omega0 = std::move(om);
  s.zeta0 = std::move(ze);

  s.params.alpha = c.alpha;
  s.params.beta = c.beta;
  s.params.lambda = c.lambda;
  s.params.regime = regime_from_string(c.regime);
  s.params.validate();

  s.step.cfl = c.cfl;
  s.step.dt_max = c.dt_max > 0.0 ? c.dt_max : std::numeric_limits<double>::infinity();
  s.step.limiter = limiter_from_string(c.limiter);
  s.step.zeta_scheme = zeta_scheme_from_string(c.zeta_scheme);
  s.elliptic.tol = c.solver_tol;
  s.elliptic.max_iter = c.solver_max_iter;
  s.t_final = c.t_final;
  s.snapshot_stride = c.snapshot_stride;
  s.snapshot_dt = c.snapshot_dt;
  return s;
}

}  // namespace meanvort
