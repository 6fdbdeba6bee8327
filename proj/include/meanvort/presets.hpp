#pragma once

#include <cmath>
#include <string>

#include "meanvort/calculus.hpp"
#include "meanvort/field.hpp"

namespace meanvort {

/// Quintic smoothstep, C^2 across the junctions: 0 for x <= 0, 1 for x >= 1.
inline double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

struct InitialPreset {
  std::string name = "zero";  // zero | uniform_patch | gaussian | mollified_ring
  double c = 1.0;             // plateau / peak amplitude
  double r = 1.0;             // patch plateau radius / ring radius
  double ramp = 0.0;          // mollification width (defaults to 4 dx)
  double sigma = 1.0;         // gaussian width
  double center_x = -1.0;     // box coordinates; negative means box center
  double center_y = -1.0;
  bool normalize = false;     // rescale amplitude so the box integral is 1
};

/// Plateau radius r0 such that the mollified uniform patch with amplitude c
/// and ramp width w has continuum mass M (quintic-smoothstep edge profile).
inline double patch_radius_for_mass(double mass, double c, double ramp) {
  // mass = c*pi*(r0^2 + w*r0 + 2*w^2/7)
  const double w = ramp;
  const double q = 2.0 * w * w / 7.0 - mass / (c * M_PI);
  const double disc = w * w - 4.0 * q;
  if (disc <= 0.0) throw ValidationError("no patch radius yields the requested mass");
  return 0.5 * (-w + std::sqrt(disc));
}

/// Initial vorticity density (nonnegative, compactly concentrated near the
/// center of the box) plus the matching zeta (always zero for these presets).
inline std::pair<ScalarField, ScalarField> preset_initial(const Grid2D& grid,
                                                          const InitialPreset& p) {
  ScalarField omega(grid);
  ScalarField zeta(grid);
  const double cx = p.center_x >= 0.0 ? p.center_x : 0.5 * grid.l;
  const double cy = p.center_y >= 0.0 ? p.center_y : 0.5 * grid.l;
  const double ramp = p.ramp > 0.0 ? p.ramp : 4.0 * grid.dx();
  if (ramp < 4.0 * grid.dx() - 1e-15)
    throw ValidationError("initial.ramp must be at least 4*dx");

  auto radial = [&](int ix, int iy) {
    const double dxp = grid.periodic_delta(grid.x(ix) - cx);
    const double dyp = grid.periodic_delta(grid.y(iy) - cy);
    return std::sqrt(dxp * dxp + dyp * dyp);
  };

  if (p.name == "zero") {
    return {omega, zeta};
  } else if (p.name == "uniform_patch") {
    if (p.r + ramp >= 0.25 * grid.l)
      throw ValidationError("patch radius + ramp must stay below l/4 to avoid boundary contamination");
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix) {
        const double rr = radial(ix, iy);
        omega.at(ix, iy) = p.c * smoothstep5((p.r + ramp - rr) / ramp);
      }
  } else if (p.name == "gaussian") {
    if (p.sigma > grid.l / 16.0)
      throw ValidationError("gaussian sigma must be at most l/16 so the cutoff tail is negligible");
    const double r_cut = 0.25 * grid.l;
    const double w_cut = std::max(ramp, 0.05 * grid.l);
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix) {
        const double rr = radial(ix, iy);
        const double window = smoothstep5((r_cut - rr) / w_cut);
        omega.at(ix, iy) = p.c * std::exp(-rr * rr / (2.0 * p.sigma * p.sigma)) * window;
      }
  } else if (p.name == "mollified_ring") {
    if (p.r + 4.0 * p.sigma >= 0.25 * grid.l)
      throw ValidationError("ring radius + 4 sigma must stay below l/4");
    const double r_cut = 0.25 * grid.l;
    const double w_cut = std::max(ramp, 0.05 * grid.l);
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix) {
        const double rr = radial(ix, iy);
        const double window = smoothstep5((r_cut - rr) / w_cut);
        const double d = rr - p.r;
        omega.at(ix, iy) = p.c * std::exp(-d * d / (2.0 * p.sigma * p.sigma)) * window;
      }
  } else {
    throw ValidationError("unknown initial preset '" + p.name + "'");
  }

  if (p.normalize) {
    const double m = mean(omega) * grid.l * grid.l;
    if (m <= 0.0) throw ValidationError("cannot normalize a preset with zero mass");
    omega *= 1.0 / m;
  }
  return {omega, zeta};
}

}  // namespace meanvort
