#pragma once

#include <cmath>

#include "meanvort/calculus.hpp"
#include "meanvort/field.hpp"
#include "meanvort/rng.hpp"

namespace meanvort {

/// Pinning data bundle: potential h, weight a = e^h, its inverse, and grad h.
struct PinningProfile {
  ScalarField h;
  ScalarField a;
  ScalarField a_inv;
  VectorField grad_h;

  bool is_flat() const { return h.max_abs() == 0.0; }
};

inline PinningProfile make_pinning(const ScalarField& h_samples) {
  if (!h_samples.all_finite()) throw ValidationError("pinning potential has non-finite samples");
  if (h_samples.max_abs() > 500.0)
    throw ValidationError("pinning amplitude max|h| > 500 would overflow the weight e^h");
  PinningProfile p;
  p.h = h_samples;
  p.a = ScalarField(h_samples.grid);
  p.a_inv = ScalarField(h_samples.grid);
  for (std::size_t k = 0; k < h_samples.size(); ++k) {
    p.a[k] = std::exp(h_samples[k]);
    p.a_inv[k] = std::exp(-h_samples[k]);
  }
  p.grad_h = gradient(p.h);
  return p;
}

inline PinningProfile flat_pinning(const Grid2D& grid) { return make_pinning(ScalarField(grid)); }

/// Named pinning potentials used by the CLI and tests.
///   zero:          h = 0 (reduces the incompressible model to weighted-free form)
///   cosine:        h = amp * cos(2 pi x / l)
///   gaussian_bump: h = amp * exp(-|x - center|^2 / (2 sigma^2)), periodically summed
///   random:        seeded band-limited sample scaled to max |h| = amp
inline ScalarField pinning_samples(const Grid2D& grid, const std::string& preset, double amp,
                                   std::uint64_t seed = 1) {
  ScalarField h(grid);
  if (preset == "zero") {
    return h;
  } else if (preset == "cosine") {
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix)
        h.at(ix, iy) = amp * std::cos(2.0 * M_PI * grid.x(ix) / grid.l);
    return h;
  } else if (preset == "gaussian_bump") {
    const double cx = 0.5 * grid.l, cy = 0.5 * grid.l;
    const double sigma = grid.l / 8.0;
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix) {
        const double dxp = grid.periodic_delta(grid.x(ix) - cx);
        const double dyp = grid.periodic_delta(grid.y(iy) - cy);
        h.at(ix, iy) = amp * std::exp(-(dxp * dxp + dyp * dyp) / (2.0 * sigma * sigma));
      }
    return h;
  } else if (preset == "random") {
    h = random_band_limited(grid, seed, 3, 1.0);
    const double m = h.max_abs();
    if (m > 0.0) h *= amp / m;
    return h;
  }
  throw ValidationError("unknown pinning preset '" + preset + "'");
}

}  // namespace meanvort
