#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "meanvort/field.hpp"

namespace meanvort {

/// Uniform double in [0, 1) built from the raw 64-bit stream so that the
/// sequence does not depend on the standard library's distribution details.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Random band-limited periodic scalar: sum of Fourier modes with |k_i| <= kmax,
/// amplitudes ~ 1/(1+|k|^2), deterministic for a given seed.
inline ScalarField random_band_limited(const Grid2D& grid, std::uint64_t seed, int kmax = 4,
                                       double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  ScalarField out(grid);
  const double two_pi_over_l = 2.0 * M_PI / grid.l;
  for (int ky = -kmax; ky <= kmax; ++ky) {
    for (int kx = 0; kx <= kmax; ++kx) {
      if (kx == 0 && ky <= 0) continue;  // one representative per conjugate pair, no mean mode
      const double amp = amplitude / (1.0 + kx * kx + ky * ky);
      const double a = amp * uniform(rng, -1.0, 1.0);
      const double b = amp * uniform(rng, -1.0, 1.0);
      for (int iy = 0; iy < grid.n; ++iy) {
        const double phase_y = two_pi_over_l * ky * grid.y(iy);
        for (int ix = 0; ix < grid.n; ++ix) {
          const double ph = two_pi_over_l * kx * grid.x(ix) + phase_y;
          out.at(ix, iy) += a * std::cos(ph) + b * std::sin(ph);
        }
      }
    }
  }
  return out;
}

inline VectorField random_band_limited_vector(const Grid2D& grid, std::uint64_t seed, int kmax = 4,
                                              double amplitude = 1.0) {
  return VectorField(random_band_limited(grid, seed * 2 + 1, kmax, amplitude),
                     random_band_limited(grid, seed * 2 + 2, kmax, amplitude));
}

}  // namespace meanvort
