#pragma once

#include <cmath>
#include <cstdint>

#include "meanvort/errors.hpp"

namespace meanvort {

/// Uniform periodic n x n discretization of the square [0, l)^2.
/// Node (i, j) sits at x = i*dx, y = j*dx with dx = l/n; both axes wrap.
struct Grid2D {
  int n = 0;
  double l = 0.0;

  Grid2D() = default;
  Grid2D(int n_, double l_) : n(n_), l(l_) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw ValidationError("grid.n must be a power of two >= 8, got " + std::to_string(n));
    if (!(l > 0.0)) throw ValidationError("grid.l must be positive");
  }

  double dx() const { return l / n; }
  double cell_area() const { return dx() * dx(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }

  /// Row-major index, x fastest.
  std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * n + ix; }

  double x(int ix) const { return ix * dx(); }
  double y(int iy) const { return iy * dx(); }

  int wrap(int i) const {
    int r = i % n;
    return r < 0 ? r + n : r;
  }

  /// Signed distance on the periodic axis, in [-l/2, l/2).
  double periodic_delta(double d) const {
    d = std::fmod(d, l);
    if (d < -0.5 * l) d += l;
    if (d >= 0.5 * l) d -= l;
    return d;
  }

  bool operator==(const Grid2D& o) const { return n == o.n && l == o.l; }
};

}  // namespace meanvort
