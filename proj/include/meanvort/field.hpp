#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "meanvort/grid.hpp"

namespace meanvort {

/// Grid samples of a scalar quantity, row-major (x fastest).
struct ScalarField {
  Grid2D grid;
  std::vector<double> data;

  ScalarField() = default;
  explicit ScalarField(const Grid2D& g, double fill = 0.0) : grid(g), data(g.size(), fill) {}

  double& at(int ix, int iy) { return data[grid.idx(ix, iy)]; }
  double at(int ix, int iy) const { return data[grid.idx(ix, iy)]; }
  double& operator[](std::size_t k) { return data[k]; }
  double operator[](std::size_t k) const { return data[k]; }
  std::size_t size() const { return data.size(); }

  double min() const { return *std::min_element(data.begin(), data.end()); }
  double max() const { return *std::max_element(data.begin(), data.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::fabs(v));
    return m;
  }
  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] += o.data[k];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] -= o.data[k];
    return *this;
  }
  ScalarField& operator*=(double c) {
    for (double& v : data) v *= c;
    return *this;
  }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double c, ScalarField a) { return a *= c; }

/// Two scalar planes (u, w) forming a vector field sample.
struct VectorField {
  Grid2D grid;
  ScalarField u;  // first component
  ScalarField w;  // second component

  VectorField() = default;
  explicit VectorField(const Grid2D& g) : grid(g), u(g), w(g) {}
  VectorField(ScalarField cu, ScalarField cw) : grid(cu.grid), u(std::move(cu)), w(std::move(cw)) {}

  std::size_t size() const { return u.size(); }
  double max_norm() const {
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
      m = std::max(m, std::hypot(u[k], w[k]));
    return m;
  }
  bool all_finite() const { return u.all_finite() && w.all_finite(); }

  VectorField& operator+=(const VectorField& o) {
    u += o.u;
    w += o.w;
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    u -= o.u;
    w -= o.w;
    return *this;
  }
  VectorField& operator*=(double c) {
    u *= c;
    w *= c;
    return *this;
  }
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(double c, VectorField a) { return a *= c; }

/// 2x2 tensor field; symmetric storage uses xy == yx.
struct TensorField {
  Grid2D grid;
  ScalarField xx, xy, yx, yy;
  bool symmetric = false;

  TensorField() = default;
  explicit TensorField(const Grid2D& g, bool sym = false)
      : grid(g), xx(g), xy(g), yx(g), yy(g), symmetric(sym) {}
};

/// Stress-energy tensor v (x) v - (1/2) Id |v|^2.
inline TensorField stress_energy(const VectorField& v) {
  TensorField s(v.grid, /*sym=*/true);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = v.u[k], b = v.w[k];
    const double half2 = 0.5 * (a * a + b * b);
    s.xx[k] = a * a - half2;
    s.xy[k] = a * b;
    s.yx[k] = a * b;
    s.yy[k] = b * b - half2;
  }
  return s;
}

/// (-F2, F1), a quarter turn.
inline VectorField perp(const VectorField& v) {
  VectorField r(v.grid);
  for (std::size_t k = 0; k < v.size(); ++k) {
    r.u[k] = -v.w[k];
    r.w[k] = v.u[k];
  }
  return r;
}

inline double dot_l2(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm_l2(const ScalarField& a) { return std::sqrt(dot_l2(a, a)); }

/// dx^2-weighted L2 norm of a vector field.
inline double norm_l2(const VectorField& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v.u[k] * v.u[k] + v.w[k] * v.w[k];
  return std::sqrt(s * v.grid.cell_area());
}

}  // namespace meanvort
