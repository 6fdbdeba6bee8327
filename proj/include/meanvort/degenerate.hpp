#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <vector>

#include "meanvort/calculus.hpp"
#include "meanvort/elliptic.hpp"
#include "meanvort/field.hpp"

namespace meanvort {

enum class InterpKind { Bilinear, Bicubic };

namespace detail {

inline void catmull_rom_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

/// Periodic off-grid evaluation of a scalar sample plane.
inline double interp_scalar(const ScalarField& q, double x, double y, InterpKind kind) {
  const Grid2D& g = q.grid;
  const double gx = x / g.dx(), gy = y / g.dx();
  if (kind == InterpKind::Bilinear) {
    const int ix0 = static_cast<int>(std::floor(gx)), iy0 = static_cast<int>(std::floor(gy));
    const double tx = gx - ix0, ty = gy - iy0;
    const int i0 = g.wrap(ix0), i1 = g.wrap(ix0 + 1);
    const int j0 = g.wrap(iy0), j1 = g.wrap(iy0 + 1);
    return (1 - ty) * ((1 - tx) * q.at(i0, j0) + tx * q.at(i1, j0)) +
           ty * ((1 - tx) * q.at(i0, j1) + tx * q.at(i1, j1));
  }
  const int ix0 = static_cast<int>(std::floor(gx)), iy0 = static_cast<int>(std::floor(gy));
  double wx[4], wy[4];
  catmull_rom_weights(gx - ix0, wx);
  catmull_rom_weights(gy - iy0, wy);
  double acc = 0.0;
  for (int dy = -1; dy <= 2; ++dy) {
    const int j = q.grid.wrap(iy0 + dy);
    double row = 0.0;
    for (int dxi = -1; dxi <= 2; ++dxi) row += wx[dxi + 1] * q.at(q.grid.wrap(ix0 + dxi), j);
    acc += wy[dy + 1] * row;
  }
  return acc;
}

struct Point {
  double x = 0.0, y = 0.0;
};

inline Point interp_vector(const VectorField& v, double x, double y, InterpKind kind) {
  return {interp_scalar(v.u, x, y, kind), interp_scalar(v.w, x, y, kind)};
}

/// Catmull-Rom interpolation of a uniformly sampled 1D array with clamped
/// end stencils; `pos` is the fractional index.
inline double interp_array(const std::vector<double>& a, double pos) {
  const int mmax = static_cast<int>(a.size()) - 1;
  int i0 = static_cast<int>(std::floor(pos));
  if (i0 < 0) i0 = 0;
  if (i0 > mmax - 1) i0 = mmax - 1;
  const double t = pos - i0;
  double w[4];
  catmull_rom_weights(t, w);
  auto at = [&](int i) { return a[std::clamp(i, 0, mmax)]; };
  return w[0] * at(i0 - 1) + w[1] * at(i0) + w[2] * at(i0 + 1) + w[3] * at(i0 + 2);
}

/// Cubic Hermite interpolation of a prefix array whose exact nodal
/// derivatives are known (the sampled integrand); fourth order.
inline double interp_hermite(const std::vector<double>& val, const std::vector<double>& der,
                             double pos, double h) {
  const int mmax = static_cast<int>(val.size()) - 1;
  int i0 = static_cast<int>(std::floor(pos));
  if (i0 < 0) i0 = 0;
  if (i0 > mmax - 1) i0 = mmax - 1;
  const double t = pos - i0;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * val[i0] + (t3 - 2 * t2 + t) * h * der[i0] +
         (-2 * t3 + 3 * t2) * val[i0 + 1] + (t3 - t2) * h * der[i0 + 1];
}

}  // namespace detail

/// Inputs of the scalar characteristic construction: advecting field W,
/// damping density f >= 0, and forcing curl g. The torus-consistent builder
/// below derives these from (omega0, Psi).
struct DegenerateSetup {
  Grid2D grid;
  VectorField W;       // characteristic field; curves solve d_s psi = -W(psi)
  ScalarField f;       // quadratic damping density, nonnegative
  ScalarField g;       // linear forcing density
  VectorField v0;      // initial velocity (for assembling v = -Psi + kappa (Psi + v0))
  VectorField forcing; // Psi
  InterpKind interp = InterpKind::Bicubic;
  double w_max = 0.0;  // cached max|W|, set by finalize()

  void finalize() {
    w_max = W.max_norm();
    if (f.min() < -kVorticityTolPos)
      throw ValidationError("degenerate setup requires f >= 0 (nonnegative initial vorticity)");
  }
};

struct DegenerateOptions {
  double ds = 0.0;          // curve parameter step; 0 = min(0.1/(1+max|W|), dx)
  int margin_samples = 3;   // horizon S = t + margin*ds
  double sigma_substep = 0.5;  // RK4 step for the sigma flow, in units of ds
  double bisect_tol = 1e-10;
  EllipticOptions elliptic;
};

/// One characteristic curve through anchor x: psi samples on the uniform
/// parameter grid s_k = k*ds, k in [-m_half, m_half], the field samples along
/// it, and the cumulative integrals that make the nested quadratures O(1):
///   cum_fg[k] = int_0^{s_k} (f+g)(psi^u) du
///   cum_fe[k] = int_0^{s_k} f(psi^u) exp(cum_fg(u)) du
struct CharCurve {
  double x0 = 0.0, y0 = 0.0;
  double ds = 0.0;
  int m_half = 0;
  std::vector<double> px, py;
  std::vector<double> f_s, g_s;
  std::vector<double> cum_fg, cum_fe;
  std::vector<double> der_fg, der_fe;  // exact nodal derivatives of the prefixes

  double s_min() const { return -m_half * ds; }
  double s_max() const { return m_half * ds; }
  std::size_t size() const { return px.size(); }

  double frac_index(double s) const { return (s - s_min()) / ds; }

  void check_range(double s) const {
    if (s < s_min() + ds || s > s_max() - ds)
      throw OutOfRange("curve horizon too short for s = " + std::to_string(s));
  }

  double C(double s) const {
    check_range(s);
    return detail::interp_hermite(cum_fg, der_fg, frac_index(s), ds);
  }
  double D(double s) const {
    check_range(s);
    return detail::interp_hermite(cum_fe, der_fe, frac_index(s), ds);
  }
};

/// RK4 integration of d_s psi = -W(psi) from the anchor in both directions,
/// with f and g sampled along the way and the cumulative integrals built by
/// segmentwise two-point Gauss quadrature on the interpolated integrands.
inline CharCurve characteristic_flow(double x, double y, double horizon, double ds,
                                     const DegenerateSetup& setup) {
  if (ds > 0.1 / (1.0 + setup.w_max) * (1.0 + 1e-12))
    throw ValidationError("curve step ds must satisfy ds <= 0.1/(1+max|W|)");
  CharCurve c;
  c.x0 = x;
  c.y0 = y;
  c.ds = ds;
  c.m_half = std::max(2, static_cast<int>(std::ceil(horizon / ds)));
  const int m = 2 * c.m_half + 1;
  c.px.assign(m, 0.0);
  c.py.assign(m, 0.0);
  c.f_s.assign(m, 0.0);
  c.g_s.assign(m, 0.0);

  const InterpKind kind = setup.interp;
  auto rhs = [&](const detail::Point& p) {
    detail::Point w = detail::interp_vector(setup.W, p.x, p.y, kind);
    return detail::Point{-w.x, -w.y};
  };
  auto rk4 = [&](detail::Point p, double h) {
    const detail::Point k1 = rhs(p);
    const detail::Point k2 = rhs({p.x + 0.5 * h * k1.x, p.y + 0.5 * h * k1.y});
    const detail::Point k3 = rhs({p.x + 0.5 * h * k2.x, p.y + 0.5 * h * k2.y});
    const detail::Point k4 = rhs({p.x + h * k3.x, p.y + h * k3.y});
    return detail::Point{p.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                         p.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
  };

  const int mid = c.m_half;
  c.px[mid] = x;
  c.py[mid] = y;
  detail::Point p{x, y};
  for (int k = 1; k <= c.m_half; ++k) {  // forward
    p = rk4(p, ds);
    c.px[mid + k] = p.x;
    c.py[mid + k] = p.y;
  }
  p = {x, y};
  for (int k = 1; k <= c.m_half; ++k) {  // backward
    p = rk4(p, -ds);
    c.px[mid - k] = p.x;
    c.py[mid - k] = p.y;
  }
  for (int k = 0; k < m; ++k) {
    c.f_s[k] = detail::interp_scalar(setup.f, c.px[k], c.py[k], kind);
    c.g_s[k] = detail::interp_scalar(setup.g, c.px[k], c.py[k], kind);
  }

  // cum_fg: prefix integral of (f+g) from s=0, both directions.
  std::vector<double> fg(m);
  for (int k = 0; k < m; ++k) fg[k] = c.f_s[k] + c.g_s[k];
  c.cum_fg.assign(m, 0.0);
  const double gauss_node = 0.5 / std::sqrt(3.0);
  auto segment_integral = [&](const std::vector<double>& arr, int k, auto&& weight) {
    // two-point Gauss on [k, k+1] in index space
    const double p1 = k + 0.5 - gauss_node, p2 = k + 0.5 + gauss_node;
    return 0.5 * ds * (weight(detail::interp_array(arr, p1), p1) +
                       weight(detail::interp_array(arr, p2), p2));
  };
  auto plain = [](double v, double) { return v; };
  for (int k = mid; k < m - 1; ++k)
    c.cum_fg[k + 1] = c.cum_fg[k] + segment_integral(fg, k, plain);
  for (int k = mid; k > 0; --k)
    c.cum_fg[k - 1] = c.cum_fg[k] - segment_integral(fg, k - 1, plain);

  c.der_fg = fg;

  // cum_fe: prefix integral of f * exp(cum_fg), using the Hermite prefix.
  c.cum_fe.assign(m, 0.0);
  auto weighted = [&](double fv, double pos) {
    return fv * std::exp(detail::interp_hermite(c.cum_fg, c.der_fg, pos, ds));
  };
  for (int k = mid; k < m - 1; ++k)
    c.cum_fe[k + 1] = c.cum_fe[k] + segment_integral(c.f_s, k, weighted);
  for (int k = mid; k > 0; --k)
    c.cum_fe[k - 1] = c.cum_fe[k] - segment_integral(c.f_s, k - 1, weighted);
  c.der_fe.assign(m, 0.0);
  for (int k = 0; k < m; ++k) c.der_fe[k] = c.f_s[k] * std::exp(c.cum_fg[k]);
  return c;
}

/// Right-hand side of the sigma flow:
///   Z(sigma, sigma0) = max{0, 1 - int_{sigma0}^{sigma} f e^{-int_s^{sigma}(f+g)} ds}
/// evaluated through the cumulative tables.
inline double sigma_rhs(const CharCurve& curve, double sigma, double d_sigma0) {
  const double val = 1.0 - (curve.D(sigma) - d_sigma0) * std::exp(-curve.C(sigma));
  return val > 0.0 ? val : 0.0;
}

/// Integrate the sigma flow from sigma0 at t=0 to time t (classic RK4).
/// The result is clamped into the a-priori bracket [sigma0, sigma0 + t].
inline double sigma_forward(const CharCurve& curve, double t, double sigma0, double substep) {
  if (t < 0.0) throw ValidationError("sigma_forward requires t >= 0");
  curve.check_range(sigma0);
  curve.check_range(sigma0 + t);
  const double d0 = curve.D(sigma0);
  const int steps = std::max(1, static_cast<int>(std::ceil(t / (substep * curve.ds))));
  const double h = t / steps;
  double s = sigma0;
  for (int k = 0; k < steps; ++k) {
    const double k1 = sigma_rhs(curve, s, d0);
    const double k2 = sigma_rhs(curve, s + 0.5 * h * k1, d0);
    const double k3 = sigma_rhs(curve, s + 0.5 * h * k2, d0);
    const double k4 = sigma_rhs(curve, s + h * k3, d0);
    s += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return std::clamp(s, sigma0, sigma0 + t);
}

/// (sigma^t)^{-1}(0) by monotone bisection over sigma0 in [-t, 0].
inline double invert_sigma(const CharCurve& curve, double t, double substep = 0.5,
                           double tol = 1e-10) {
  if (t < 0.0) throw ValidationError("invert_sigma requires t >= 0");
  if (t == 0.0) return 0.0;
  double lo = -t, hi = 0.0;
  const double bracket_tol = 1e-9 * (1.0 + t);
  const double at_lo = sigma_forward(curve, t, lo, substep);
  const double at_hi = sigma_forward(curve, t, hi, substep);
  if (at_lo > bracket_tol || at_hi < -bracket_tol)
    throw BracketFailure("sigma bracket invalid: sigma^t(-t) = " + std::to_string(at_lo) +
                         ", sigma^t(0) = " + std::to_string(at_hi));
  if (at_lo >= 0.0) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (sigma_forward(curve, t, mid, substep) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Scalar damping factor at the curve anchor:
///   kappa^t = 1 - int_{(sigma^t)^{-1}(0)}^{0} f e^{-int_s^0 (f+g)} ds,
/// [0,1]-valued by construction.
inline double kappa_at(const CharCurve& curve, double t, double substep = 0.5,
                       double tol = 1e-10) {
  const double sigma_star = invert_sigma(curve, t, substep, tol);
  const double kappa = 1.0 + curve.D(sigma_star);
  return std::clamp(kappa, 0.0, 1.0);
}

/// Torus-consistent inputs from a vorticity density and forcing: the initial
/// velocity solves curl v0 = omega0 - mean, div(a v0) = 0, the damping field
/// is the full nonnegative density, and the vorticity mean is absorbed into
/// g so that v = -Psi + kappa (Psi + v0) solves the same torus system as the
/// finite-volume evolution (whose reconstruction removes the same mean).
inline DegenerateSetup make_degenerate_setup(const ScalarField& omega0, const VectorField& psi,
                                             const PinningProfile& pin,
                                             const EllipticOptions& eopts = {},
                                             InterpKind interp = InterpKind::Bicubic) {
  DegenerateSetup setup;
  setup.grid = omega0.grid;
  auto [v0, rep] = reconstruct_velocity(omega0, ScalarField(omega0.grid), pin, eopts);
  setup.v0 = std::move(v0);
  setup.forcing = psi;
  VectorField total = setup.forcing;
  total += setup.v0;
  setup.W = perp(total);
  setup.f = omega0;
  setup.g = curl(psi);
  const double background = mean(omega0);
  for (double& v : setup.g.data) v -= background;
  setup.interp = interp;
  setup.finalize();
  return setup;
}

/// Faithful whole-plane variant: f is the curl of the given velocity itself
/// (requires curl v0 >= 0, which on the torus confines it to curl v0 == 0).
inline DegenerateSetup make_degenerate_setup_from_velocity(const VectorField& v0,
                                                           const VectorField& psi,
                                                           InterpKind interp = InterpKind::Bicubic) {
  DegenerateSetup setup;
  setup.grid = v0.grid;
  setup.v0 = v0;
  setup.forcing = psi;
  VectorField total = psi;
  total += v0;
  setup.W = perp(total);
  setup.f = curl(v0);
  setup.g = curl(psi);
  setup.interp = interp;
  setup.finalize();
  return setup;
}

struct DegenerateResult {
  VectorField v;
  ScalarField kappa;
};

/// Explicit solution v^t = -Psi + kappa^t (Psi + v0) of the lambda = beta = 0,
/// alpha = 1 flow, node by node. Each node builds its own characteristic
/// curve; nodes are independent and run in parallel.
inline DegenerateResult degenerate_solution(const DegenerateSetup& setup, double t,
                                            const DegenerateOptions& opts = {}) {
  if (t < 0.0) throw ValidationError("degenerate_solution requires t >= 0");
  const Grid2D& grid = setup.grid;
  double ds = opts.ds;
  const double ds_cap = 0.1 / (1.0 + setup.w_max);
  if (ds <= 0.0) ds = std::min(ds_cap, grid.dx());
  if (ds > ds_cap) throw ValidationError("ds exceeds the characteristic step bound");

  const double horizon = t + opts.margin_samples * ds;
  DegenerateResult out{VectorField(grid), ScalarField(grid)};

  std::atomic<bool> failed{false};
  std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < grid.n; ++iy) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      for (int ix = 0; ix < grid.n; ++ix) {
        CharCurve curve = characteristic_flow(grid.x(ix), grid.y(iy), horizon, ds, setup);
        const double kappa = kappa_at(curve, t, opts.sigma_substep, opts.bisect_tol);
        const std::size_t k = grid.idx(ix, iy);
        out.kappa[k] = kappa;
        out.v.u[k] = -setup.forcing.u[k] + kappa * (setup.forcing.u[k] + setup.v0.u[k]);
        out.v.w[k] = -setup.forcing.w[k] + kappa * (setup.forcing.w[k] + setup.v0.w[k]);
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        if (!failure) failure = std::current_exception();
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace meanvort
