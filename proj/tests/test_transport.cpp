#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "meanvort/calculus.hpp"
#include "meanvort/presets.hpp"
#include "meanvort/rng.hpp"
#include "meanvort/transport.hpp"

using namespace meanvort;

namespace {

ScalarField centered_gaussian(const Grid2D& g, double sigma, double amp = 1.0) {
  InitialPreset p;
  p.name = "gaussian";
  p.sigma = sigma;
  p.c = amp;
  return preset_initial(g, p).first;
}

}  // namespace

TEST_CASE("flux velocity combinations") {
  Grid2D g(64, 8.0);
  VectorField v = random_band_limited_vector(g, 3, 4);
  VectorField psi(g);
  ModelParams mp;

  mp.alpha = 1.0;
  mp.beta = 0.0;
  VectorField w = transport_velocity(v, psi, mp);
  VectorField vp = perp(v);
  REQUIRE((w - vp).max_norm() < 1e-15);

  mp.alpha = 0.0;
  mp.beta = 1.0;
  w = transport_velocity(v, psi, mp);
  REQUIRE((w - v).max_norm() < 1e-15);

  mp.alpha = 0.0;
  mp.beta = 0.0;
  w = transport_velocity(v, psi, mp);
  REQUIRE(w.max_norm() == 0.0);
}

TEST_CASE("zero flux velocity freezes the field") {
  Grid2D g(64, 8.0);
  ScalarField q = random_band_limited(g, 7, 5);
  ScalarField q1 = step_vorticity(q, VectorField(g), 0.1, 0.4, Limiter::VanLeer);
  for (std::size_t k = 0; k < q.size(); ++k) REQUIRE(q1[k] == q[k]);
}

TEST_CASE("constant flux velocity translates a gaussian at second order") {
  // The advecting velocity is -w; after time t the profile sits at x - w*t
  // per d_t q = div(q w). Oracle: exact spectral shift of the initial data.
  double prev_err = 0.0;
  for (int n : {64, 128, 256}) {
    Grid2D g(n, 8.0);
    ScalarField q = centered_gaussian(g, 0.5);
    VectorField w(g);
    const double cx = 0.35, cy = -0.2;
    for (std::size_t k = 0; k < w.size(); ++k) {
      w.u[k] = cx;
      w.w[k] = cy;
    }
    const double t_final = 0.5;
    const int steps = 4 * n / 64;
    const double dt = t_final / steps;
    ScalarField cur = q;
    for (int s = 0; s < steps; ++s) cur = step_vorticity(cur, w, dt, 0.9, Limiter::VanLeer);
    ScalarField expected = spectral_shift(q, -cx * t_final, -cy * t_final);
    double err = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k) err += std::fabs(cur[k] - expected[k]);
    err *= g.cell_area();
    if (prev_err > 0.0) REQUIRE(prev_err / err > 3.0);  // ~O(dx^2) in L1
    prev_err = err;
  }
}

TEST_CASE("mass is conserved to rounding") {
  Grid2D g(128, 16.0);
  ScalarField q = centered_gaussian(g, 0.7, 2.0);
  VectorField w = random_band_limited_vector(g, 17, 4);
  double sum0 = 0.0;
  for (double v : q.data) sum0 += v;
  ScalarField cur = q;
  const double dt = 0.5 * cfl_dt(w, 0.4, g.dx());
  for (int s = 0; s < 50; ++s) cur = step_vorticity(cur, w, dt, 0.4, Limiter::VanLeer);
  double sum1 = 0.0;
  for (double v : cur.data) sum1 += v;
  REQUIRE(std::fabs(sum1 - sum0) <= 1e-12 * std::fabs(sum0));
}

TEST_CASE("positivity is preserved with the limiter on") {
  Grid2D g(128, 8.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScalarField q = random_band_limited(g, seed, 5);
    for (double& v : q.data) v = std::max(0.0, v);  // nonnegative rough data
    VectorField w = random_band_limited_vector(g, 100 + seed, 4);
    ScalarField cur = q;
    const double dt = 0.9 * cfl_dt(w, 0.4, g.dx());
    for (int s = 0; s < 40; ++s) cur = step_vorticity(cur, w, dt, 0.4, Limiter::VanLeer);
    REQUIRE(cur.min() >= -1e-12 * std::max(1.0, q.max()));
  }
}

TEST_CASE("CFL violation is rejected") {
  Grid2D g(64, 8.0);
  ScalarField q = centered_gaussian(g, 0.5);
  VectorField w(g);
  for (std::size_t k = 0; k < w.size(); ++k) w.u[k] = 1.0;
  const double dt_ok = cfl_dt(w, 0.4, g.dx());
  REQUIRE_THROWS_AS(step_vorticity(q, w, 2.0 * dt_ok, 0.4, Limiter::VanLeer), CflViolation);
}

TEST_CASE("limiters vanish at extrema and keep the TVD band") {
  REQUIRE(limited_slope(Limiter::VanLeer, 1.0, -1.0) == 0.0);
  REQUIRE(limited_slope(Limiter::MinMod, -2.0, 0.5) == 0.0);
  REQUIRE(limited_slope(Limiter::VanLeer, 1.0, 1.0) == 1.0);
  REQUIRE(limited_slope(Limiter::MinMod, 2.0, 0.5) == 0.5);
  // Van Leer stays below twice the smaller one-sided difference
  for (double a : {0.1, 0.5, 2.0})
    for (double b : {0.2, 1.0, 3.0})
      REQUIRE(limited_slope(Limiter::VanLeer, a, b) <= 2.0 * std::min(a, b) + 1e-15);
}
