#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "meanvort/calculus.hpp"
#include "meanvort/rng.hpp"

using namespace meanvort;

namespace {

Grid2D grid64() { return Grid2D(64, 2.0 * M_PI); }

ScalarField sample(const Grid2D& g, auto&& f) {
  ScalarField s(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) s.at(ix, iy) = f(g.x(ix), g.y(iy));
  return s;
}

/// Second-order centered difference curl, the independent oracle for the
/// spectral operator on generic smooth fields.
ScalarField fd_curl(const VectorField& v) {
  const Grid2D& g = v.grid;
  ScalarField out(g);
  const double inv2dx = 1.0 / (2.0 * g.dx());
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      const int xp = g.wrap(ix + 1), xm = g.wrap(ix - 1);
      const int yp = g.wrap(iy + 1), ym = g.wrap(iy - 1);
      out.at(ix, iy) = (v.w.at(xp, iy) - v.w.at(xm, iy)) * inv2dx -
                       (v.u.at(ix, yp) - v.u.at(ix, ym)) * inv2dx;
    }
  return out;
}

}  // namespace

TEST_CASE("curl of a Fourier eigenmode is exact") {
  const Grid2D g = grid64();
  const double k = 2.0 * M_PI / g.l;
  VectorField v(sample(g, [&](double, double y) { return -std::sin(k * y); }),
                sample(g, [&](double x, double) { return std::sin(k * x); }));
  ScalarField c = curl(v);
  ScalarField expected =
      sample(g, [&](double x, double y) { return k * (std::cos(k * x) + std::cos(k * y)); });
  REQUIRE((c - expected).max_abs() < 1e-12 * expected.max_abs());
}

TEST_CASE("curl annihilates gradients") {
  const Grid2D g = grid64();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ScalarField phi = random_band_limited(g, seed, 5);
    ScalarField c = curl(gradient(phi));
    REQUIRE(c.max_abs() < 1e-10 * std::max(1.0, phi.max_abs()));
  }
}

TEST_CASE("div of perp grad vanishes") {
  const Grid2D g = grid64();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ScalarField phi = random_band_limited(g, seed + 1000, 5);
    ScalarField d = divergence(perp(gradient(phi)));
    REQUIRE(d.max_abs() < 1e-10 * std::max(1.0, phi.max_abs()));
  }
}

TEST_CASE("spectral curl matches the centered-difference oracle at O(dx^2)") {
  // Frozen oracle ratios: on a smooth band-limited field the FD stencil has
  // error C*dx^2 while the spectral result is exact, so the disagreement must
  // shrink by ~4x per refinement.
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    Grid2D g(n, 2.0 * M_PI);
    VectorField v = random_band_limited_vector(g, 7, 4);
    const double diff = (curl(v) - fd_curl(v)).max_abs();
    if (prev > 0.0) {
      const double rate = prev / diff;
      REQUIRE(rate > 3.5);
      REQUIRE(rate < 4.5);
    }
    prev = diff;
  }
}

TEST_CASE("perp is a quarter turn") {
  const Grid2D g = grid64();
  VectorField v = random_band_limited_vector(g, 3, 4);
  VectorField pp = perp(perp(v));
  for (std::size_t k = 0; k < v.size(); ++k) {
    REQUIRE(pp.u[k] == -v.u[k]);
    REQUIRE(pp.w[k] == -v.w[k]);
  }
}

TEST_CASE("gradient of a Fourier mode is exact") {
  const Grid2D g = grid64();
  const double k = 2.0 * M_PI / g.l;
  ScalarField s = sample(g, [&](double x, double) { return std::sin(k * x); });
  VectorField grad = gradient(s);
  ScalarField gx_expected = sample(g, [&](double x, double) { return k * std::cos(k * x); });
  REQUIRE((grad.u - gx_expected).max_abs() < 1e-12 * k);
  REQUIRE(grad.w.max_abs() < 1e-12 * k);
}

TEST_CASE("derivative operators annihilate constants and resolve a mode basis") {
  const Grid2D g = grid64();
  ScalarField c(g, 3.7);
  REQUIRE(gradient(c).max_norm() < 1e-12);
  REQUIRE(laplacian(c).max_abs() < 1e-12);

  const double k0 = 2.0 * M_PI / g.l;
  int checked = 0;
  for (int kx = 1; kx <= 8 && checked < 8; ++kx, ++checked) {
    ScalarField s = sample(g, [&](double x, double y) { return std::cos(k0 * kx * x + 0.3 * k0 * 0 * y); });
    VectorField grad = gradient(s);
    ScalarField expected = sample(g, [&](double x, double) { return -k0 * kx * std::sin(k0 * kx * x); });
    REQUIRE((grad.u - expected).max_abs() < 1e-12 * k0 * kx);
  }
}

TEST_CASE("spectral shift translates resolved fields exactly") {
  const Grid2D g = grid64();
  const double k = 2.0 * M_PI / g.l;
  ScalarField s = sample(g, [&](double x, double y) { return std::sin(k * x) * std::cos(2 * k * y); });
  const double sx = 3.0 * g.dx(), sy = -1.5 * g.dx();
  ScalarField shifted = spectral_shift(s, sx, sy);
  ScalarField expected =
      sample(g, [&](double x, double y) { return std::sin(k * (x - sx)) * std::cos(2 * k * (y - sy)); });
  REQUIRE((shifted - expected).max_abs() < 1e-12);
}

TEST_CASE("Parseval cross-check of the L2 norm") {
  const Grid2D g = grid64();
  ScalarField s = random_band_limited(g, 11, 6);
  const double direct = std::sqrt(dot_l2(s, s) * g.cell_area());
  const double spectral = l2_norm_spectral(s);
  REQUIRE(std::fabs(direct - spectral) < 1e-10 * direct);
}

TEST_CASE("poisson solve inverts the laplacian on zero-mean fields") {
  const Grid2D g = grid64();
  ScalarField u_star = random_band_limited(g, 21, 5);
  remove_mean(u_star);
  ScalarField f = laplacian(u_star);
  f *= -1.0;
  ScalarField u = poisson_zero_mean(f);
  REQUIRE((u - u_star).max_abs() < 1e-11 * std::max(1.0, u_star.max_abs()));
}
