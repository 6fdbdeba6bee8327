#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "meanvort/evolution.hpp"
#include "meanvort/rng.hpp"

using namespace meanvort;

namespace {

ModelParams compressible(double lambda, double alpha = 1.0, double beta = 0.0) {
  ModelParams mp;
  mp.regime = lambda == 0.0 ? Regime::DegenerateParabolic : Regime::Compressible;
  mp.alpha = alpha;
  mp.beta = beta;
  mp.lambda = lambda;
  return mp;
}

}  // namespace

TEST_CASE("heat eigenmode is propagated exactly") {
  Grid2D g(64, 8.0);
  const double k = 2.0 * M_PI / g.l, lambda = 0.7, dt = 0.05;
  ScalarField z0(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) z0.at(ix, iy) = std::sin(k * g.x(ix));
  PinningProfile pin = flat_pinning(g);
  StepOptions opts;
  ScalarField z1 = step_zeta(z0, ScalarField(g), VectorField(g), pin, VectorField(g),
                             compressible(lambda), dt, opts);
  const double factor = std::exp(-lambda * k * k * dt);
  for (std::size_t idx = 0; idx < z1.size(); ++idx)
    REQUIRE(std::fabs(z1[idx] - factor * z0[idx]) < 1e-8);
}

TEST_CASE("degenerate case reduces to explicit source quadrature") {
  Grid2D g(64, 8.0);
  PinningProfile pin = make_pinning(pinning_samples(g, "random", 0.4, 3));
  ScalarField om = random_band_limited(g, 5, 4);
  for (double& v : om.data) v = std::fabs(v);
  VectorField v = random_band_limited_vector(g, 6, 4);
  ModelParams mp = compressible(0.0);
  StepOptions opts;

  // with zeta0 = 0 and lambda = 0: zeta(dt) = dt * source + O(dt^2)
  ScalarField source = detail::zeta_source(om, v, pin, VectorField(g), mp);
  double prev = 0.0;
  for (double dt : {0.02, 0.01}) {
    ScalarField z = step_zeta(ScalarField(g), om, v, pin, VectorField(g), mp, dt, opts);
    ScalarField lin = source;
    lin *= dt;
    const double err = (z - lin).max_abs() / dt;  // O(dt) after dividing by dt
    if (prev > 0.0) REQUIRE(prev / err > 1.7);
    prev = err;
  }
}

TEST_CASE("manufactured transport-diffusion solution converges at second order") {
  // zeta*(t,x) smooth; with omega := 1 and v := a^{-1} * (-grad lap^{-1} S*),
  // the source term div(a om (-(Psi+v))) equals S* = d_t zeta* - lam lap zeta*
  // + lam div(zeta* grad h), so zeta* solves the stepped equation (alpha=1,
  // beta=0, Psi=0).
  const double lambda = 0.3;
  auto zeta_star = [&](const Grid2D& g, double t) {
    ScalarField z(g);
    const double k = 2.0 * M_PI / g.l;
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix)
        z.at(ix, iy) = std::sin(k * g.x(ix) + 0.5 * t) * std::cos(k * g.y(iy)) * (1.0 + 0.3 * t);
    return z;
  };
  auto zeta_star_dt = [&](const Grid2D& g, double t) {
    ScalarField z(g);
    const double k = 2.0 * M_PI / g.l;
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix)
        z.at(ix, iy) = 0.5 * std::cos(k * g.x(ix) + 0.5 * t) * std::cos(k * g.y(iy)) * (1.0 + 0.3 * t) +
                       0.3 * std::sin(k * g.x(ix) + 0.5 * t) * std::cos(k * g.y(iy));
    return z;
  };

  double prev_err = 0.0;
  for (int n : {32, 64, 128}) {
    Grid2D g(n, 8.0);
    PinningProfile pin = make_pinning(pinning_samples(g, "cosine", 0.3));
    ModelParams mp = compressible(lambda);
    StepOptions opts;
    opts.limiter = Limiter::None;  // smooth signed field; limiter clipping at
                                   // extrema would mask the formal order
    const double t_final = 0.25;
    const int steps = n / 8;
    const double dt = t_final / steps;

    ScalarField z = zeta_star(g, 0.0);
    for (int s = 0; s < steps; ++s) {
      const double t_mid = (s + 0.5) * dt;
      // exact source at the midpoint time
      ScalarField zs = zeta_star(g, t_mid);
      ScalarField drift_term(g);
      {
        VectorField zgh(g);
        for (std::size_t k2 = 0; k2 < zgh.size(); ++k2) {
          zgh.u[k2] = zs[k2] * pin.grad_h.u[k2];
          zgh.w[k2] = zs[k2] * pin.grad_h.w[k2];
        }
        drift_term = divergence(zgh);
      }
      ScalarField lap = laplacian(zs);
      ScalarField S = zeta_star_dt(g, t_mid);
      for (std::size_t k2 = 0; k2 < S.size(); ++k2)
        S[k2] += -lambda * lap[k2] + lambda * drift_term[k2];
      // realize S as div(a*om*(-(v))) with om = 1, v = a^{-1} F, div F = -S
      ScalarField s_proj = S;
      remove_mean(s_proj);
      ScalarField phi = poisson_zero_mean(s_proj);  // -lap phi = S
      VectorField F = gradient(phi);                // div(-F)... div F = -S
      ScalarField om(g, 1.0);
      VectorField v(g);
      for (std::size_t k2 = 0; k2 < v.size(); ++k2) {
        v.u[k2] = pin.a_inv[k2] * F.u[k2];
        v.w[k2] = pin.a_inv[k2] * F.w[k2];
      }
      z = step_zeta(z, om, v, pin, VectorField(g), mp, dt, opts);
    }
    const double err = (z - zeta_star(g, t_final)).max_abs();
    if (prev_err > 0.0) {
      const double order = std::log2(prev_err / err);
      INFO("n " << n << " err " << err << " order " << order);
      REQUIRE(order > 1.7);
    }
    prev_err = err;
  }
}

TEST_CASE("explicit scheme rejects an unstable diffusion step") {
  Grid2D g(64, 8.0);
  PinningProfile pin = flat_pinning(g);
  StepOptions opts;
  opts.zeta_scheme = ZetaScheme::Explicit;
  ScalarField z = random_band_limited(g, 9, 4);
  REQUIRE_THROWS_AS(step_zeta(z, ScalarField(g), VectorField(g), pin, VectorField(g),
                              compressible(1.0), 0.05, opts),
                    CflViolation);
}

TEST_CASE("step_zeta refuses the incompressible regime") {
  Grid2D g(64, 8.0);
  PinningProfile pin = flat_pinning(g);
  ModelParams mp;
  mp.regime = Regime::Incompressible;
  StepOptions opts;
  REQUIRE_THROWS_AS(step_zeta(ScalarField(g), ScalarField(g), VectorField(g), pin, VectorField(g),
                              mp, 0.01, opts),
                    RegimeMismatch);
}
