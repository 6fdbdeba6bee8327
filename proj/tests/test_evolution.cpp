#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "meanvort/evolution.hpp"
#include "meanvort/presets.hpp"
#include "meanvort/rng.hpp"

using namespace meanvort;

namespace {

EvolutionSetup base_setup(int n, double l) {
  EvolutionSetup s;
  s.grid = Grid2D(n, l);
  s.pin = flat_pinning(s.grid);
  s.forcing = VectorField(s.grid);
  s.omega0 = ScalarField(s.grid);
  s.zeta0 = ScalarField(s.grid);
  return s;
}

ScalarField gaussian_omega(const Grid2D& g, double sigma, double amp, bool normalize = false) {
  InitialPreset p;
  p.name = "gaussian";
  p.sigma = sigma;
  p.c = amp;
  p.normalize = normalize;
  return preset_initial(g, p).first;
}

ScalarField patch_omega(const Grid2D& g, double c, double mass, double ramp) {
  InitialPreset p;
  p.name = "uniform_patch";
  p.c = c;
  p.ramp = ramp;
  p.r = patch_radius_for_mass(mass, c, ramp);
  return preset_initial(g, p).first;
}

}  // namespace

TEST_CASE("zero coefficients freeze the dynamics") {
  EvolutionSetup s = base_setup(64, 16.0);
  s.params.alpha = 0.0;
  s.params.beta = 0.0;
  s.params.regime = Regime::Incompressible;
  s.omega0 = gaussian_omega(s.grid, 0.8, 1.0, true);
  s.t_final = 0.5;
  s.step.dt_max = 0.05;
  Trajectory traj = run(s);
  const State& last = traj.snapshots.back();
  REQUIRE((last.omega - s.omega0).max_abs() == 0.0);
  const State& first = traj.snapshots.front();
  REQUIRE((last.v - first.v).max_norm() < 1e-9 * first.v.max_norm());
}

TEST_CASE("radial vorticity is steady under pure Euler transport") {
  // alpha=0, beta=1, flat weight, no forcing: v is azimuthal, grad omega is
  // radial, so omega should not move (2D Euler steady state).
  EvolutionSetup s = base_setup(128, 16.0);
  s.params.alpha = 0.0;
  s.params.beta = 1.0;
  s.params.regime = Regime::Incompressible;
  s.omega0 = gaussian_omega(s.grid, 1.0, 1.0, true);
  s.t_final = 1.0;
  s.step.dt_max = 0.1;
  Trajectory traj = run(s);
  const double rel =
      (traj.snapshots.back().omega - s.omega0).max_abs() / s.omega0.max_abs();
  REQUIRE(rel <= 0.05);  // the n=256 acceptance run tightens this to 0.01
}

TEST_CASE("expanding patch follows the characteristic decay law") {
  EvolutionSetup s = base_setup(128, 8.0);
  s.params.alpha = 1.0;
  s.params.beta = 0.0;
  s.params.regime = Regime::Incompressible;
  const double c = 4.0;
  s.omega0 = patch_omega(s.grid, c, 1.0, 0.25);
  s.t_final = 1.0;
  s.snapshot_stride = 1000000;
  Trajectory traj = run(s);
  const double linf = traj.snapshots.back().omega.max();
  const double predicted = c / (1.0 + c * s.t_final);
  REQUIRE(linf / predicted > 0.95);
  REQUIRE(linf / predicted < 1.05);
}

TEST_CASE("mass and positivity hold along runs") {
  EvolutionSetup s = base_setup(64, 16.0);
  s.params.alpha = 1.0;
  s.params.beta = 0.3;
  s.params.lambda = 0.5;
  s.params.regime = Regime::Compressible;
  s.pin = make_pinning(pinning_samples(s.grid, "random", 0.3, 7));
  s.forcing = random_band_limited_vector(s.grid, 8, 3);
  s.forcing *= 0.2;
  s.omega0 = gaussian_omega(s.grid, 1.0, 1.0, true);
  s.t_final = 0.5;
  Trajectory traj = run(s);
  REQUIRE(traj.max_mass_rel_drift <= 1e-12);
  REQUIRE(traj.min_omega_ever >= -1e-12);
}

TEST_CASE("incompressible runs keep the weighted divergence small") {
  EvolutionSetup s = base_setup(64, 16.0);
  s.params.alpha = 1.0;
  s.params.beta = 0.2;
  s.params.regime = Regime::Incompressible;
  s.pin = make_pinning(pinning_samples(s.grid, "random", 0.4, 17));
  s.omega0 = gaussian_omega(s.grid, 1.0, 1.0, true);
  s.t_final = 0.3;
  Trajectory traj = run(s);
  for (const State& st : traj.snapshots) {
    VectorField av = st.v;
    for (std::size_t k = 0; k < av.size(); ++k) {
      av.u[k] *= s.pin.a[k];
      av.w[k] *= s.pin.a[k];
    }
    const double rel = norm_l2(divergence(av)) / norm_l2(st.v);
    REQUIRE(rel <= 10.0 * s.elliptic.tol);
  }
}

TEST_CASE("self-convergence under cfl refinement is second order") {
  auto run_at = [&](double cfl) {
    EvolutionSetup s = base_setup(64, 8.0);
    s.params.alpha = 1.0;
    s.params.beta = 0.0;
    s.params.regime = Regime::Incompressible;
    s.omega0 = gaussian_omega(s.grid, 0.5, 2.0);
    s.t_final = 0.5;
    s.step.cfl = cfl;
    s.snapshot_stride = 1 << 30;
    return run(s).snapshots.back().omega.max();
  };
  const double a = run_at(0.4), b = run_at(0.2), c = run_at(0.1);
  const double order = std::log2(std::fabs(a - b) / std::fabs(b - c));
  INFO("order " << order);
  REQUIRE(order >= 1.8);
}

TEST_CASE("parabolic Lp norms respect the sharp decay bound") {
  EvolutionSetup s = base_setup(128, 8.0);
  s.params.alpha = 1.0;
  s.params.beta = 0.0;
  s.params.regime = Regime::Incompressible;
  s.omega0 = gaussian_omega(s.grid, 0.4, 3.0);
  s.t_final = 1.0;
  s.snapshot_dt = 0.25;
  Trajectory traj = run(s);
  for (double p : {2.0, 64.0}) {
    for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
      const State& st = traj.snapshots[k];
      double meas = 0.0;
      for (double v : st.omega.data) meas += std::pow(std::fabs(v), p);
      meas = std::pow(meas * s.grid.cell_area(), 1.0 / p);
      double bound = 0.0;
      for (double v : s.omega0.data)
        bound += std::pow(std::fabs(v), p) * std::pow(1.0 + s.params.alpha * st.t * v, 1.0 - p);
      bound = std::pow(bound * s.grid.cell_area(), 1.0 / p);
      REQUIRE(meas <= 1.05 * bound);
    }
  }
}

TEST_CASE("amplitude-independent boundedness effect") {
  // t*max(omega) stays near 1/alpha as the initial amplitude grows
  for (double c : {10.0, 100.0, 1000.0}) {
    EvolutionSetup s = base_setup(128, 8.0);
    s.params.alpha = 1.0;
    s.params.beta = 0.0;
    s.params.regime = Regime::Incompressible;
    const double sigma = 1.0 / std::sqrt(2.0 * M_PI * c);  // unit mass at peak c
    s.omega0 = gaussian_omega(s.grid, std::max(sigma, 0.05), c);
    s.t_final = 1.0;
    s.snapshot_stride = 1 << 30;
    Trajectory traj = run(s);
    const double linf = traj.snapshots.back().omega.max();
    REQUIRE(linf <= 1.1 * (1.0 / s.params.alpha + c / (1.0 + c)));
  }
}

TEST_CASE("t_final zero yields a single snapshot") {
  EvolutionSetup s = base_setup(64, 8.0);
  s.params.regime = Regime::Incompressible;
  s.omega0 = gaussian_omega(s.grid, 0.4, 1.0);
  s.t_final = 0.0;
  Trajectory traj = run(s);
  REQUIRE(traj.snapshots.size() == 1);
  REQUIRE(traj.times.size() == 1);
  REQUIRE(traj.times[0] == 0.0);
}

TEST_CASE("runs are deterministic") {
  auto make = [&]() {
    EvolutionSetup s = base_setup(64, 16.0);
    s.params.alpha = 1.0;
    s.params.beta = 0.1;
    s.params.lambda = 0.4;
    s.params.regime = Regime::Compressible;
    s.pin = make_pinning(pinning_samples(s.grid, "random", 0.3, 23));
    s.omega0 = gaussian_omega(s.grid, 1.0, 1.0, true);
    s.t_final = 0.2;
    return run(s);
  };
  Trajectory t1 = make();
  Trajectory t2 = make();
  REQUIRE(t1.snapshots.size() == t2.snapshots.size());
  for (std::size_t k = 0; k < t1.snapshots.size(); ++k) {
    REQUIRE(t1.times[k] == t2.times[k]);
    const State& a = t1.snapshots[k];
    const State& b = t2.snapshots[k];
    for (std::size_t j = 0; j < a.omega.size(); ++j) {
      REQUIRE(a.omega[j] == b.omega[j]);
      REQUIRE(a.v.u[j] == b.v.u[j]);
    }
  }
}

TEST_CASE("gaussian amplitude sweep: degenerate regime matches compressible lambda to zero") {
  // lambda -> 0 continuity: small lambda compressible approaches the
  // degenerate (lambda = 0) run over a short horizon.
  auto final_omega = [&](double lambda) {
    EvolutionSetup s = base_setup(64, 8.0);
    s.params.alpha = 1.0;
    s.params.beta = 0.0;
    s.params.lambda = lambda;
    s.params.regime = lambda == 0.0 ? Regime::DegenerateParabolic : Regime::Compressible;
    s.omega0 = gaussian_omega(s.grid, 0.5, 1.0);
    s.t_final = 0.2;
    s.snapshot_stride = 1 << 30;
    return run(s).snapshots.back().omega;
  };
  ScalarField deg = final_omega(0.0);
  ScalarField lam1 = final_omega(1e-3);
  ScalarField lam2 = final_omega(1e-2);
  const double d1 = (lam1 - deg).max_abs();
  const double d2 = (lam2 - deg).max_abs();
  REQUIRE(d1 < d2);
  REQUIRE(d1 < 1e-3);
}
