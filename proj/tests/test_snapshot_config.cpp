#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "meanvort/config.hpp"
#include "meanvort/diagnostics.hpp"
#include "meanvort/rng.hpp"
#include "meanvort/scenario.hpp"
#include "meanvort/snapshot.hpp"

using namespace meanvort;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "meanvort_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("scalar snapshots round-trip bit-exactly") {
  Grid2D g(64, 8.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScalarField f = random_band_limited(g, seed, 5);
    const auto path = (temp_dir() / "scalar.mvf").string();
    write_snapshot(path, f, 0.75);
    auto [back, t] = read_scalar_snapshot(path);
    REQUIRE(t == 0.75);
    REQUIRE(back.grid == g);
    for (std::size_t k = 0; k < f.size(); ++k) REQUIRE(back[k] == f[k]);
  }
}

TEST_CASE("vector snapshots round-trip bit-exactly") {
  Grid2D g(32, 4.0);
  VectorField v = random_band_limited_vector(g, 9, 4);
  const auto path = (temp_dir() / "vector.mvf").string();
  write_snapshot(path, v, 1.5);
  auto [back, t] = read_vector_snapshot(path);
  REQUIRE(t == 1.5);
  for (std::size_t k = 0; k < v.size(); ++k) {
    REQUIRE(back.u[k] == v.u[k]);
    REQUIRE(back.w[k] == v.w[k]);
  }
}

TEST_CASE("kind byte is enforced") {
  Grid2D g(32, 4.0);
  const auto spath = (temp_dir() / "s.mvf").string();
  write_snapshot(spath, ScalarField(g, 1.0), 0.0);
  REQUIRE_THROWS_AS(read_vector_snapshot(spath), IoError);
  const auto vpath = (temp_dir() / "v.mvf").string();
  write_snapshot(vpath, VectorField(g), 0.0);
  REQUIRE_THROWS_AS(read_scalar_snapshot(vpath), IoError);
  REQUIRE_THROWS_AS(read_scalar_snapshot((temp_dir() / "missing.mvf").string()), IoError);
}

TEST_CASE("minimal config gets defaults and the echo dump is a fixed point") {
  const std::string minimal = "grid.n = 64\nparams.regime = incompressible\n";
  RunConfig c = parse_config_text(minimal);
  REQUIRE(c.grid_n == 64);
  REQUIRE(c.grid_l == 16.0);
  REQUIRE(c.cfl == 0.4);
  const std::string once = dump_config(c);
  const std::string twice = dump_config(parse_config_text(once));
  REQUIRE(once == twice);
}

TEST_CASE("unknown keys are hard errors naming the key") {
  try {
    parse_config_text("grid.n = 64\nparams.gamma = 1.0\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(std::string(e.what()).find("params.gamma") != std::string::npos);
  }
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_config_text("grid.n = 64\nnot a key value\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("degenerate regime rejects nonzero beta and lambda") {
  REQUIRE_THROWS_AS(
      parse_config_text("params.regime = degenerate_parabolic\nparams.beta = 0.1\n"),
      ValidationError);
  REQUIRE_THROWS_AS(
      parse_config_text("params.regime = degenerate_parabolic\nparams.lambda = 0.5\n"),
      ValidationError);
  REQUIRE_NOTHROW(parse_config_text("params.regime = degenerate_parabolic\n"));
}

TEST_CASE("missing referenced paths are rejected at validation time") {
  REQUIRE_THROWS_AS(parse_config_text("pinning.path = /no/such/file.mvf\n"), ValidationError);
}

TEST_CASE("malformed values are parse errors") {
  REQUIRE_THROWS_AS(parse_config_text("grid.n = soon\n"), ParseError);
  REQUIRE_THROWS_AS(parse_config_text("time.cfl = fast\n"), ParseError);
  REQUIRE_THROWS_AS(parse_config_text("outputs.emit_csv = yes\n"), ParseError);
  REQUIRE_THROWS_AS(parse_config_text("degenerate.times = 0.5,,1\n"), ParseError);
}

TEST_CASE("config validation bounds") {
  REQUIRE_THROWS_AS(parse_config_text("grid.n = 48\n"), ValidationError);
  REQUIRE_THROWS_AS(parse_config_text("time.cfl = 0.95\n"), ValidationError);
  REQUIRE_THROWS_AS(parse_config_text("solver.limiter = superbee\n"), ValidationError);
  REQUIRE_THROWS_AS(parse_config_text("diagnostics.p = 0.5\n"), ValidationError);
}

TEST_CASE("scenario builder materializes presets and snapshot inputs") {
  // write an h snapshot, reference it from the config, check the weight
  Grid2D g(64, 16.0);
  ScalarField h = pinning_samples(g, "cosine", 0.25);
  const auto hpath = (temp_dir() / "h.mvf").string();
  write_snapshot(hpath, h, 0.0);

  std::string text = "grid.n = 64\ngrid.l = 16\npinning.path = " + hpath + "\n";
  text += "initial.preset = gaussian\ninitial.sigma = 1.0\ninitial.normalize = true\n";
  RunConfig c = parse_config_text(text);
  EvolutionSetup s = build_setup(c);
  REQUIRE((s.pin.h - h).max_abs() == 0.0);
  REQUIRE(std::fabs(mass(s.omega0) - 1.0) < 1e-10);

  // the patch-mass mode solves the radius for the requested mass
  std::string patch = "grid.n = 128\ngrid.l = 8\ninitial.preset = uniform_patch\n";
  patch += "initial.c = 4\ninitial.ramp = 0.25\ninitial.mass = 1\n";
  RunConfig cp = parse_config_text(patch);
  EvolutionSetup sp = build_setup(cp);
  REQUIRE(std::fabs(sp.omega0.max() - 4.0) < 1e-12);
  REQUIRE(std::fabs(mass(sp.omega0) - 1.0) < 2e-4);
}

TEST_CASE("forcing presets") {
  std::string text = "grid.n = 64\nforcing.preset = constant\nforcing.cx = 0.3\nforcing.cy = -0.1\n";
  EvolutionSetup s = build_setup(parse_config_text(text));
  REQUIRE(s.forcing.u[0] == 0.3);
  REQUIRE(s.forcing.w[0] == -0.1);

  std::string drift = "grid.n = 64\npinning.preset = cosine\npinning.amplitude = 0.2\n";
  drift += "forcing.preset = minus_perp_grad_h\n";
  EvolutionSetup sd = build_setup(parse_config_text(drift));
  VectorField expected = perp(sd.pin.grad_h);
  expected *= -1.0;
  REQUIRE((sd.forcing - expected).max_norm() < 1e-15);
}
