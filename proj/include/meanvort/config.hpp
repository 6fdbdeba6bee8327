#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "meanvort/errors.hpp"
#include "meanvort/evolution.hpp"

namespace meanvort {

/// Full run description, parsed from flat `section.key = value` text.
struct RunConfig {
  // grid
  int grid_n = 128;
  double grid_l = 16.0;
  // params
  double alpha = 1.0;
  double beta = 0.0;
  double lambda = 0.0;
  std::string regime = "incompressible";
  // pinning
  std::string pinning_preset = "zero";  // zero|cosine|gaussian_bump|random
  double pinning_amplitude = 0.3;
  long long pinning_seed = 1;
  std::string pinning_path;  // optional MVF1 scalar snapshot of h
  // forcing
  std::string forcing_preset = "zero";  // zero|constant|smooth|minus_perp_grad_h
  double forcing_amplitude = 0.2;
  double forcing_cx = 0.0;
  double forcing_cy = 0.0;
  long long forcing_seed = 2;
  std::string forcing_path;  // optional MVF1 vector snapshot of Psi
  // initial data
  std::string initial_preset = "gaussian";  // zero|uniform_patch|gaussian|mollified_ring
  double initial_c = 1.0;
  double initial_r = 1.0;
  double initial_ramp = 0.0;  // 0 = 4*dx
  double initial_sigma = 1.0;
  double initial_center_x = -1.0;
  double initial_center_y = -1.0;
  bool initial_normalize = true;
  double initial_mass = 0.0;  // > 0: solve the patch radius for this mass
  // time
  double t_final = 1.0;
  double cfl = 0.4;
  double dt_max = 0.0;  // 0 = unbounded
  int snapshot_stride = 1;
  double snapshot_dt = 0.0;
  // solver
  double solver_tol = 1e-10;
  int solver_max_iter = 0;
  std::string limiter = "van_leer";
  std::string zeta_scheme = "imex";
  // diagnostics
  double diag_p = 2.0;
  // outputs
  std::string out_dir = "out";
  bool emit_snapshots = true;
  bool emit_csv = true;
  bool emit_plotdata = false;
  // misc
  long long seed = 1234;
  // degenerate-solver front end
  std::string degenerate_scenario = "fields";  // fields|constant_f
  double degenerate_f0 = 1.0;
  std::vector<double> degenerate_times = {0.5};
  double degenerate_ds = 0.0;  // 0 = auto
  std::string degenerate_interp = "bicubic";  // bicubic|bilinear
};

namespace detail {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KeyValue {
  std::string key;
  std::string value;
  int line;
};

inline std::vector<KeyValue> tokenize_config(const std::string& text) {
  std::vector<KeyValue> kvs;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    KeyValue kv;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    kv.line = lineno;
    if (kv.key.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key");
    kvs.push_back(kv);
  }
  return kvs;
}

inline double parse_double(const KeyValue& kv) {
  char* end = nullptr;
  const double v = std::strtod(kv.value.c_str(), &end);
  if (end == kv.value.c_str() || *end != '\0')
    throw ParseError("line " + std::to_string(kv.line) + ": '" + kv.value +
                     "' is not a number for key " + kv.key);
  return v;
}

inline long long parse_int(const KeyValue& kv) {
  char* end = nullptr;
  const long long v = std::strtoll(kv.value.c_str(), &end, 10);
  if (end == kv.value.c_str() || *end != '\0')
    throw ParseError("line " + std::to_string(kv.line) + ": '" + kv.value +
                     "' is not an integer for key " + kv.key);
  return v;
}

inline bool parse_bool(const KeyValue& kv) {
  if (kv.value == "true") return true;
  if (kv.value == "false") return false;
  throw ParseError("line " + std::to_string(kv.line) + ": '" + kv.value +
                   "' is not true/false for key " + kv.key);
}

inline std::vector<double> parse_double_list(const KeyValue& kv) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(kv.value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ParseError("line " + std::to_string(kv.line) + ": empty list entry for " + kv.key);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw ParseError("line " + std::to_string(kv.line) + ": '" + item +
                       "' is not a number in list " + kv.key);
    out.push_back(v);
  }
  if (out.empty())
    throw ParseError("line " + std::to_string(kv.line) + ": empty list for " + kv.key);
  return out;
}

}  // namespace detail

inline void validate_config(const RunConfig& c) {
  Grid2D probe(c.grid_n, c.grid_l);  // throws on bad n or l
  (void)probe;
  ModelParams mp;
  mp.alpha = c.alpha;
  mp.beta = c.beta;
  mp.lambda = c.lambda;
  mp.regime = regime_from_string(c.regime);
  mp.validate();
  (void)limiter_from_string(c.limiter);
  (void)zeta_scheme_from_string(c.zeta_scheme);
  if (c.t_final < 0.0) throw ValidationError("time.t_final must be >= 0");
  if (!(c.cfl > 0.0 && c.cfl <= 0.9)) throw ValidationError("time.cfl must be in (0, 0.9]");
  if (c.dt_max < 0.0) throw ValidationError("time.dt_max must be >= 0");
  if (c.snapshot_stride < 1) throw ValidationError("time.snapshot_stride must be >= 1");
  if (c.snapshot_dt < 0.0) throw ValidationError("time.snapshot_dt must be >= 0");
  if (!(c.solver_tol > 0.0 && c.solver_tol < 1.0))
    throw ValidationError("solver.tol must be in (0, 1)");
  if (c.solver_max_iter < 0) throw ValidationError("solver.max_iter must be >= 0");
  if (!(c.diag_p >= 1.0)) throw ValidationError("diagnostics.p must be >= 1");
  auto known_in = [](const std::string& v, std::initializer_list<const char*> set,
                     const std::string& key) {
    for (const char* s : set)
      if (v == s) return;
    throw ValidationError("unknown value '" + v + "' for " + key);
  };
  known_in(c.pinning_preset, {"zero", "cosine", "gaussian_bump", "random"}, "pinning.preset");
  known_in(c.forcing_preset, {"zero", "constant", "smooth", "minus_perp_grad_h"},
           "forcing.preset");
  known_in(c.initial_preset, {"zero", "uniform_patch", "gaussian", "mollified_ring"},
           "initial.preset");
  known_in(c.degenerate_scenario, {"fields", "constant_f"}, "degenerate.scenario");
  known_in(c.degenerate_interp, {"bicubic", "bilinear"}, "degenerate.interp");
  if (!c.pinning_path.empty() && !std::filesystem::exists(c.pinning_path))
    throw ValidationError("pinning.path does not exist: " + c.pinning_path);
  if (!c.forcing_path.empty() && !std::filesystem::exists(c.forcing_path))
    throw ValidationError("forcing.path does not exist: " + c.forcing_path);
  if (c.initial_mass < 0.0) throw ValidationError("initial.mass must be >= 0");
  for (double t : c.degenerate_times)
    if (t < 0.0) throw ValidationError("degenerate.times must be >= 0");
  if (c.degenerate_ds < 0.0) throw ValidationError("degenerate.ds must be >= 0");
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  for (const auto& kv : detail::tokenize_config(text)) {
    const std::string& k = kv.key;
    if (k == "grid.n") c.grid_n = static_cast<int>(detail::parse_int(kv));
    else if (k == "grid.l") c.grid_l = detail::parse_double(kv);
    else if (k == "params.alpha") c.alpha = detail::parse_double(kv);
    else if (k == "params.beta") c.beta = detail::parse_double(kv);
    else if (k == "params.lambda") c.lambda = detail::parse_double(kv);
    else if (k == "params.regime") c.regime = kv.value;
    else if (k == "pinning.preset") c.pinning_preset = kv.value;
    else if (k == "pinning.amplitude") c.pinning_amplitude = detail::parse_double(kv);
    else if (k == "pinning.seed") c.pinning_seed = detail::parse_int(kv);
    else if (k == "pinning.path") c.pinning_path = kv.value;
    else if (k == "forcing.preset") c.forcing_preset = kv.value;
    else if (k == "forcing.amplitude") c.forcing_amplitude = detail::parse_double(kv);
    else if (k == "forcing.cx") c.forcing_cx = detail::parse_double(kv);
    else if (k == "forcing.cy") c.forcing_cy = detail::parse_double(kv);
    else if (k == "forcing.seed") c.forcing_seed = detail::parse_int(kv);
    else if (k == "forcing.path") c.forcing_path = kv.value;
    else if (k == "initial.preset") c.initial_preset = kv.value;
    else if (k == "initial.c") c.initial_c = detail::parse_double(kv);
    else if (k == "initial.r") c.initial_r = detail::parse_double(kv);
    else if (k == "initial.ramp") c.initial_ramp = detail::parse_double(kv);
    else if (k == "initial.sigma") c.initial_sigma = detail::parse_double(kv);
    else if (k == "initial.center_x") c.initial_center_x = detail::parse_double(kv);
    else if (k == "initial.center_y") c.initial_center_y = detail::parse_double(kv);
    else if (k == "initial.normalize") c.initial_normalize = detail::parse_bool(kv);
    else if (k == "initial.mass") c.initial_mass = detail::parse_double(kv);
    else if (k == "time.t_final") c.t_final = detail::parse_double(kv);
    else if (k == "time.cfl") c.cfl = detail::parse_double(kv);
    else if (k == "time.dt_max") c.dt_max = detail::parse_double(kv);
    else if (k == "time.snapshot_stride") c.snapshot_stride = static_cast<int>(detail::parse_int(kv));
    else if (k == "time.snapshot_dt") c.snapshot_dt = detail::parse_double(kv);
    else if (k == "solver.tol") c.solver_tol = detail::parse_double(kv);
    else if (k == "solver.max_iter") c.solver_max_iter = static_cast<int>(detail::parse_int(kv));
    else if (k == "solver.limiter") c.limiter = kv.value;
    else if (k == "solver.zeta_scheme") c.zeta_scheme = kv.value;
    else if (k == "diagnostics.p") c.diag_p = detail::parse_double(kv);
    else if (k == "outputs.dir") c.out_dir = kv.value;
    else if (k == "outputs.emit_snapshots") c.emit_snapshots = detail::parse_bool(kv);
    else if (k == "outputs.emit_csv") c.emit_csv = detail::parse_bool(kv);
    else if (k == "outputs.emit_plotdata") c.emit_plotdata = detail::parse_bool(kv);
    else if (k == "seed") c.seed = detail::parse_int(kv);
    else if (k == "degenerate.scenario") c.degenerate_scenario = kv.value;
    else if (k == "degenerate.f0") c.degenerate_f0 = detail::parse_double(kv);
    else if (k == "degenerate.times") c.degenerate_times = detail::parse_double_list(kv);
    else if (k == "degenerate.ds") c.degenerate_ds = detail::parse_double(kv);
    else if (k == "degenerate.interp") c.degenerate_interp = kv.value;
    else
      throw ValidationError("unknown config key '" + k + "' (line " + std::to_string(kv.line) + ")");
  }
  validate_config(c);
  return c;
}

inline RunConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

/// Canonical echo of a config; parse(dump(c)) == c and dump is a fixed point.
inline std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  auto d = detail::format_double;
  os << "grid.n = " << c.grid_n << "\n";
  os << "grid.l = " << d(c.grid_l) << "\n";
  os << "params.alpha = " << d(c.alpha) << "\n";
  os << "params.beta = " << d(c.beta) << "\n";
  os << "params.lambda = " << d(c.lambda) << "\n";
  os << "params.regime = " << c.regime << "\n";
  os << "pinning.preset = " << c.pinning_preset << "\n";
  os << "pinning.amplitude = " << d(c.pinning_amplitude) << "\n";
  os << "pinning.seed = " << c.pinning_seed << "\n";
  if (!c.pinning_path.empty()) os << "pinning.path = " << c.pinning_path << "\n";
  os << "forcing.preset = " << c.forcing_preset << "\n";
  os << "forcing.amplitude = " << d(c.forcing_amplitude) << "\n";
  os << "forcing.cx = " << d(c.forcing_cx) << "\n";
  os << "forcing.cy = " << d(c.forcing_cy) << "\n";
  os << "forcing.seed = " << c.forcing_seed << "\n";
  if (!c.forcing_path.empty()) os << "forcing.path = " << c.forcing_path << "\n";
  os << "initial.preset = " << c.initial_preset << "\n";
  os << "initial.c = " << d(c.initial_c) << "\n";
  os << "initial.r = " << d(c.initial_r) << "\n";
  os << "initial.ramp = " << d(c.initial_ramp) << "\n";
  os << "initial.sigma = " << d(c.initial_sigma) << "\n";
  os << "initial.center_x = " << d(c.initial_center_x) << "\n";
  os << "initial.center_y = " << d(c.initial_center_y) << "\n";
  os << "initial.normalize = " << (c.initial_normalize ? "true" : "false") << "\n";
  os << "initial.mass = " << d(c.initial_mass) << "\n";
  os << "time.t_final = " << d(c.t_final) << "\n";
  os << "time.cfl = " << d(c.cfl) << "\n";
  os << "time.dt_max = " << d(c.dt_max) << "\n";
  os << "time.snapshot_stride = " << c.snapshot_stride << "\n";
  os << "time.snapshot_dt = " << d(c.snapshot_dt) << "\n";
  os << "solver.tol = " << d(c.solver_tol) << "\n";
  os << "solver.max_iter = " << c.solver_max_iter << "\n";
  os << "solver.limiter = " << c.limiter << "\n";
  os << "solver.zeta_scheme = " << c.zeta_scheme << "\n";
  os << "diagnostics.p = " << d(c.diag_p) << "\n";
  os << "outputs.dir = " << c.out_dir << "\n";
  os << "outputs.emit_snapshots = " << (c.emit_snapshots ? "true" : "false") << "\n";
  os << "outputs.emit_csv = " << (c.emit_csv ? "true" : "false") << "\n";
  os << "outputs.emit_plotdata = " << (c.emit_plotdata ? "true" : "false") << "\n";
  os << "seed = " << c.seed << "\n";
  os << "degenerate.scenario = " << c.degenerate_scenario << "\n";
  os << "degenerate.f0 = " << d(c.degenerate_f0) << "\n";
  os << "degenerate.times = ";
  for (std::size_t i = 0; i < c.degenerate_times.size(); ++i)
    os << (i ? "," : "") << d(c.degenerate_times[i]);
  os << "\n";
  os << "degenerate.ds = " << d(c.degenerate_ds) << "\n";
  os << "degenerate.interp = " << c.degenerate_interp << "\n";
  return os.str();
}

}  // namespace meanvort
