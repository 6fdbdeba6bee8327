#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <thread>

#include "meanvort/degenerate.hpp"
#include "meanvort/diagnostics.hpp"
#include "meanvort/scenario.hpp"
#include "meanvort/version.hpp"

namespace meanvort {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheck = 4;

namespace detail {

inline std::string csv_value(double v) {
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

inline std::string rows_to_csv(const std::vector<DiagRow>& rows) {
  std::ostringstream os;
  os << kDiagCsvHeader << "\n";
  for (const DiagRow& r : rows) {
    os << csv_value(r.t) << ',' << csv_value(r.mass) << ',' << csv_value(r.linf) << ','
       << csv_value(r.l2) << ',' << csv_value(r.lp) << ',' << csv_value(r.p) << ','
       << csv_value(r.div_a_v_rel) << ',' << csv_value(r.delort_res) << ','
       << csv_value(r.energy) << ',' << csv_value(r.energy_rhs_res) << ','
       << csv_value(r.margin_r44_sharp) << ',' << csv_value(r.margin_r44_univ) << ','
       << csv_value(r.fitted_C_112) << "\n";
  }
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << text;
}

inline std::string snapshot_name(std::size_t index, const char* field) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "snap_%06zu_%s.mvf", index, field);
  return buf;
}

inline std::filesystem::path resolve_out_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("MEANVORT_OUT")) return std::filesystem::path(env);
  return std::filesystem::path(cfg.out_dir);
}

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg,
                           const std::string& status, double wall_seconds) {
  std::ostringstream os;
  os << "artifact = meanvort " << kVersion << "\n";
  os << "status = " << status << "\n";
  os << "wall_clock_seconds = " << format_double(wall_seconds) << "\n";
  os << "config_begin\n" << dump_config(cfg) << "config_end\n";
  write_text(dir / "manifest.txt", os.str());
}

inline void write_plotdata(const std::filesystem::path& dir, const std::vector<DiagRow>& rows) {
  std::filesystem::create_directories(dir / "plot");
  auto series = [&](const char* name, auto&& get) {
    std::ostringstream os;
    for (const DiagRow& r : rows) os << csv_value(r.t) << ' ' << csv_value(get(r)) << "\n";
    write_text(dir / "plot" / name, os.str());
  };
  series("mass.dat", [](const DiagRow& r) { return r.mass; });
  series("linf.dat", [](const DiagRow& r) { return r.linf; });
  series("l2.dat", [](const DiagRow& r) { return r.l2; });
  series("lp.dat", [](const DiagRow& r) { return r.lp; });
  series("energy.dat", [](const DiagRow& r) { return r.energy; });
  series("margin_r44_sharp.dat", [](const DiagRow& r) { return r.margin_r44_sharp; });
  series("margin_r44_univ.dat", [](const DiagRow& r) { return r.margin_r44_univ; });
}

}  // namespace detail

namespace detail {

inline int cmd_run_at(const RunConfig& cfg, const std::filesystem::path& dir, std::ostream& log) {
  const auto wall0 = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(dir);

    EvolutionSetup setup = build_setup(cfg);
    RunStatus status;
    Trajectory traj = run(setup, &status);

    DiagnosticsConfig dcfg;
    dcfg.p = cfg.diag_p;
    dcfg.ref = EnergyReference::zero(setup.grid);
    traj.diagnostics_rows = compute_diag_rows(traj, setup.pin, setup.forcing, setup.params,
                                              setup.omega0, dcfg);

    if (cfg.emit_csv)
      detail::write_text(dir / "diagnostics.csv", detail::rows_to_csv(traj.diagnostics_rows));
    if (cfg.emit_snapshots) {
      for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const State& st = traj.snapshots[k];
        write_snapshot((dir / detail::snapshot_name(k, "omega")).string(), st.omega, st.t);
        write_snapshot((dir / detail::snapshot_name(k, "zeta")).string(), st.zeta, st.t);
        write_snapshot((dir / detail::snapshot_name(k, "v")).string(), st.v, st.t);
      }
    }
    if (cfg.emit_plotdata) detail::write_plotdata(dir, traj.diagnostics_rows);
    detail::write_text(dir / "config.echo.cfg", dump_config(cfg));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    detail::write_manifest(dir, cfg, status.completed ? "ok" : "aborted: " + status.error, wall);
    if (!status.completed) {
      log << "meanvort run: aborted: " << status.error << "\n";
      return kExitSolver;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "meanvort run: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    log << "meanvort run: solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const IoError& e) {
    log << "meanvort run: io error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace detail

/// Execute a configured evolution run: stream diagnostics CSV, snapshots at
/// the configured stride, a manifest, and optional plot-ready series.
inline int cmd_run(const RunConfig& cfg, std::ostream& log = std::cerr) {
  return detail::cmd_run_at(cfg, detail::resolve_out_dir(cfg), log);
}

/// Run the explicit characteristic solver at the configured output times.
/// With a reference run directory, also emit the cross-solver comparison CSV.
inline int cmd_degenerate(const RunConfig& cfg, const std::string& compare_dir = "",
                          std::ostream& log = std::cerr) {
  const auto wall0 = std::chrono::steady_clock::now();
  try {
    if (cfg.regime != "degenerate_parabolic")
      throw RegimeMismatch("the degenerate command requires params.regime = degenerate_parabolic");
    const std::filesystem::path dir = detail::resolve_out_dir(cfg);
    std::filesystem::create_directories(dir);

    const Grid2D grid(cfg.grid_n, cfg.grid_l);
    DegenerateSetup setup;
    double f0 = 0.0;
    if (cfg.degenerate_scenario == "constant_f") {
      f0 = cfg.degenerate_f0;
      setup.grid = grid;
      setup.W = VectorField(grid);
      setup.f = ScalarField(grid, f0);
      setup.g = ScalarField(grid);
      setup.v0 = VectorField(grid);
      setup.forcing = VectorField(grid);
      setup.interp = cfg.degenerate_interp == "bicubic" ? InterpKind::Bicubic : InterpKind::Bilinear;
      setup.finalize();
    } else {
      EvolutionSetup es = build_setup(cfg);
      EllipticOptions eopts;
      eopts.tol = cfg.solver_tol;
      eopts.max_iter = cfg.solver_max_iter;
      setup = make_degenerate_setup(es.omega0, es.forcing, es.pin, eopts,
                                    cfg.degenerate_interp == "bicubic" ? InterpKind::Bicubic
                                                                       : InterpKind::Bilinear);
    }

    DegenerateOptions dopts;
    dopts.ds = cfg.degenerate_ds;

    std::ostringstream csv;
    csv << "t,kappa_min,kappa_max,v_linf,kappa_ref\n";
    std::ostringstream cmp_csv;
    cmp_csv << "t,rel_l2_v\n";

    for (std::size_t i = 0; i < cfg.degenerate_times.size(); ++i) {
      const double t = cfg.degenerate_times[i];
      DegenerateResult r = degenerate_solution(setup, t, dopts);
      char name[48];
      std::snprintf(name, sizeof(name), "deg_%06zu_v.mvf", i);
      write_snapshot((dir / name).string(), r.v, t);
      std::snprintf(name, sizeof(name), "deg_%06zu_kappa.mvf", i);
      write_snapshot((dir / name).string(), r.kappa, t);

      const double kref = cfg.degenerate_scenario == "constant_f"
                              ? 1.0 / (1.0 + f0 * t)
                              : std::numeric_limits<double>::quiet_NaN();
      csv << detail::csv_value(t) << ',' << detail::csv_value(r.kappa.min()) << ','
          << detail::csv_value(r.kappa.max()) << ',' << detail::csv_value(r.v.max_norm()) << ','
          << detail::csv_value(kref) << "\n";

      if (!compare_dir.empty()) {
        if (!std::filesystem::is_directory(compare_dir))
          throw IoError("--compare directory does not exist: " + compare_dir);
        // locate the reference snapshot with matching time
        bool found = false;
        for (const auto& entry : std::filesystem::directory_iterator(compare_dir)) {
          const std::string fname = entry.path().filename().string();
          if (fname.rfind("snap_", 0) != 0 || fname.find("_v.mvf") == std::string::npos) continue;
          auto [v_ref, t_ref] = read_vector_snapshot(entry.path().string());
          if (std::fabs(t_ref - t) > 1e-9) continue;
          const double rel = norm_l2(r.v - v_ref) / norm_l2(v_ref);
          cmp_csv << detail::csv_value(t) << ',' << detail::csv_value(rel) << "\n";
          found = true;
          break;
        }
        if (!found)
          throw IoError("no reference velocity snapshot at t = " + std::to_string(t) + " in " +
                        compare_dir);
      }
    }
    detail::write_text(dir / "degenerate.csv", csv.str());
    if (!compare_dir.empty()) detail::write_text(dir / "comparison.csv", cmp_csv.str());
    detail::write_text(dir / "config.echo.cfg", dump_config(cfg));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    detail::write_manifest(dir, cfg, "ok", wall);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "meanvort degenerate: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    log << "meanvort degenerate: io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    log << "meanvort degenerate: solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

/// Re-derive the hard invariants from the stored snapshots of a run
/// directory: mass conservation, positivity, and the forcing-free decay
/// margins when the run's regime supports them.
inline int cmd_check(const std::string& run_dir, std::ostream& log = std::cerr) {
  try {
    const std::filesystem::path dir(run_dir);
    if (!std::filesystem::is_directory(dir)) {
      log << "meanvort check: not a directory: " << run_dir << "\n";
      return kExitConfig;
    }
    if (!std::filesystem::exists(dir / "config.echo.cfg")) {
      log << "meanvort check: no config.echo.cfg in " << run_dir
          << " (usage: point at a completed run directory)\n";
      return kExitConfig;
    }
    RunConfig cfg = parse_config((dir / "config.echo.cfg").string());
    EvolutionSetup setup = build_setup(cfg);

    // collect snapshots by index
    std::vector<std::string> omega_files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const std::string fname = entry.path().filename().string();
      if (fname.rfind("snap_", 0) == 0 && fname.find("_omega.mvf") != std::string::npos)
        omega_files.push_back(entry.path().string());
    }
    std::sort(omega_files.begin(), omega_files.end());
    if (omega_files.empty()) {
      log << "meanvort check: no snapshots found in " << run_dir << "\n";
      return kExitConfig;
    }

    Trajectory traj;
    for (const std::string& path : omega_files) {
      auto [om, t] = read_scalar_snapshot(path);
      std::string vpath = path;
      vpath.replace(vpath.find("_omega.mvf"), 10, "_v.mvf");
      std::string zpath = path;
      zpath.replace(zpath.find("_omega.mvf"), 10, "_zeta.mvf");
      auto [v, tv] = read_vector_snapshot(vpath);
      auto [ze, tz] = read_scalar_snapshot(zpath);
      traj.times.push_back(t);
      traj.snapshots.emplace_back(t, std::move(v), std::move(om), std::move(ze));
    }

    bool ok = true;
    auto report = [&](const char* name, bool pass, const std::string& detail) {
      log << (pass ? "  [pass] " : "  [FAIL] ") << name << ": " << detail << "\n";
      ok = ok && pass;
    };

    const double mass0 = mass(traj.snapshots.front().omega);
    double worst_drift = 0.0, min_omega = 0.0;
    for (const State& st : traj.snapshots) {
      worst_drift = std::max(worst_drift, std::fabs(mass(st.omega) - mass0) /
                                              std::max(std::fabs(mass0), 1e-300));
      min_omega = std::min(min_omega, st.omega.min());
    }
    report("mass conservation", worst_drift <= 1e-10,
           "max relative drift " + detail::csv_value(worst_drift));
    report("positivity", min_omega >= -1e-12, "min omega " + detail::csv_value(min_omega));

    try {
      auto margins =
          check_decay_margins(traj, traj.snapshots.front().omega, setup.params, setup.pin,
                               setup.forcing, std::max(cfg.diag_p, 2.0));
      double worst = 0.0;
      for (std::size_t k = 0; k < margins.t.size(); ++k) {
        if (margins.t[k] <= 0.0) continue;
        worst = std::max({worst, margins.sharp[k], margins.univ[k]});
      }
      report("decay margins", worst <= 1.05, "max margin " + detail::csv_value(worst));
    } catch (const RegimeMismatch&) {
      log << "  [skip] decay margins: regime preconditions not met\n";
    }

    return ok ? kExitOk : kExitCheck;
  } catch (const ConfigError& e) {
    log << "meanvort check: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    log << "meanvort check: io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    log << "meanvort check: solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

/// Run one configuration per value of a single overridden key; runs are
/// independent and may execute on parallel threads.
inline int cmd_sweep(const RunConfig& base, const std::string& key,
                     const std::vector<std::string>& values, int jobs = 1,
                     std::ostream& log = std::cerr) {
  if (values.empty()) {
    log << "meanvort sweep: no values given\n";
    return kExitConfig;
  }
  std::vector<RunConfig> configs;
  try {
    for (const std::string& v : values) {
      RunConfig c = parse_config_text(dump_config(base) + key + " = " + v + "\n");
      c.out_dir = (std::filesystem::path(detail::resolve_out_dir(base)) / (key + "=" + v)).string();
      configs.push_back(std::move(c));
    }
  } catch (const ConfigError& e) {
    log << "meanvort sweep: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<int> codes(configs.size(), 0);
  std::vector<std::string> logs(configs.size());
  const int n_jobs = std::max(1, jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= configs.size()) return;
      std::ostringstream local_log;
      // out_dir already folded in the env override at sweep level
      codes[k] = detail::cmd_run_at(configs[k], configs[k].out_dir, local_log);
      logs[k] = local_log.str();
    }
  };
  if (n_jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < n_jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t k = 0; k < configs.size(); ++k)
    log << "sweep " << key << " = " << values[k] << ": exit " << codes[k] << "\n" << logs[k];
  for (int c : codes)
    if (c != 0) return c;
  return kExitOk;
}

}  // namespace meanvort
