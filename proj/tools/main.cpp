// Batch front end for the mean-field supercurrent simulator.
//
//   meanvort run --config FILE
//   meanvort degenerate --config FILE [--compare DIR]
//   meanvort check DIR
//   meanvort sweep --config FILE --vary key=v1,v2,... [--jobs N]
//
// Exit codes: 0 success, 2 config error, 3 solver error, 4 check failure.

#include <CLI11.hpp>
#include <iostream>

#include "meanvort/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"meanvort - 2D mean-field supercurrent evolution"};
  app.require_subcommand(1);

  std::string config_path, compare_dir, check_dir, vary;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "time-integrate a configured scenario");
  run->add_option("--config", config_path, "config file")->required();

  CLI::App* degenerate =
      app.add_subcommand("degenerate", "explicit characteristic solver (lambda = beta = 0)");
  degenerate->add_option("--config", config_path, "config file")->required();
  degenerate->add_option("--compare", compare_dir, "reference run directory for the comparison CSV");

  CLI::App* check = app.add_subcommand("check", "re-verify invariants from stored snapshots");
  check->add_option("dir", check_dir, "run directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run one config per value of a key");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--vary", vary, "key=v1,v2,...")->required();
  sweep->add_option("--jobs", jobs, "parallel runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : meanvort::kExitConfig;
  }

  try {
    if (run->parsed()) {
      return meanvort::cmd_run(meanvort::parse_config(config_path));
    } else if (degenerate->parsed()) {
      return meanvort::cmd_degenerate(meanvort::parse_config(config_path), compare_dir);
    } else if (check->parsed()) {
      return meanvort::cmd_check(check_dir);
    } else if (sweep->parsed()) {
      const std::size_t eq = vary.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "meanvort sweep: --vary expects key=v1,v2,...\n";
        return meanvort::kExitConfig;
      }
      const std::string key = vary.substr(0, eq);
      std::vector<std::string> values;
      std::istringstream is(vary.substr(eq + 1));
      std::string item;
      while (std::getline(is, item, ',')) values.push_back(item);
      return meanvort::cmd_sweep(meanvort::parse_config(config_path), key, values, jobs);
    }
  } catch (const meanvort::ConfigError& e) {
    std::cerr << "meanvort: config error: " << e.what() << "\n";
    return meanvort::kExitConfig;
  } catch (const meanvort::SolverError& e) {
    std::cerr << "meanvort: solver error: " << e.what() << "\n";
    return meanvort::kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "meanvort: error: " << e.what() << "\n";
    return meanvort::kExitSolver;
  }
  return meanvort::kExitConfig;
}
