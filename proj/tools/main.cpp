// Command-line front end: batch integration of the evolution systems over
// config-driven experiment grids, CSV/plot emission and rate reports.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "igflow/experiment.hpp"

namespace {

int print_outcome(const igflow::cli::ExperimentOutcome& outcome) {
  if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << "\n";
  for (const auto& run : outcome.runs) {
    if (run.violations.empty()) {
      std::cout << "[ok]   " << run.name << "\n";
    } else {
      std::cout << "[FAIL] " << run.name << "\n";
      for (const auto& v : run.violations) std::cout << "       " << v << "\n";
    }
  }
  for (const auto& artifact : outcome.artifacts) std::cout << "wrote " << artifact << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"igflow: inertial gradient-flow simulation and verification"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  int workers = 0;
  double tol_scale = 1.0;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config file or preset");
  run_cmd->add_option("config", config, "config path or preset name")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default: $IGFLOW_OUT or .)");
  run_cmd->add_option("--workers", workers, "concurrent runs (default: from config)");
  run_cmd->add_option("--tol-scale", tol_scale, "scale all integrator tolerances");

  std::vector<std::string> csvs;
  double power = 3.0;
  std::string window = "10:1000";
  double max_slope = -3.0 + 0.15;
  auto* rates_cmd = app.add_subcommand("rates", "fit decay rates from emitted CSVs");
  rates_cmd->add_option("csv", csvs, "CSV files produced by run")->required();
  rates_cmd->add_option("--power", power, "power p for sup t^p * gap");
  rates_cmd->add_option("--window", window, "fit window lo:hi");
  rates_cmd->add_option("--max-slope", max_slope, "pass threshold on the fitted slope");

  auto* presets_cmd = app.add_subcommand("presets", "shipped experiment presets");
  auto* presets_list = presets_cmd->add_subcommand("list", "list preset names");
  std::string preset_name;
  auto* presets_show = presets_cmd->add_subcommand("show", "print a preset config");
  presets_show->add_option("name", preset_name, "preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      igflow::cli::CliOptions opts;
      opts.out_dir = out_dir;
      opts.workers = workers;
      opts.tol_scale = tol_scale;
      return print_outcome(igflow::cli::run_experiment(config, opts));
    }
    if (rates_cmd->parsed()) {
      double lo = 10, hi = 1000;
      if (std::sscanf(window.c_str(), "%lf:%lf", &lo, &hi) != 2) {
        std::cerr << "error: --window expects lo:hi\n";
        return 2;
      }
      std::cout << igflow::cli::report_rates(csvs, power, lo, hi, max_slope);
      return 0;
    }
    if (presets_cmd->parsed()) {
      if (presets_show->parsed()) {
        std::cout << igflow::cli::preset_text(preset_name);
        return 0;
      }
      (void)presets_list;
      for (const auto& name : igflow::cli::preset_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const igflow::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
