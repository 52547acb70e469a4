#pragma once

#include <string>
#include <vector>

#include "igflow/errors.hpp"

namespace igflow::cli {

struct CliOptions {
  std::string out_dir;     // overrides config output_dir and IGFLOW_OUT
  int workers = 0;         // 0 = take from config (default 1)
  double tol_scale = 1.0;  // multiplies every run's integrator tolerances
};

// Config text failed to parse; position is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line_, int column_)
      : Error(what), line(line_), column(column_) {}
  int line = 0;
  int column = 0;
};

struct RunOutcome {
  std::string name;
  bool ok = true;
  std::vector<std::string> violations;
};

struct ExperimentOutcome {
  // 0 all checks pass; 1 invariant violation; 2 parse error; 3 capability or
  // run-configuration mismatch.
  int exit_code = 0;
  std::string error;  // populated for exit codes 2 and 3
  std::vector<RunOutcome> runs;
  std::vector<std::string> artifacts;  // paths written, in emission order
};

// Runs the experiment described by a config file (JSON) or by a shipped
// preset name. Integrations execute concurrently up to the worker count;
// every artifact is deterministic for a fixed config and seed.
ExperimentOutcome run_experiment(const std::string& config_path_or_preset,
                                 const CliOptions& opts = {});

// Same, from config text already in memory (used by tests and presets).
ExperimentOutcome run_experiment_text(const std::string& config_text,
                                      const CliOptions& opts = {});

// One line per gap column per CSV: name, fitted slope, sup t^power * gap,
// pass/fail against max_slope.
std::string report_rates(const std::vector<std::string>& csv_paths, double power,
                         double window_lo, double window_hi, double max_slope);

std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);  // raises ConfigError if unknown

}  // namespace igflow::cli
