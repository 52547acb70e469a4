#include <string>
#include <vector>

#include "igflow/errors.hpp"
#include "igflow/experiment.hpp"

namespace igflow::cli {

namespace {

// Three test functions, three third-order systems each, alpha = 3, beta = 1
// for the Hessian-damped variant, started from (3,1) at rest.
const char* kFigure1 = R"json({
  "name": "figure1",
  "seed": 1,
  "workers": 2,
  "plot": {"mode": "loglog", "series": "gap_u"},
  "defaults": {
    "dynamics": {"alpha": 3.0, "t0": 1.0, "u0": [3, 1], "du0": [0, 0], "ddu0": [0, 0]},
    "integrator": {"rel_tol": 1e-9, "abs_tol": 1e-12, "t_end": 1000.0,
                   "grid": {"kind": "log", "points": 241}}
  },
  "runs": [
    {"name": "f1_toges",    "problem": {"name": "f1"}, "dynamics": {"kind": "TOGES"}},
    {"name": "f1_toges_v",  "problem": {"name": "f1"}, "dynamics": {"kind": "TOGES_V"},
     "diagnostics": {"rate": {"series": "gap_v", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}},
    {"name": "f1_toges_vh", "problem": {"name": "f1"}, "dynamics": {"kind": "TOGES_VH", "beta": 1.0},
     "diagnostics": {"rate": {"series": "gap_v", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}},
    {"name": "f2_toges",    "problem": {"name": "f2"}, "dynamics": {"kind": "TOGES"}},
    {"name": "f2_toges_v",  "problem": {"name": "f2"}, "dynamics": {"kind": "TOGES_V"},
     "diagnostics": {"rate": {"series": "gap_v", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}},
    {"name": "f2_toges_vh", "problem": {"name": "f2"}, "dynamics": {"kind": "TOGES_VH", "beta": 1.0},
     "diagnostics": {"rate": {"series": "gap_v", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}},
    {"name": "f3_toges",    "problem": {"name": "f3"}, "dynamics": {"kind": "TOGES"}},
    {"name": "f3_toges_v",  "problem": {"name": "f3"}, "dynamics": {"kind": "TOGES_V"},
     "diagnostics": {"rate": {"series": "gap_v", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}},
    {"name": "f3_toges_vh", "problem": {"name": "f3"}, "dynamics": {"kind": "TOGES_VH", "beta": 1.0},
     "diagnostics": {"rate": {"series": "gap_v", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}}
  ]
})json";

// Strongly convex comparison on f1: exponential systems against the
// polynomial-rate third-order ones.
const char* kFigure2 = R"json({
  "name": "figure2",
  "seed": 1,
  "workers": 2,
  "plot": {"mode": "semilog", "series": "gap_u"},
  "defaults": {
    "dynamics": {"t0": 1.0, "u0": [3, 1], "du0": [0, 0], "ddu0": [0, 0]},
    "integrator": {"rel_tol": 1e-9, "abs_tol": 1e-12, "t_end": 200.0,
                   "grid": {"kind": "linear", "points": 200}}
  },
  "runs": [
    {"name": "f1_sc3", "problem": {"name": "f1"},
     "dynamics": {"kind": "SC3", "mu": 1.0},
     "diagnostics": {"energy": true, "energy_tol": 1e-6}},
    {"name": "f1_toges_v", "problem": {"name": "f1"},
     "dynamics": {"kind": "TOGES_V", "alpha": 3.0}},
    {"name": "f1_toges_vh", "problem": {"name": "f1"},
     "dynamics": {"kind": "TOGES_VH", "alpha": 3.0, "beta": 1.0}},
    {"name": "f1_heavy_ball", "problem": {"name": "f1"},
     "dynamics": {"kind": "HEAVY_BALL", "mu": 1.0}}
  ]
})json";

// Regularized dynamic on the nonsmooth |x|_1 objective.
const char* kMoreau = R"json({
  "name": "moreau_abs",
  "seed": 1,
  "plot": {"mode": "loglog", "series": "gap_u"},
  "runs": [
    {"name": "abs_toges_vr", "problem": {"name": "abs_sum"},
     "dynamics": {"kind": "TOGES_VR", "alpha": 3.0, "lambda": 1.0, "t0": 1.0,
                  "u0": [3, 1], "du0": [0, 0], "ddu0": [0, 0]},
     "integrator": {"rel_tol": 1e-9, "abs_tol": 1e-12, "t_end": 1000.0,
                    "grid": {"kind": "log", "points": 241}},
     "diagnostics": {"rate": {"series": "gap_u", "window": [10, 1000], "power": 3.0, "max_slope": -2.85}}}
  ]
})json";

}  // namespace

std::vector<std::string> preset_names() { return {"figure1", "figure2", "moreau_abs"}; }

std::string preset_text(const std::string& name) {
  if (name == "figure1") return kFigure1;
  if (name == "figure2") return kFigure2;
  if (name == "moreau_abs") return kMoreau;
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace igflow::cli
