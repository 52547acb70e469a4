#include "igflow/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "igflow/diagnostics.hpp"
#include "igflow/integrator.hpp"
#include "igflow/moreau.hpp"
#include "igflow/report.hpp"

namespace igflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using dynamics::SystemKind;
using diagnostics::GapSelector;

namespace {

std::pair<int, int> line_col_of(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(e.what(), line, col);
  }
}

Vec to_vec(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

// Shallow merge: run-level keys override the experiment-level defaults.
json merged_section(const json& defaults, const json& run, const char* key) {
  json out = defaults.contains(key) ? defaults.at(key) : json::object();
  if (run.contains(key)) {
    for (const auto& [k, v] : run.at(key).items()) out[k] = v;
  }
  return out;
}

problems::ObjectiveSpec make_box(double lo, double hi, int dim) {
  problems::ObjectiveSpec f;
  f.dim = dim;
  f.name = "box";
  f.prox = moreau::box_prox(lo, hi);
  f.value = f.prox->raw_value;
  f.inf_value = 0.0;
  f.minimizer_projection = [lo, hi](const Vec& x) {
    return Vec(x.cwiseMax(lo).cwiseMin(hi));
  };
  return f;
}

problems::ObjectiveSpec make_problem(const json& j) {
  if (!j.contains("name")) throw ConfigError("problem requires a name");
  const std::string name = j.at("name").get<std::string>();
  if (name == "quad_mu" && j.contains("mu")) {
    return problems::quad_mu(j.at("mu").get<double>(), j.value("dim", 2));
  }
  if (name == "box") {
    return make_box(j.value("lo", -1.0), j.value("hi", 1.0), j.value("dim", 2));
  }
  if (name.rfind("box(", 0) == 0 && name.back() == ')') {
    double lo = 0, hi = 0;
    if (std::sscanf(name.c_str(), "box(%lf,%lf)", &lo, &hi) != 2) {
      throw ConfigError("could not parse '" + name + "'; expected box(lo,hi)");
    }
    return make_box(lo, hi, j.value("dim", 2));
  }
  return problems::builtin_problem(name);
}

std::vector<double> make_grid(const json& j, double t0, double t_end) {
  if (j.contains("times")) {
    std::vector<double> out;
    for (const auto& t : j.at("times")) out.push_back(t.get<double>());
    return out;
  }
  const std::string kind = j.value("kind", "log");
  const int points = j.value("points", 200);
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  std::vector<double> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double s = static_cast<double>(i) / (points - 1);
    double t = 0;
    if (kind == "log") {
      t = std::exp(std::log(t0) + s * (std::log(t_end) - std::log(t0)));
    } else if (kind == "linear") {
      t = t0 + s * (t_end - t0);
    } else {
      throw ConfigError("unknown grid kind '" + kind + "'");
    }
    if (i == 0) t = t0;
    if (i == points - 1) t = t_end;
    if (!out.empty() && t <= out.back()) continue;
    out.push_back(t);
  }
  return out;
}

struct RunPlan {
  std::string name;
  problems::ObjectiveSpec problem;       // as integrated
  problems::ObjectiveSpec diag_problem;  // Moreau envelope for TOGES_VR
  dynamics::DynamicsConfig dcfg;
  integrator::IntegratorConfig icfg;

  bool want_energy = false;
  double energy_tol = 1e-7;
  bool want_rate = false;
  std::string rate_series = "gap_v";
  double rate_lo = 10.0, rate_hi = 0.0, rate_power = 3.0, rate_max_slope = -2.85;
  bool want_gradient = false;
  int gradient_points = 100;
  double gradient_tol = 1e-6;
  bool want_residual = false;
  double residual_tol = 1e-6;
  unsigned long seed = 0;
};

struct RunData {
  RunOutcome outcome;
  report::Table csv;
  std::string rates_text;
  std::exception_ptr failure;  // set when the run could not execute at all
};

GapSelector aux_selector(SystemKind kind) {
  if (kind == SystemKind::SC3) return GapSelector::AT_Y;
  return dynamics::is_third_order(kind) ? GapSelector::AT_V : GapSelector::AT_U;
}

Vec aux_point(const dynamics::DynamicsConfig& cfg, const dynamics::PhaseState& state) {
  switch (aux_selector(cfg.kind)) {
    case GapSelector::AT_Y: return dynamics::aux_point_y(state, cfg.mu);
    case GapSelector::AT_V: return dynamics::aux_point_v(state);
    default: return state.u;
  }
}

// Uniform points of the objective's domain with room for the FD stencil.
std::vector<Vec> sample_interior_points(const problems::ObjectiveSpec& problem, int count,
                                        double h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-3.0, 3.0);
  std::vector<Vec> points;
  int guard = 0;
  while (static_cast<int>(points.size()) < count) {
    if (++guard > 100000) throw Error("could not sample interior points");
    Vec x(problem.dim);
    for (int i = 0; i < problem.dim; ++i) x[i] = box(rng);
    if (problem.domain_check) {
      bool ok = problem.domain_check(x);
      for (int i = 0; ok && i < problem.dim; ++i) {
        Vec lo = x, hi = x;
        lo[i] -= 4 * h;
        hi[i] += 4 * h;
        ok = problem.domain_check(lo) && problem.domain_check(hi);
      }
      if (!ok) continue;
    }
    points.push_back(std::move(x));
  }
  return points;
}

void run_gradient_checks(const RunPlan& plan, RunOutcome& outcome) {
  const auto& problem = plan.problem;
  if (!problem.has_grad()) {
    throw CapabilityError("run '" + plan.name +
                          "': gradient check requested on an objective without grad");
  }
  std::mt19937_64 rng(plan.seed);
  const double h = 1e-5;
  const auto points = sample_interior_points(problem, plan.gradient_points, h, rng);
  double worst = 0.0;
  for (const auto& x : points) {
    worst = std::max(worst, problems::check_gradient(problem, x, h));
  }
  if (worst > plan.gradient_tol) {
    outcome.violations.push_back("gradient check failed: max error " +
                                 report::format_double(worst));
  }
  if (problem.has_hvp()) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_h = 0.0;
    for (const auto& x : points) {
      Vec d(problem.dim);
      for (int i = 0; i < problem.dim; ++i) d[i] = gauss(rng);
      d.normalize();
      worst_h = std::max(worst_h, problems::check_hvp(problem, x, d, h));
    }
    if (worst_h > plan.gradient_tol) {
      outcome.violations.push_back("hvp check failed: max error " +
                                   report::format_double(worst_h));
    }
  }
}

RunData execute_run(const RunPlan& plan) {
  RunData data;
  data.outcome.name = plan.name;
  try {
    plan.dcfg.validate(plan.problem);
    const auto traj = integrator::integrate(plan.dcfg, plan.problem, plan.icfg);
    const auto& diag = plan.diag_problem;
    const GapSelector aux_sel = aux_selector(plan.dcfg.kind);

    const auto gap_u = diagnostics::gap_series(traj, diag, GapSelector::AT_U);
    const auto gap_v = diagnostics::gap_series(traj, diag, aux_sel);
    const auto dist = diagnostics::distance_to_argmin_series(traj, diag, GapSelector::AT_U);

    std::vector<double> energy;
    if (plan.want_energy) {
      const double tol = plan.energy_tol;
      if (plan.dcfg.kind == SystemKind::TOGES_V || plan.dcfg.kind == SystemKind::TOGES_VH) {
        const Vec z = diag.minimizer_projection(plan.dcfg.u0);
        const auto report = diagnostics::energy_report(traj, diag, z, tol);
        for (const auto& [t, e] : report.values) energy.push_back(e);
        for (const auto& v : report.violations) {
          data.outcome.violations.push_back(
              "energy increased at t=" + report::format_double(v.t) + " by " +
              report::format_double(v.increase) + " beyond tolerance");
        }
      } else if (plan.dcfg.kind == SystemKind::SC3) {
        const double root_mu = std::sqrt(plan.dcfg.mu);
        double e0 = 0.0;
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
          const auto& s = traj.samples[i];
          const double e = diagnostics::lyapunov_sc(s.state, diag, plan.dcfg.mu);
          if (i == 0) e0 = e;
          energy.push_back(e);
          const double bound = e0 * std::exp(-root_mu * (s.state.t - plan.dcfg.t0));
          if (e > bound + tol * (1.0 + bound)) {
            data.outcome.violations.push_back(
                "exponential energy bound violated at t=" +
                report::format_double(s.state.t));
          }
        }
      } else {
        throw CapabilityError("run '" + plan.name + "': energy diagnostics are not defined for " +
                              dynamics::to_string(plan.dcfg.kind));
      }
    }

    if (plan.want_residual) {
      if (plan.dcfg.kind != SystemKind::TOGES_V && plan.dcfg.kind != SystemKind::SC3) {
        throw CapabilityError("run '" + plan.name +
                              "': residual check applies to TOGES_V and SC3 only");
      }
      double worst = 0.0;
      for (const auto& s : traj.samples) {
        worst = std::max(worst,
                         dynamics::residual_reduction(plan.dcfg, plan.problem, s.state));
      }
      if (worst > plan.residual_tol) {
        data.outcome.violations.push_back("reduction residual " +
                                          report::format_double(worst) + " above tolerance");
      }
    }

    if (plan.want_gradient) run_gradient_checks(plan, data.outcome);

    // Rate report: always fitted for both gap columns; the requested check
    // (if any) contributes to the exit status.
    std::ostringstream rates;
    double fit_lo = plan.want_rate ? plan.rate_lo : std::max(10.0, plan.dcfg.t0);
    const double fit_hi = plan.want_rate ? plan.rate_hi : plan.icfg.t_end;
    if (!plan.want_rate && fit_lo >= fit_hi) fit_lo = plan.dcfg.t0;
    for (const auto* series : {&gap_u, &gap_v}) {
      const std::string label = series == &gap_u ? "gap_u" : "gap_v";
      try {
        const auto est = diagnostics::fit_rate(*series, fit_lo, fit_hi, plan.rate_power);
        rates << "series=" << label << " window=[" << report::format_double(fit_lo) << ","
              << report::format_double(fit_hi) << "]"
              << " slope=" << report::format_double(est.slope)
              << " intercept=" << report::format_double(est.intercept)
              << " residual=" << report::format_double(est.residual) << " sup(t^"
              << report::format_double(plan.rate_power)
              << "*gap)=" << report::format_double(est.sup_scaled) << "\n";
        if (plan.want_rate && label == plan.rate_series && est.slope > plan.rate_max_slope) {
          data.outcome.violations.push_back(
              "rate check failed on " + label + ": slope " +
              report::format_double(est.slope) + " above " +
              report::format_double(plan.rate_max_slope));
        }
      } catch (const InsufficientDataError& e) {
        rates << "series=" << label << " insufficient data (" << e.what() << ")\n";
        if (plan.want_rate && label == plan.rate_series) {
          data.outcome.violations.push_back("rate check failed on " + label + ": " + e.what());
        }
      }
    }
    data.rates_text = rates.str();

    // CSV assembly.
    data.csv.header = {"t", "gap_u", "gap_v", "grad_norm_v"};
    if (plan.want_energy) data.csv.header.push_back("energy");
    data.csv.header.push_back("dist_argmin");
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      const auto& s = traj.samples[i];
      std::vector<double> row;
      row.push_back(s.state.t);
      row.push_back(gap_u.points[i].second);
      row.push_back(gap_v.points[i].second);
      row.push_back(diag.eval_grad(aux_point(plan.dcfg, s.state)).norm());
      if (plan.want_energy) row.push_back(energy[i]);
      row.push_back(dist[i].second);
      data.csv.rows.push_back(std::move(row));
    }
    data.outcome.ok = data.outcome.violations.empty();
  } catch (...) {
    data.failure = std::current_exception();
    data.outcome.ok = false;
  }
  return data;
}

}  // namespace

ExperimentOutcome run_experiment_text(const std::string& config_text, const CliOptions& opts) {
  ExperimentOutcome outcome;
  json config;
  try {
    config = parse_config(config_text);
  } catch (const ParseError& e) {
    outcome.exit_code = 2;
    outcome.error = "parse error at line " + std::to_string(e.line) + ", column " +
                    std::to_string(e.column) + ": " + e.what();
    return outcome;
  }

  try {
    const json defaults = config.value("defaults", json::object());
    const unsigned long seed = config.value("seed", 0UL);
    const std::string experiment_name = config.value("name", std::string("experiment"));

    std::string out_dir = !opts.out_dir.empty() ? opts.out_dir
                          : config.contains("output_dir")
                              ? config.at("output_dir").get<std::string>()
                              : (std::getenv("IGFLOW_OUT") ? std::getenv("IGFLOW_OUT") : ".");

    int workers = opts.workers > 0 ? opts.workers : config.value("workers", 1);
    workers = std::max(1, workers);

    std::vector<RunPlan> plans;
    std::vector<std::string> seen_names;
    for (const auto& run : config.value("runs", json::array())) {
      RunPlan plan;
      plan.name = run.value("name", "run" + std::to_string(plans.size()));
      for (const auto& n : seen_names) {
        if (n == plan.name) throw ConfigError("duplicate run name '" + plan.name + "'");
      }
      seen_names.push_back(plan.name);
      plan.seed = seed + plans.size();

      plan.problem = make_problem(run.at("problem"));

      const json dj = merged_section(defaults, run, "dynamics");
      plan.dcfg.kind = dynamics::kind_from_string(dj.at("kind").get<std::string>());
      plan.dcfg.alpha = dj.value("alpha", 3.0);
      plan.dcfg.beta = dj.value("beta", 0.0);
      plan.dcfg.mu = dj.value("mu", 0.0);
      plan.dcfg.lambda = dj.value("lambda", 0.0);
      plan.dcfg.t0 = dj.value("t0", 1.0);
      plan.dcfg.u0 = to_vec(dj.at("u0"));
      plan.dcfg.du0 = dj.contains("du0") ? to_vec(dj.at("du0")) : Vec(Vec::Zero(plan.dcfg.u0.size()));
      plan.dcfg.ddu0 =
          dj.contains("ddu0") ? to_vec(dj.at("ddu0")) : Vec(Vec::Zero(plan.dcfg.u0.size()));

      const json ij = merged_section(defaults, run, "integrator");
      plan.icfg.rel_tol = ij.value("rel_tol", 1e-9) * opts.tol_scale;
      plan.icfg.abs_tol = ij.value("abs_tol", 1e-12) * opts.tol_scale;
      plan.icfg.h_init = ij.value("h_init", 1e-3);
      plan.icfg.h_max = ij.value("h_max", 0.0);
      plan.icfg.t_end = ij.at("t_end").get<double>();
      plan.icfg.max_steps = ij.value("max_steps", 1000000L);
      plan.icfg.sample_grid = make_grid(ij.value("grid", json::object()), plan.dcfg.t0,
                                        plan.icfg.t_end);

      const json gj = merged_section(defaults, run, "diagnostics");
      plan.want_energy = gj.value("energy", false);
      plan.energy_tol = gj.value("energy_tol", 1e-7);
      if (gj.contains("rate")) {
        const json& rj = gj.at("rate");
        plan.want_rate = true;
        plan.rate_series = rj.value("series", "gap_v");
        plan.rate_lo = rj.at("window").at(0).get<double>();
        plan.rate_hi = rj.at("window").at(1).get<double>();
        plan.rate_power = rj.value("power", 3.0);
        plan.rate_max_slope = rj.value("max_slope", -3.0 + 0.15);
      }
      if (gj.contains("checks")) {
        const json& cj = gj.at("checks");
        plan.want_gradient = cj.value("gradient", false);
        plan.gradient_points = cj.value("gradient_points", 100);
        plan.gradient_tol = cj.value("gradient_tol", 1e-6);
        plan.want_residual = cj.value("residual", false);
        plan.residual_tol = cj.value("residual_tol", 1e-6);
      }

      // TOGES_VR integrates the raw prox-bearing objective; diagnostics see
      // the envelope (same infimum and argmin).
      if (plan.dcfg.kind == SystemKind::TOGES_VR) {
        if (!plan.problem.has_prox()) {
          throw CapabilityError("run '" + plan.name + "': TOGES_VR needs a prox oracle");
        }
        plan.diag_problem =
            moreau::regularize(*plan.problem.prox, plan.dcfg.lambda, plan.problem.inf_value,
                               plan.problem.minimizer_projection, plan.problem.dim);
      } else {
        plan.diag_problem = plan.problem;
      }
      plans.push_back(std::move(plan));
    }

    if (plans.empty()) return outcome;  // exit 0, no files

    std::vector<RunData> results(plans.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= plans.size()) return;
        results[i] = execute_run(plans[i]);
      }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(workers, plans.size());
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Hard failures first: they decide the exit code before artifacts.
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!results[i].failure) continue;
      try {
        std::rethrow_exception(results[i].failure);
      } catch (const CapabilityError& e) {
        outcome.exit_code = 3;
        outcome.error = "run '" + plans[i].name + "': " + e.what();
      } catch (const ConfigError& e) {
        outcome.exit_code = 3;
        outcome.error = "run '" + plans[i].name + "': " + e.what();
      } catch (const std::exception& e) {
        results[i].outcome.violations.push_back(std::string("run failed: ") + e.what());
      }
      if (outcome.exit_code == 3) {
        for (auto& r : results) outcome.runs.push_back(r.outcome);
        return outcome;
      }
    }

    fs::create_directories(out_dir);
    std::vector<report::PlotSeries> plot_series;
    const json pj = config.value("plot", json::object());
    const std::string plot_column = pj.value("series", "gap_u");
    const report::PlotMode plot_mode =
        pj.value("mode", "loglog") == std::string("semilog") ? report::PlotMode::SemiLogY
                                                             : report::PlotMode::LogLog;

    std::vector<std::string> csv_names;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const auto& data = results[i];
      if (data.failure) continue;
      const std::string csv_path = (fs::path(out_dir) / (plans[i].name + ".csv")).string();
      report::write_csv(csv_path, data.csv);
      outcome.artifacts.push_back(csv_path);
      const std::string rates_path =
          (fs::path(out_dir) / (plans[i].name + ".rates.txt")).string();
      std::ofstream(rates_path, std::ios::binary) << data.rates_text;
      outcome.artifacts.push_back(rates_path);
      csv_names.push_back(plans[i].name);

      report::PlotSeries series;
      series.name = plans[i].name;
      for (std::size_t c = 0; c < data.csv.header.size(); ++c) {
        if (data.csv.header[c] != plot_column) continue;
        for (const auto& row : data.csv.rows) series.points.emplace_back(row[0], row[c]);
      }
      if (!series.points.empty()) plot_series.push_back(std::move(series));
    }

    if (!plot_series.empty()) {
      const std::string svg_path =
          (fs::path(out_dir) / (experiment_name + ".svg")).string();
      report::write_svg(svg_path, experiment_name + " (" + plot_column + ")", plot_mode,
                        plot_series);
      outcome.artifacts.push_back(svg_path);
      const std::string gp_path = (fs::path(out_dir) / (experiment_name + ".gp")).string();
      report::write_gnuplot(gp_path, experiment_name, plot_mode, csv_names, plot_column);
      outcome.artifacts.push_back(gp_path);
    }

    for (auto& r : results) {
      outcome.runs.push_back(r.outcome);
      if (!r.outcome.violations.empty()) outcome.exit_code = 1;
    }
  } catch (const CapabilityError& e) {
    outcome.exit_code = 3;
    outcome.error = e.what();
  } catch (const ConfigError& e) {
    outcome.exit_code = 3;
    outcome.error = e.what();
  } catch (const json::exception& e) {
    outcome.exit_code = 3;
    outcome.error = std::string("config schema error: ") + e.what();
  }
  return outcome;
}

ExperimentOutcome run_experiment(const std::string& config_path_or_preset,
                                 const CliOptions& opts) {
  for (const auto& name : preset_names()) {
    if (name == config_path_or_preset) {
      return run_experiment_text(preset_text(name), opts);
    }
  }
  std::ifstream in(config_path_or_preset);
  if (!in) {
    ExperimentOutcome outcome;
    outcome.exit_code = 2;
    outcome.error = "cannot open config '" + config_path_or_preset + "'";
    return outcome;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return run_experiment_text(buf.str(), opts);
}

std::string report_rates(const std::vector<std::string>& csv_paths, double power,
                         double window_lo, double window_hi, double max_slope) {
  std::ostringstream out;
  for (const auto& path : csv_paths) {
    const auto table = report::read_csv(path);
    const std::string stem = fs::path(path).stem().string();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c].rfind("gap", 0) != 0) continue;
      diagnostics::GapSeries series;
      for (const auto& row : table.rows) series.points.emplace_back(row[0], row[c]);
      out << stem << ":" << table.header[c] << " ";
      try {
        const auto est = diagnostics::fit_rate(series, window_lo, window_hi, power);
        out << "slope=" << report::format_double(est.slope) << " sup(t^"
            << report::format_double(power)
            << "*gap)=" << report::format_double(est.sup_scaled) << " verdict="
            << (est.slope <= max_slope ? "pass" : "fail") << "\n";
      } catch (const InsufficientDataError& e) {
        out << "verdict=insufficient-data (" << e.what() << ")\n";
      }
    }
  }
  return out.str();
}

}  // namespace igflow::cli
