#include "igflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "igflow/moreau.hpp"

namespace igflow::diagnostics {

namespace {

constexpr double kGapClampFloor = -1e-12;
constexpr double kFitFloor = 1e-14;

Vec selector_point(const integrator::Trajectory& traj,
                   const problems::ObjectiveSpec& problem, GapSelector selector,
                   const dynamics::PhaseState& state) {
  switch (selector) {
    case GapSelector::AT_U:
      return state.u;
    case GapSelector::AT_V:
      if (state.ddu.size() == 0) {
        throw CapabilityError("AT_V needs a third-order trajectory");
      }
      return dynamics::aux_point_v(state);
    case GapSelector::AT_Y:
      if (state.ddu.size() == 0) {
        throw CapabilityError("AT_Y needs a third-order trajectory");
      }
      if (!(traj.cfg.mu > 0)) throw CapabilityError("AT_Y needs cfg.mu > 0");
      return dynamics::aux_point_y(state, traj.cfg.mu);
    case GapSelector::AT_PROX_U:
    case GapSelector::AT_PROX_V: {
      if (!problem.has_prox()) {
        throw CapabilityError("prox selectors need a prox oracle on the objective");
      }
      if (!(traj.cfg.lambda > 0)) throw CapabilityError("prox selectors need cfg.lambda > 0");
      const Vec base = selector == GapSelector::AT_PROX_U ? state.u
                                                          : dynamics::aux_point_v(state);
      return problem.prox->prox(traj.cfg.lambda, base);
    }
  }
  throw ConfigError("unreachable selector");
}

double selector_value(const problems::ObjectiveSpec& problem, GapSelector selector,
                      const Vec& point) {
  // Prox selectors report the raw function at the prox point; the others use
  // the objective as given.
  if (selector == GapSelector::AT_PROX_U || selector == GapSelector::AT_PROX_V) {
    return problem.prox->raw_value(point);
  }
  return problem.eval(point);
}

}  // namespace

std::string to_string(GapSelector selector) {
  switch (selector) {
    case GapSelector::AT_U: return "AT_U";
    case GapSelector::AT_V: return "AT_V";
    case GapSelector::AT_Y: return "AT_Y";
    case GapSelector::AT_PROX_U: return "AT_PROX_U";
    case GapSelector::AT_PROX_V: return "AT_PROX_V";
  }
  throw ConfigError("unreachable selector");
}

GapSelector selector_from_string(const std::string& name) {
  if (name == "AT_U") return GapSelector::AT_U;
  if (name == "AT_V") return GapSelector::AT_V;
  if (name == "AT_Y") return GapSelector::AT_Y;
  if (name == "AT_PROX_U") return GapSelector::AT_PROX_U;
  if (name == "AT_PROX_V") return GapSelector::AT_PROX_V;
  throw ConfigError("unknown gap selector '" + name + "'");
}

GapSeries gap_series(const integrator::Trajectory& traj,
                     const problems::ObjectiveSpec& problem, GapSelector selector) {
  GapSeries out;
  out.selector = selector;
  out.points.reserve(traj.samples.size());
  for (const auto& sample : traj.samples) {
    const Vec point = selector_point(traj, problem, selector, sample.state);
    double gap = selector_value(problem, selector, point) - problem.inf_value;
    if (gap < 0) {
      if (gap < kGapClampFloor) {
        throw OracleInconsistencyError("gap below -1e-12; inf_value is inconsistent");
      }
      gap = 0.0;
      ++out.clamped;
    }
    out.points.emplace_back(sample.state.t, gap);
  }
  return out;
}

double lyap_delta(double t, double beta) { return t * t * (1.0 - 2.0 * beta / t); }

double t1_threshold(double alpha, double beta) {
  if (beta == 0.0 || alpha <= 3.0) return 0.0;
  return 2.0 * beta * (alpha - 2.0) / (alpha - 3.0);
}

double lyapunov_E(const dynamics::PhaseState& state, const problems::ObjectiveSpec& problem,
                  const dynamics::DynamicsConfig& cfg, const Vec& z) {
  if (cfg.kind != dynamics::SystemKind::TOGES_V &&
      cfg.kind != dynamics::SystemKind::TOGES_VH) {
    throw ConfigError("lyapunov_E applies to TOGES_V / TOGES_VH");
  }
  if (state.ddu.size() == 0) throw ConfigError("lyapunov_E needs a third-order state");

  const double t = state.t;
  const double beta = cfg.kind == dynamics::SystemKind::TOGES_VH ? cfg.beta : 0.0;
  const Vec v = dynamics::aux_point_v(state);
  const Vec vdot = 1.25 * state.du + 0.25 * t * state.ddu;
  const Vec grad_v = beta != 0.0 ? problem.eval_grad(v) : Vec(Vec::Zero(v.size()));

  const double gap_v = problem.eval(v) - problem.inf_value;
  const double delta = lyap_delta(t, beta);

  const Vec w_direct =
      t * t * (state.ddu + beta * grad_v) + (cfg.alpha + 5.0) * t * state.du +
      4.0 * cfg.alpha * (state.u - z);
  const Vec w_cond =
      4.0 * t * vdot + t * t * beta * grad_v + 4.0 * cfg.alpha * (v - z);

  const double direct = 4.0 * t * delta * gap_v + 0.5 * w_direct.squaredNorm();
  const double cond = 4.0 * t * delta * gap_v + 0.5 * w_cond.squaredNorm();
  const double scale = std::max({1.0, std::abs(direct), std::abs(cond)});
  if (std::abs(direct - cond) > 1e-10 * scale) {
    throw OracleInconsistencyError("the two algebraic forms of E disagree beyond 1e-10");
  }
  return direct;
}

double lyapunov_sc(const dynamics::PhaseState& state, const problems::ObjectiveSpec& problem,
                   double mu) {
  if (!(mu > 0)) throw ConfigError("lyapunov_sc requires mu > 0");
  if (!problem.strong_convexity_mu) {
    throw ConfigError("lyapunov_sc requires a strongly convex objective (unique minimizer)");
  }
  if (state.ddu.size() == 0) throw ConfigError("lyapunov_sc needs a third-order state");
  const double s = std::sqrt(mu);
  const Vec y = dynamics::aux_point_y(state, mu);
  const Vec ydot = state.du + state.ddu / s;
  const Vec xstar = problem.minimizer_projection(state.u);
  const double gap_y = problem.eval(y) - problem.inf_value;
  return gap_y + 0.5 * (s * (y - xstar) + ydot).squaredNorm();
}

RateEstimate fit_rate(const GapSeries& series, double window_lo, double window_hi,
                      double power) {
  if (!(window_lo > 0) || !(window_hi > window_lo)) {
    throw ConfigError("rate window must satisfy 0 < lo < hi");
  }
  RateEstimate est;
  est.window_lo = window_lo;
  est.window_hi = window_hi;

  std::vector<std::pair<double, double>> usable;  // (log t, log gap)
  for (const auto& [t, gap] : series.points) {
    if (t < window_lo || t > window_hi) continue;
    est.sup_scaled = std::max(est.sup_scaled, std::pow(t, power) * gap);
    if (gap <= kFitFloor) continue;  // rounding floor, excluded from the fit
    usable.emplace_back(std::log(t), std::log(gap));
  }
  if (usable.size() < 10) {
    throw InsufficientDataError("fit_rate needs >= 10 points above the rounding floor, got " +
                                std::to_string(usable.size()));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : usable) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(usable.size());
  const double denom = n * sxx - sx * sx;
  est.slope = (n * sxy - sx * sy) / denom;
  est.intercept = (sy - est.slope * sx) / n;

  double rss = 0;
  for (const auto& [x, y] : usable) {
    const double r = y - (est.slope * x + est.intercept);
    rss += r * r;
  }
  est.residual = std::sqrt(rss / n);
  return est;
}

std::vector<MonotoneViolation> check_monotone(
    const std::vector<std::pair<double, double>>& series, double from_t, double tol) {
  std::vector<MonotoneViolation> violations;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto& [t_prev, v_prev] = series[i - 1];
    const auto& [t_cur, v_cur] = series[i];
    if (t_prev < from_t) continue;
    const double allowed = tol * (1.0 + std::abs(v_prev));
    if (v_cur - v_prev > allowed) {
      violations.push_back({t_cur, v_cur - v_prev - allowed});
    }
  }
  return violations;
}

double grad_integral(const integrator::Trajectory& traj,
                     const problems::ObjectiveSpec& problem, double from_t) {
  if (traj.cfg.kind != dynamics::SystemKind::TOGES_VH || !(traj.cfg.beta > 0)) {
    throw ConfigError("grad_integral applies to TOGES_VH trajectories with beta > 0");
  }
  auto integrand = [&](const dynamics::PhaseState& state) {
    const double t = state.t;
    return t * t * t * t * problem.eval_grad(dynamics::aux_point_v(state)).squaredNorm();
  };
  double total = 0.0;
  bool have_prev = false;
  double t_prev = 0.0, g_prev = 0.0;
  for (const auto& sample : traj.samples) {
    if (sample.state.t < from_t) continue;
    const double g = integrand(sample.state);
    if (have_prev) total += 0.5 * (g + g_prev) * (sample.state.t - t_prev);
    t_prev = sample.state.t;
    g_prev = g;
    have_prev = true;
  }
  return total;
}

std::vector<std::pair<double, double>> distance_to_argmin_series(
    const integrator::Trajectory& traj, const problems::ObjectiveSpec& problem,
    GapSelector selector) {
  std::vector<std::pair<double, double>> out;
  out.reserve(traj.samples.size());
  for (const auto& sample : traj.samples) {
    const Vec point = selector_point(traj, problem, selector, sample.state);
    out.emplace_back(sample.state.t,
                     (point - problem.minimizer_projection(point)).norm());
  }
  return out;
}

EnergyReport energy_report(const integrator::Trajectory& traj,
                           const problems::ObjectiveSpec& problem, const Vec& z,
                           double tol) {
  EnergyReport report;
  report.threshold_t1 = std::max(t1_threshold(traj.cfg.alpha, traj.cfg.beta), traj.cfg.t0);
  report.values.reserve(traj.samples.size());
  for (const auto& sample : traj.samples) {
    report.values.emplace_back(sample.state.t,
                               lyapunov_E(sample.state, problem, traj.cfg, z));
  }
  report.violations = check_monotone(report.values, report.threshold_t1, tol);
  return report;
}

}  // namespace igflow::diagnostics
