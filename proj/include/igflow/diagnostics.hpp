#pragma once

#include <utility>
#include <vector>

#include "igflow/integrator.hpp"

namespace igflow::diagnostics {

// Which point the gap f(.) - inf f is evaluated at.
enum class GapSelector { AT_U, AT_V, AT_Y, AT_PROX_U, AT_PROX_V };

std::string to_string(GapSelector selector);
GapSelector selector_from_string(const std::string& name);

struct GapSeries {
  std::vector<std::pair<double, double>> points;  // (t, gap)
  GapSelector selector = GapSelector::AT_U;
  int clamped = 0;  // tiny negative gaps (rounding) clamped to zero
};

struct RateEstimate {
  double slope = 0.0;      // least-squares slope on (log t, log gap)
  double intercept = 0.0;  // natural-log intercept
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;   // rms of the log-log fit residuals
  double sup_scaled = 0.0; // sup over the window of t^p * gap
};

struct MonotoneViolation {
  double t = 0.0;         // later time of the offending adjacent pair
  double increase = 0.0;  // amount beyond tolerance-scaled allowance
};

struct EnergyReport {
  std::vector<std::pair<double, double>> values;  // (t, E)
  double threshold_t1 = 0.0;
  std::vector<MonotoneViolation> violations;      // increases past t1
};

// Sampled f(point(t)) - inf f along a trajectory. AT_V/AT_Y need third-order
// state (AT_Y also needs cfg.mu > 0); AT_PROX_* need a prox oracle and
// cfg.lambda > 0, and evaluate the raw function at the prox point.
GapSeries gap_series(const integrator::Trajectory& traj,
                     const problems::ObjectiveSpec& problem, GapSelector selector);

// delta(t) = t^2 (1 - 2 beta / t), the weight in front of the gap term of E.
double lyap_delta(double t, double beta);

// First time from which E is guaranteed nonincreasing: 2 beta (alpha-2)/(alpha-3)
// for alpha > 3; zero when beta = 0 or alpha <= 3 (limiting case).
double t1_threshold(double alpha, double beta);

// Lyapunov energy of the Hessian-damped third-order system,
//   E(t) = 4 t delta(t) (f(v) - inf f) + |w(t)|^2 / 2,
// evaluated both from (u, u', u'') directly and from (v, v'); the two forms
// must agree to 1e-10 relative or OracleInconsistencyError is raised.
// z is a fixed point of argmin f.
double lyapunov_E(const dynamics::PhaseState& state, const problems::ObjectiveSpec& problem,
                  const dynamics::DynamicsConfig& cfg, const Vec& z);

// Lyapunov energy of the strongly convex system,
//   (f(y) - inf f) + |sqrt(mu)(y - x*) + y'|^2 / 2  with y = u + u'/sqrt(mu).
// Requires a unique minimizer (strong convexity declared on the objective).
double lyapunov_sc(const dynamics::PhaseState& state, const problems::ObjectiveSpec& problem,
                   double mu);

// Least-squares power-law fit on the window; points with gap <= 1e-14 are
// excluded from the fit (rounding floor). Fewer than 10 usable points raise
// InsufficientDataError. sup_scaled uses the given power.
RateEstimate fit_rate(const GapSeries& series, double window_lo, double window_hi,
                      double power = 3.0);

// Adjacent-pair increases beyond tol * (1 + |value|) at times past from_t.
std::vector<MonotoneViolation> check_monotone(
    const std::vector<std::pair<double, double>>& series, double from_t, double tol);

// Trapezoid quadrature of t^4 |grad f(v(t))|^2 over samples in [from_t, end].
// Requires a TOGES_VH trajectory with beta > 0.
double grad_integral(const integrator::Trajectory& traj,
                     const problems::ObjectiveSpec& problem, double from_t);

// |point(t) - projection onto argmin| per sample.
std::vector<std::pair<double, double>> distance_to_argmin_series(
    const integrator::Trajectory& traj, const problems::ObjectiveSpec& problem,
    GapSelector selector);

// E along the whole trajectory plus its decrease violations past t1.
EnergyReport energy_report(const integrator::Trajectory& traj,
                           const problems::ObjectiveSpec& problem, const Vec& z,
                           double tol = 1e-7);

}  // namespace igflow::diagnostics
