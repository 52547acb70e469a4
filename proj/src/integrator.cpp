#include "igflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace igflow::integrator {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;

// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// 4th-order continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// Step-size controller constants (PI / Lund stabilization).
constexpr double kSafe = 0.9;
constexpr double kBetaStab = 0.04;
constexpr double kExpo1 = 0.2 - kBetaStab * 0.75;
constexpr double kMaxShrink = 5.0;   // h may shrink at most 5x per step
constexpr double kMaxGrow = 10.0;    // and grow at most 10x
constexpr int kMaxDomainRejections = 40;

struct Layout {
  int n = 0;
  int order = 2;
  int size() const { return n * order; }
};

Vec flatten_state(const dynamics::PhaseState& s, const Layout& lay) {
  Vec y(lay.size());
  y.segment(0, lay.n) = s.u;
  y.segment(lay.n, lay.n) = s.du;
  if (lay.order == 3) y.segment(2 * lay.n, lay.n) = s.ddu;
  return y;
}

dynamics::PhaseState unflatten_state(double t, const Vec& y, const Layout& lay) {
  dynamics::PhaseState s;
  s.t = t;
  s.u = y.segment(0, lay.n);
  s.du = y.segment(lay.n, lay.n);
  if (lay.order == 3) s.ddu = y.segment(2 * lay.n, lay.n);
  return s;
}

Vec flatten_deriv(const dynamics::PhaseDerivative& d, const Layout& lay) {
  Vec y(lay.size());
  y.segment(0, lay.n) = d.du;
  y.segment(lay.n, lay.n) = d.ddu;
  if (lay.order == 3) y.segment(2 * lay.n, lay.n) = d.dddu;
  return y;
}

Vec dense_eval(const Trajectory::StepRecord& rec, double t) {
  const double theta = (t - rec.t) / rec.h;
  const double theta1 = 1.0 - theta;
  return rec.r1 + theta * (rec.r2 + theta1 * (rec.r3 + theta * (rec.r4 + theta1 * rec.r5)));
}

}  // namespace

double Trajectory::t_begin() const {
  if (!steps.empty()) return steps.front().t;
  if (!samples.empty()) return samples.front().state.t;
  throw RangeError("empty trajectory");
}

double Trajectory::t_end() const {
  if (!steps.empty()) return steps.back().t + steps.back().h;
  if (!samples.empty()) return samples.back().state.t;
  throw RangeError("empty trajectory");
}

Trajectory integrate(const dynamics::DynamicsConfig& cfg,
                     const problems::ObjectiveSpec& problem, const IntegratorConfig& icfg) {
  cfg.validate(problem);
  if (!(icfg.rel_tol > 0) || !(icfg.abs_tol > 0)) {
    throw ConfigError("integrator tolerances must be > 0");
  }
  if (!(icfg.t_end > cfg.t0)) throw ConfigError("t_end must exceed t0");
  for (std::size_t i = 0; i < icfg.sample_grid.size(); ++i) {
    const double g = icfg.sample_grid[i];
    if (g < cfg.t0 || g > icfg.t_end) throw ConfigError("sample grid leaves [t0, t_end]");
    if (i > 0 && g <= icfg.sample_grid[i - 1]) throw ConfigError("sample grid must increase");
  }

  const Layout lay{problem.dim, dynamics::is_third_order(cfg.kind) ? 3 : 2};
  const double h_max = icfg.h_max > 0 ? icfg.h_max : (icfg.t_end - cfg.t0) / 100.0;

  auto rhs = [&](double t, const Vec& y) {
    return flatten_deriv(dynamics::field(cfg, problem, unflatten_state(t, y, lay)), lay);
  };

  Trajectory traj;
  traj.cfg = cfg;

  double t = cfg.t0;
  Vec y(lay.size());
  {
    dynamics::PhaseState init;
    init.t = cfg.t0;
    init.u = cfg.u0;
    init.du = cfg.du0;
    if (lay.order == 3) init.ddu = cfg.ddu0;
    y = flatten_state(init, lay);
    if (!y.allFinite()) throw ConfigError("initial data must be finite");
    // First sample carries the initial data bitwise.
    traj.samples.push_back({init, dynamics::field(cfg, problem, init)});
  }

  std::size_t grid_cursor = 0;
  while (grid_cursor < icfg.sample_grid.size() && icfg.sample_grid[grid_cursor] <= cfg.t0) {
    ++grid_cursor;  // t0 itself was just emitted
  }

  Vec k1 = rhs(t, y);
  Vec k2(lay.size()), k3(lay.size()), k4(lay.size()), k5(lay.size()), k6(lay.size()),
      k7(lay.size()), y_new(lay.size()), y_err(lay.size());

  double h = std::min({icfg.h_init, h_max, icfg.t_end - t});
  if (!(h > 0)) throw ConfigError("h_init must be > 0");
  double facold = 1e-4;
  bool rejected_last = false;
  int domain_rejections_in_a_row = 0;
  long attempts = 0;

  while (t < icfg.t_end) {
    if (++attempts > icfg.max_steps) {
      throw TruncatedTrajectoryError("max_steps exceeded at t=" + std::to_string(t),
                                     std::move(traj));
    }
    h = std::min(h, h_max);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      if (domain_rejections_in_a_row > 0) {
        throw DomainError("cannot advance within the objective domain at t=" +
                          std::to_string(t));
      }
      throw Error("step size underflow at t=" + std::to_string(t));
    }
    bool last = false;
    if (t + 1.01 * h >= icfg.t_end) {
      h = icfg.t_end - t;
      last = true;
    }

    try {
      k2 = rhs(t + c2 * h, y + h * (a21 * k1));
      k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = rhs(t + h, y_new);
    } catch (const DomainError&) {
      ++traj.step_stats.rejected;
      ++traj.step_stats.domain_rejections;
      if (++domain_rejections_in_a_row >= kMaxDomainRejections) throw;
      h *= 0.5;
      rejected_last = true;
      continue;
    }

    y_err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_sq = 0.0;
    for (int i = 0; i < lay.size(); ++i) {
      const double sk =
          icfg.abs_tol + icfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double q = y_err[i] / sk;
      err_sq += q * q;
    }
    const double err = std::sqrt(err_sq / lay.size());

    const double fac11 = std::pow(err, kExpo1);
    if (err <= 1.0) {
      // Accepted; build the continuous extension before advancing.
      if (!y_new.allFinite()) throw Error("non-finite state at t=" + std::to_string(t + h));
      Trajectory::StepRecord rec;
      rec.t = t;
      rec.h = h;
      rec.r1 = y;
      rec.r2 = y_new - y;
      rec.r3 = h * k1 - rec.r2;
      rec.r4 = rec.r2 - h * k7 - rec.r3;
      rec.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      traj.steps.push_back(rec);

      const double t_new = last ? icfg.t_end : t + h;
      if (icfg.sample_grid.empty()) {
        dynamics::PhaseState s = unflatten_state(t_new, y_new, lay);
        traj.samples.push_back({s, dynamics::field(cfg, problem, s)});
      } else {
        while (grid_cursor < icfg.sample_grid.size() &&
               icfg.sample_grid[grid_cursor] <= t_new) {
          const double tg = icfg.sample_grid[grid_cursor];
          dynamics::PhaseState s = (tg == t_new)
                                       ? unflatten_state(t_new, y_new, lay)
                                       : unflatten_state(tg, dense_eval(rec, tg), lay);
          traj.samples.push_back({s, dynamics::field(cfg, problem, s)});
          ++grid_cursor;
        }
      }

      ++traj.step_stats.accepted;
      domain_rejections_in_a_row = 0;
      facold = std::max(err, 1e-4);
      t = t_new;
      y.swap(y_new);
      k1.swap(k7);  // FSAL

      double fac = fac11 / std::pow(facold, kBetaStab);
      fac = std::max(1.0 / kMaxGrow, std::min(kMaxShrink, fac / kSafe));
      double h_next = h / fac;
      if (rejected_last) h_next = std::min(h_next, h);
      rejected_last = false;
      h = h_next;
    } else {
      ++traj.step_stats.rejected;
      rejected_last = true;
      h = h / std::min(kMaxShrink, fac11 / kSafe);
    }
  }
  return traj;
}

dynamics::PhaseState sample_at(const Trajectory& traj, double t) {
  if (traj.samples.empty() && traj.steps.empty()) throw RangeError("empty trajectory");
  if (t < traj.t_begin() || t > traj.t_end()) {
    throw RangeError("sample time outside the trajectory span");
  }

  // Stored samples are authoritative at their exact times.
  auto it = std::lower_bound(
      traj.samples.begin(), traj.samples.end(), t,
      [](const Sample& s, double value) { return s.state.t < value; });
  if (it != traj.samples.end() && it->state.t == t) return it->state;

  auto step_it = std::upper_bound(
      traj.steps.begin(), traj.steps.end(), t,
      [](double value, const Trajectory::StepRecord& rec) { return value < rec.t; });
  if (step_it == traj.steps.begin()) throw RangeError("sample time precedes the mesh");
  --step_it;

  const Layout lay{static_cast<int>(traj.cfg.u0.size()),
                   dynamics::is_third_order(traj.cfg.kind) ? 3 : 2};
  return unflatten_state(t, dense_eval(*step_it, t), lay);
}

}  // namespace igflow::integrator
