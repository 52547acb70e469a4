#pragma once

#include <vector>

#include "igflow/dynamics.hpp"

namespace igflow::integrator {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double h_init = 1e-3;
  double h_max = 0.0;  // <= 0 selects (t_end - t0)/100
  double t_end = 0.0;
  std::vector<double> sample_grid;  // monotone, within [t0, t_end]; empty = accepted steps
  long max_steps = 1'000'000;
};

enum class DenseKind { Rk45Continuous, Hermite };

struct Sample {
  dynamics::PhaseState state;
  dynamics::PhaseDerivative deriv;  // field evaluated at state
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long domain_rejections = 0;
};

// A recorded solution path. Immutable once returned; safe to share across
// threads for diagnostics.
struct Trajectory {
  dynamics::DynamicsConfig cfg;
  std::vector<Sample> samples;
  StepStats step_stats;
  DenseKind dense_kind = DenseKind::Rk45Continuous;

  // Continuous-extension coefficients of each accepted step, kept so that
  // sample_at can interpolate anywhere in the span.
  struct StepRecord {
    double t = 0.0;
    double h = 0.0;
    Vec r1, r2, r3, r4, r5;
  };
  std::vector<StepRecord> steps;

  double t_begin() const;
  double t_end() const;
};

// Raised when max_steps is exhausted; carries whatever was integrated.
class TruncatedTrajectoryError : public Error {
 public:
  TruncatedTrajectoryError(const std::string& what, Trajectory partial_traj)
      : Error(what), partial(std::move(partial_traj)) {}
  Trajectory partial;
};

// Dormand-Prince 5(4) with PI step-size control and the pair's 4th-order
// continuous extension. Local error per step is held to
// rel_tol * |state| + abs_tol. Objective domain errors reject the step with
// a halved size; 40 consecutive domain rejections are fatal.
Trajectory integrate(const dynamics::DynamicsConfig& cfg,
                     const problems::ObjectiveSpec& problem, const IntegratorConfig& icfg);

// Dense-output interpolation; exact at stored sample times.
dynamics::PhaseState sample_at(const Trajectory& traj, double t);

}  // namespace igflow::integrator
