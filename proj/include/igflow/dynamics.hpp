#pragma once

#include <Eigen/Core>
#include <string>

#include "igflow/problems.hpp"

namespace igflow::integrator {
struct Trajectory;
}

namespace igflow::dynamics {

// Evolution systems on an extended phase space. Third-order kinds are reduced
// to first order on R^{3n} with state (u, u', u''); second-order kinds live
// on R^{2n}.
enum class SystemKind {
  AVD,         // x'' + (alpha/t) x' + grad f(x) = 0
  RESCALED,    // v'' + ((alpha+1)/t) v' + t grad f(v) = 0
  TOGES,       // u''' + ((3a+5)/2t) u'' + ((3a-1)/t^2) u' + grad f(u + t u') = 0
  TOGES_V,     // u''' + ((a+7)/t) u'' + (5(a+1)/t^2) u' + grad f(u + t/4 u') = 0
  TOGES_VH,    // TOGES_V plus beta * hess f(v)(5/4 u' + t/4 u''), v = u + t/4 u'
  SC3,         // u''' + 3 sqrt(mu) u'' + 2 mu u' + sqrt(mu) grad f(u + u'/sqrt(mu)) = 0
  TOGES_VR,    // TOGES_V with grad f replaced by the Moreau envelope gradient
  HEAVY_BALL,  // x'' + 2 sqrt(mu) x' + grad f(x) = 0 (comparison only)
};

bool is_third_order(SystemKind kind);
std::string to_string(SystemKind kind);
SystemKind kind_from_string(const std::string& name);

struct DynamicsConfig {
  SystemKind kind = SystemKind::TOGES_V;
  double alpha = 3.0;   // viscous damping parameter
  double beta = 0.0;    // Hessian damping coefficient (TOGES_VH)
  double mu = 0.0;      // strong-convexity modulus (SC3, HEAVY_BALL)
  double lambda = 0.0;  // Moreau index (TOGES_VR)
  double t0 = 1.0;      // origin of time; must be > 0 (alpha/t is singular at 0)
  Vec u0, du0, ddu0;    // ddu0 is ignored for second-order kinds

  // Kind-specific parameter presence and objective capabilities.
  void validate(const problems::ObjectiveSpec& problem) const;
};

struct PhaseState {
  double t = 0.0;
  Vec u, du, ddu;  // ddu has zero length for second-order kinds
};

// (u', u'', u''') of the state; dddu has zero length for second-order kinds.
struct PhaseDerivative {
  Vec du, ddu, dddu;
};

// The highest derivative solved from the system's defining equation.
PhaseDerivative field(const DynamicsConfig& cfg, const problems::ObjectiveSpec& problem,
                      const PhaseState& state);

// v(t) = u(t) + (t/4) u'(t), the point where the TOGES_V gap estimates live.
Vec aux_point_v(const PhaseState& state);

// y(t) = u(t) + u'(t)/sqrt(mu) for the strongly convex system.
Vec aux_point_y(const PhaseState& state, double mu);

// Residual of the reduced second-order equation at the auxiliary point:
// for TOGES_V, |v'' + ((alpha+1)/t) v' + (t/4) grad f(v)| with v', v''
// formed from the recorded state and the field; for SC3,
// |y'' + 2 sqrt(mu) y' + grad f(y)|. Zero (to rounding) by construction
// whenever u''' comes from the field.
double residual_reduction(const DynamicsConfig& cfg, const problems::ObjectiveSpec& problem,
                          const PhaseState& state);

// Max over the rescaled trajectory's sample times s of |x(s^{3/2}) - v(s)|,
// where x is the AVD trajectory and v the RESCALED one. The caller matches
// parameters (rescaled alpha = (3 alpha_avd - 3)/2), objectives (the rescaled
// system runs on 9/4 times the AVD objective) and initial data at
// s0 = t0^{2/3}.
double rescale_equivalence(const integrator::Trajectory& avd_traj,
                           const integrator::Trajectory& rescaled_traj);

}  // namespace igflow::dynamics
