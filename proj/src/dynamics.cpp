#include "igflow/dynamics.hpp"

#include <cmath>

#include "igflow/integrator.hpp"
#include "igflow/moreau.hpp"

namespace igflow::dynamics {

bool is_third_order(SystemKind kind) {
  switch (kind) {
    case SystemKind::TOGES:
    case SystemKind::TOGES_V:
    case SystemKind::TOGES_VH:
    case SystemKind::SC3:
    case SystemKind::TOGES_VR:
      return true;
    case SystemKind::AVD:
    case SystemKind::RESCALED:
    case SystemKind::HEAVY_BALL:
      return false;
  }
  throw ConfigError("unreachable system kind");
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::AVD: return "AVD";
    case SystemKind::RESCALED: return "RESCALED";
    case SystemKind::TOGES: return "TOGES";
    case SystemKind::TOGES_V: return "TOGES_V";
    case SystemKind::TOGES_VH: return "TOGES_VH";
    case SystemKind::SC3: return "SC3";
    case SystemKind::TOGES_VR: return "TOGES_VR";
    case SystemKind::HEAVY_BALL: return "HEAVY_BALL";
  }
  throw ConfigError("unreachable system kind");
}

SystemKind kind_from_string(const std::string& name) {
  if (name == "AVD") return SystemKind::AVD;
  if (name == "RESCALED") return SystemKind::RESCALED;
  if (name == "TOGES") return SystemKind::TOGES;
  if (name == "TOGES_V") return SystemKind::TOGES_V;
  if (name == "TOGES_VH") return SystemKind::TOGES_VH;
  if (name == "SC3") return SystemKind::SC3;
  if (name == "TOGES_VR") return SystemKind::TOGES_VR;
  if (name == "HEAVY_BALL") return SystemKind::HEAVY_BALL;
  throw ConfigError("unknown system kind '" + name + "'");
}

void DynamicsConfig::validate(const problems::ObjectiveSpec& problem) const {
  if (!(t0 > 0)) throw ConfigError("t0 must be > 0");
  if (u0.size() == 0 || u0.size() != problem.dim) {
    throw ConfigError("u0 dimension does not match the objective");
  }
  if (du0.size() != u0.size()) throw ConfigError("du0 dimension does not match u0");
  if (is_third_order(kind) && ddu0.size() != u0.size()) {
    throw ConfigError("ddu0 dimension does not match u0");
  }

  switch (kind) {
    case SystemKind::SC3:
    case SystemKind::HEAVY_BALL:
      if (!(mu > 0)) throw ConfigError(to_string(kind) + " requires mu > 0");
      break;
    case SystemKind::TOGES_VH:
      if (beta < 0) throw ConfigError("TOGES_VH requires beta >= 0");
      if (beta > 0 && !problem.has_hvp()) {
        throw CapabilityError("TOGES_VH with beta > 0 requires a Hessian-vector oracle");
      }
      break;
    case SystemKind::TOGES_VR:
      if (!(lambda > 0)) throw ConfigError("TOGES_VR requires lambda > 0");
      if (!problem.has_prox()) {
        throw CapabilityError("TOGES_VR requires a prox oracle on the objective");
      }
      break;
    default:
      break;
  }
  if (kind != SystemKind::TOGES_VR && !problem.has_grad()) {
    throw CapabilityError(to_string(kind) + " requires a gradient oracle");
  }
}

PhaseDerivative field(const DynamicsConfig& cfg, const problems::ObjectiveSpec& problem,
                      const PhaseState& state) {
  const double t = state.t;
  const double a = cfg.alpha;
  PhaseDerivative d;

  switch (cfg.kind) {
    case SystemKind::AVD: {
      d.du = state.du;
      d.ddu = -(a / t) * state.du - problem.eval_grad(state.u);
      return d;
    }
    case SystemKind::RESCALED: {
      d.du = state.du;
      d.ddu = -((a + 1.0) / t) * state.du - t * problem.eval_grad(state.u);
      return d;
    }
    case SystemKind::HEAVY_BALL: {
      const double s = std::sqrt(cfg.mu);
      d.du = state.du;
      d.ddu = -2.0 * s * state.du - problem.eval_grad(state.u);
      return d;
    }
    case SystemKind::TOGES: {
      d.du = state.du;
      d.ddu = state.ddu;
      d.dddu = -((3.0 * a + 5.0) / (2.0 * t)) * state.ddu -
               ((3.0 * a - 1.0) / (t * t)) * state.du -
               problem.eval_grad(state.u + t * state.du);
      return d;
    }
    case SystemKind::TOGES_V: {
      d.du = state.du;
      d.ddu = state.ddu;
      d.dddu = -((a + 7.0) / t) * state.ddu - (5.0 * (a + 1.0) / (t * t)) * state.du -
               problem.eval_grad(aux_point_v(state));
      return d;
    }
    case SystemKind::TOGES_VH: {
      const Vec v = aux_point_v(state);
      d.du = state.du;
      d.ddu = state.ddu;
      d.dddu = -((a + 7.0) / t) * state.ddu - (5.0 * (a + 1.0) / (t * t)) * state.du -
               problem.eval_grad(v);
      if (cfg.beta != 0.0) {
        if (!problem.has_hvp()) {
          throw CapabilityError("TOGES_VH with beta > 0 requires a Hessian-vector oracle");
        }
        // The Hessian term applies to v'(t) = 5/4 u' + t/4 u'', the time
        // derivative of grad f(v(t)).
        const Vec vdot = 1.25 * state.du + 0.25 * t * state.ddu;
        d.dddu -= cfg.beta * problem.hvp(v, vdot);
      }
      return d;
    }
    case SystemKind::SC3: {
      const double s = std::sqrt(cfg.mu);
      d.du = state.du;
      d.ddu = state.ddu;
      d.dddu = -3.0 * s * state.ddu - 2.0 * cfg.mu * state.du -
               s * problem.eval_grad(aux_point_y(state, cfg.mu));
      return d;
    }
    case SystemKind::TOGES_VR: {
      if (!problem.has_prox()) {
        throw CapabilityError("TOGES_VR requires a prox oracle on the objective");
      }
      const Vec v = aux_point_v(state);
      d.du = state.du;
      d.ddu = state.ddu;
      d.dddu = -((a + 7.0) / t) * state.ddu - (5.0 * (a + 1.0) / (t * t)) * state.du -
               moreau::moreau_grad(*problem.prox, cfg.lambda, v);
      return d;
    }
  }
  throw ConfigError("unreachable system kind");
}

Vec aux_point_v(const PhaseState& state) {
  return state.u + 0.25 * state.t * state.du;
}

Vec aux_point_y(const PhaseState& state, double mu) {
  if (!(mu > 0)) throw ConfigError("aux_point_y requires mu > 0");
  return state.u + state.du / std::sqrt(mu);
}

double residual_reduction(const DynamicsConfig& cfg, const problems::ObjectiveSpec& problem,
                          const PhaseState& state) {
  const PhaseDerivative d = field(cfg, problem, state);
  const double t = state.t;

  if (cfg.kind == SystemKind::TOGES_V) {
    const Vec v = aux_point_v(state);
    const Vec vdot = 1.25 * state.du + 0.25 * t * state.ddu;
    const Vec vddot = 1.5 * state.ddu + 0.25 * t * d.dddu;
    // The quarter on the gradient reflects replacing 4f by f in the
    // third-order form.
    const Vec res = vddot + ((cfg.alpha + 1.0) / t) * vdot + 0.25 * t * problem.eval_grad(v);
    return res.norm();
  }
  if (cfg.kind == SystemKind::SC3) {
    const double s = std::sqrt(cfg.mu);
    const Vec y = aux_point_y(state, cfg.mu);
    const Vec ydot = state.du + state.ddu / s;
    const Vec yddot = state.ddu + d.dddu / s;
    const Vec res = yddot + 2.0 * s * ydot + problem.eval_grad(y);
    return res.norm();
  }
  throw ConfigError("residual_reduction applies to TOGES_V and SC3 only");
}

double rescale_equivalence(const integrator::Trajectory& avd_traj,
                           const integrator::Trajectory& rescaled_traj) {
  if (is_third_order(avd_traj.cfg.kind) || is_third_order(rescaled_traj.cfg.kind)) {
    throw ConfigError("rescale_equivalence compares two second-order trajectories");
  }
  double worst = 0.0;
  for (const auto& sample : rescaled_traj.samples) {
    const double s = sample.state.t;
    const PhaseState x = integrator::sample_at(avd_traj, std::pow(s, 1.5));
    worst = std::max(worst, (x.u - sample.state.u).norm());
  }
  return worst;
}

}  // namespace igflow::dynamics
