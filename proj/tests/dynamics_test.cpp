#include <doctest.h>

#include <cmath>
#include <random>

#include "igflow/dynamics.hpp"
#include "igflow/integrator.hpp"
#include "igflow/moreau.hpp"
#include "test_util.hpp"

using namespace igflow;
using dynamics::SystemKind;
using test::vec2;

namespace {

dynamics::PhaseState state_of(double t, const Vec& u, const Vec& du, const Vec& ddu) {
  dynamics::PhaseState s;
  s.t = t;
  s.u = u;
  s.du = du;
  s.ddu = ddu;
  return s;
}

// Residual of each system's defining equation after substituting the field
// output back in; independent restatement of the equations.
double defining_equation_residual(const dynamics::DynamicsConfig& cfg,
                                  const problems::ObjectiveSpec& f,
                                  const dynamics::PhaseState& s) {
  const auto d = dynamics::field(cfg, f, s);
  const double t = s.t;
  const double a = cfg.alpha;
  switch (cfg.kind) {
    case SystemKind::AVD:
      return (d.ddu + (a / t) * s.du + f.grad(s.u)).norm();
    case SystemKind::RESCALED:
      return (d.ddu + ((a + 1) / t) * s.du + t * f.grad(s.u)).norm();
    case SystemKind::HEAVY_BALL:
      return (d.ddu + 2 * std::sqrt(cfg.mu) * s.du + f.grad(s.u)).norm();
    case SystemKind::TOGES:
      return (d.dddu + (3 * a + 5) / (2 * t) * s.ddu + (3 * a - 1) / (t * t) * s.du +
              f.grad(s.u + t * s.du))
          .norm();
    case SystemKind::TOGES_V:
      return (d.dddu + (a + 7) / t * s.ddu + 5 * (a + 1) / (t * t) * s.du +
              f.grad(s.u + 0.25 * t * s.du))
          .norm();
    case SystemKind::TOGES_VH: {
      const Vec v = s.u + 0.25 * t * s.du;
      return (d.dddu + (a + 7) / t * s.ddu + 5 * (a + 1) / (t * t) * s.du + f.grad(v) +
              cfg.beta * f.hvp(v, 1.25 * s.du + 0.25 * t * s.ddu))
          .norm();
    }
    case SystemKind::SC3: {
      const double r = std::sqrt(cfg.mu);
      return (d.dddu + 3 * r * s.ddu + 2 * cfg.mu * s.du + r * f.grad(s.u + s.du / r))
          .norm();
    }
    case SystemKind::TOGES_VR: {
      const Vec v = s.u + 0.25 * t * s.du;
      return (d.dddu + (a + 7) / t * s.ddu + 5 * (a + 1) / (t * t) * s.du +
              moreau::moreau_grad(*f.prox, cfg.lambda, v))
          .norm();
    }
  }
  return 1e300;
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("TOGES_V coefficients at alpha=3 are 10/t and 20/t^2") {
  const auto zero = test::zero_objective();
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(0, 0));

  const auto d1 = dynamics::field(cfg, zero, state_of(2.0, vec2(0, 0), vec2(0, 0), vec2(1, 0)));
  CHECK(d1.dddu[0] == doctest::Approx(-10.0 / 2.0).epsilon(1e-15));
  const auto d2 = dynamics::field(cfg, zero, state_of(2.0, vec2(0, 0), vec2(1, 0), vec2(0, 0)));
  CHECK(d2.dddu[0] == doctest::Approx(-20.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("TOGES coefficients at alpha=3 are 7/t and 8/t^2") {
  const auto zero = test::zero_objective();
  auto cfg = test::basic_config(SystemKind::TOGES, 3.0, vec2(0, 0));
  const auto d1 = dynamics::field(cfg, zero, state_of(2.0, vec2(0, 0), vec2(0, 0), vec2(1, 0)));
  CHECK(d1.dddu[0] == doctest::Approx(-7.0 / 2.0).epsilon(1e-15));
  const auto d2 = dynamics::field(cfg, zero, state_of(2.0, vec2(0, 0), vec2(1, 0), vec2(0, 0)));
  CHECK(d2.dddu[0] == doctest::Approx(-8.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("constant objective at rest is stationary") {
  const auto zero = test::zero_objective();
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  const auto d = dynamics::field(cfg, zero, state_of(5.0, vec2(3, 1), vec2(0, 0), vec2(0, 0)));
  CHECK(d.du.norm() == 0.0);
  CHECK(d.ddu.norm() == 0.0);
  CHECK(d.dddu.norm() == 0.0);
}

TEST_CASE("SC3 field by direct substitution") {
  const auto q = problems::quad_mu(1.0);
  auto cfg = test::basic_config(SystemKind::SC3, 3.0, vec2(3, 1));
  cfg.mu = 1.0;
  const auto d = dynamics::field(cfg, q, state_of(2.0, vec2(3, 1), vec2(0, 0), vec2(0, 0)));
  CHECK(d.dddu[0] == doctest::Approx(-3.0));
  CHECK(d.dddu[1] == doctest::Approx(-1.0));
}

TEST_CASE("auxiliary points") {
  CHECK(dynamics::aux_point_v(state_of(9.0, vec2(3, 1), vec2(0, 0), vec2(0, 0)))
            .isApprox(vec2(3, 1)));
  CHECK(dynamics::aux_point_v(state_of(1.0, vec2(0, 0), vec2(4, 0), vec2(0, 0)))
            .isApprox(vec2(1, 0)));
  CHECK(dynamics::aux_point_y(state_of(1.0, vec2(3, 1), vec2(0, 0), vec2(0, 0)), 1.0)
            .isApprox(vec2(3, 1)));
  CHECK(dynamics::aux_point_y(state_of(1.0, vec2(0, 0), vec2(2, 0), vec2(0, 0)), 4.0)
            .isApprox(vec2(1, 0)));
}

TEST_CASE("field substituted into the defining equation leaves ~1e-13 residual") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.5, 2.5);
  // small velocities keep u + t u' inside the f3 domain for every kind probed
  std::uniform_real_distribution<double> slow(-0.05, 0.05);
  std::uniform_real_distribution<double> tdist(0.5, 20.0);

  const auto f1 = problems::builtin_problem("f1");
  const auto f3 = problems::builtin_problem("f3");
  const auto abs = problems::builtin_problem("abs_sum");

  for (int i = 0; i < 25; ++i) {
    const auto s = state_of(tdist(rng), vec2(pos(rng), pos(rng)),
                            vec2(slow(rng), slow(rng)), vec2(box(rng), box(rng)));
    for (const auto kind : {SystemKind::AVD, SystemKind::RESCALED, SystemKind::TOGES,
                            SystemKind::TOGES_V, SystemKind::TOGES_VH, SystemKind::SC3,
                            SystemKind::HEAVY_BALL, SystemKind::TOGES_VR}) {
      dynamics::DynamicsConfig cfg = test::basic_config(kind, 3.7, s.u);
      cfg.beta = kind == SystemKind::TOGES_VH ? 1.3 : 0.0;
      cfg.mu = 2.0;
      cfg.lambda = 0.8;
      const auto& problem = kind == SystemKind::TOGES_VR ? abs : (i % 2 ? f1 : f3);
      CHECK(defining_equation_residual(cfg, problem, s) <= 1e-13);
    }
  }
}

TEST_CASE("TOGES_VH with beta=0 reproduces TOGES_V bitwise") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg_v = test::basic_config(SystemKind::TOGES_V, 4.0, vec2(3, 1));
  auto cfg_h = cfg_v;
  cfg_h.kind = SystemKind::TOGES_VH;
  cfg_h.beta = 0.0;

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const auto s = state_of(1.0 + i * 0.37, vec2(box(rng), box(rng)),
                            vec2(box(rng), box(rng)), vec2(box(rng), box(rng)));
    const auto dv = dynamics::field(cfg_v, f1, s);
    const auto dh = dynamics::field(cfg_h, f1, s);
    for (int k = 0; k < 2; ++k) {
      CHECK(dv.dddu[k] == dh.dddu[k]);
      CHECK(dv.ddu[k] == dh.ddu[k]);
      CHECK(dv.du[k] == dh.du[k]);
    }
  }
}

TEST_CASE("d/dt(t^4 u) = 4 t^3 v from the recorded state") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  const auto traj = integrator::integrate(cfg, f1, test::tight_integrator(50.0, test::log_grid(1, 50, 40)));
  for (const auto& sample : traj.samples) {
    const double t = sample.state.t;
    const Vec lhs = 4 * t * t * t * sample.state.u + t * t * t * t * sample.state.du;
    const Vec rhs = 4 * t * t * t * dynamics::aux_point_v(sample.state);
    CHECK((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("reduction residual vanishes along integrated trajectories") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  const auto traj =
      integrator::integrate(cfg, f1, test::tight_integrator(20.0, {1.0, 5.0, 10.0, 20.0}));
  for (const auto& sample : traj.samples) {
    CHECK(dynamics::residual_reduction(cfg, f1, sample.state) <= 1e-8);
  }

  const auto q = problems::quad_mu(1.0);
  auto sc = test::basic_config(SystemKind::SC3, 3.0, vec2(3, 1));
  sc.mu = 1.0;
  const auto traj2 = integrator::integrate(sc, q, test::tight_integrator(10.0, {1.0, 5.0, 10.0}));
  for (const auto& sample : traj2.samples) {
    CHECK(dynamics::residual_reduction(sc, q, sample.state) <= 1e-8);
  }

  // stationary at the minimizer
  auto still = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(0, 0));
  CHECK(dynamics::residual_reduction(still, f1, state_of(4.0, vec2(0, 0), vec2(0, 0), vec2(0, 0))) ==
        0.0);

  auto wrong = test::basic_config(SystemKind::TOGES, 3.0, vec2(0, 0));
  CHECK_THROWS_AS(
      dynamics::residual_reduction(wrong, f1, state_of(4.0, vec2(0, 0), vec2(0, 0), vec2(0, 0))),
      ConfigError);
}

TEST_CASE("time rescaling maps AVD onto the rescaled system") {
  // alpha_avd = 3 gives rescaled damping (3*3-1)/2 = 4 = alpha + 1 at alpha = 3,
  // with the gradient factor 9/4 absorbed into the objective.
  const double alpha_avd = 3.0;
  const double alpha_rescaled = (3.0 * alpha_avd - 3.0) / 2.0;
  CHECK(alpha_rescaled + 1.0 == doctest::Approx((3.0 * alpha_avd - 1.0) / 2.0));

  const auto f1 = problems::builtin_problem("f1");
  const auto f1_scaled = problems::scale(f1, 9.0 / 4.0);

  const double s0 = 1.0, s_end = 10.0;
  auto avd = test::basic_config(SystemKind::AVD, alpha_avd, vec2(3, 1));
  avd.t0 = std::pow(s0, 1.5);
  auto avd_icfg = test::tight_integrator(std::pow(s_end, 1.5) + 1.0);
  avd_icfg.rel_tol = 1e-11;
  avd_icfg.abs_tol = 1e-13;
  const auto avd_traj = integrator::integrate(avd, f1, avd_icfg);

  auto rescaled = test::basic_config(SystemKind::RESCALED, alpha_rescaled, vec2(3, 1));
  rescaled.t0 = s0;
  auto res_icfg = test::tight_integrator(s_end, test::log_grid(s0, s_end, 40));
  res_icfg.rel_tol = 1e-11;
  res_icfg.abs_tol = 1e-13;
  const auto rescaled_traj = integrator::integrate(rescaled, f1_scaled, res_icfg);

  CHECK(dynamics::rescale_equivalence(avd_traj, rescaled_traj) <= 1e-6);

  // zero initial velocity on the zero objective: both sit still
  const auto zero = test::zero_objective();
  auto avd0 = test::basic_config(SystemKind::AVD, 3.0, vec2(1, 2));
  const auto a_traj = integrator::integrate(avd0, zero, test::tight_integrator(40.0));
  auto res0 = test::basic_config(SystemKind::RESCALED, 3.0, vec2(1, 2));
  const auto r_traj =
      integrator::integrate(res0, zero, test::tight_integrator(10.0, test::log_grid(1, 10, 20)));
  CHECK(dynamics::rescale_equivalence(a_traj, r_traj) == 0.0);
}

TEST_CASE("configuration validation") {
  const auto f1 = problems::builtin_problem("f1");
  const auto abs = problems::builtin_problem("abs_sum");

  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  cfg.t0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(f1), ConfigError);

  auto sc = test::basic_config(SystemKind::SC3, 3.0, vec2(3, 1));
  CHECK_THROWS_AS(sc.validate(f1), ConfigError);  // mu unset

  auto vh = test::basic_config(SystemKind::TOGES_VH, 4.0, vec2(3, 1));
  vh.beta = 1.0;
  auto no_hvp = f1;
  no_hvp.hvp = nullptr;
  CHECK_THROWS_AS(vh.validate(no_hvp), CapabilityError);

  auto vr = test::basic_config(SystemKind::TOGES_VR, 3.0, vec2(3, 1));
  vr.lambda = 1.0;
  CHECK_THROWS_AS(vr.validate(f1), CapabilityError);  // no prox
  CHECK_NOTHROW(vr.validate(abs));

  auto avd = test::basic_config(SystemKind::AVD, 3.0, vec2(3, 1));
  CHECK_THROWS_AS(avd.validate(abs), CapabilityError);  // no grad
}

TEST_SUITE_END();
