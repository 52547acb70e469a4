#include <doctest.h>

#include <cmath>

#include "igflow/integrator.hpp"
#include "test_util.hpp"

using namespace igflow;
using dynamics::SystemKind;
using test::vec2;

namespace {

// Free motion of TOGES_V (zero objective): u' solves an Euler equation with
// exponents -5 and -(alpha+1); fit the constants to the initial data.
struct FreeMotionOracle {
  double r1, r2, c1, c2;  // per-component constants share r1, r2
  Vec a, b;

  FreeMotionOracle(double alpha, double t0, const Vec& du0, const Vec& ddu0) {
    r1 = -5.0;
    r2 = -(alpha + 1.0);
    // du0 = a t0^r1 + b t0^r2 ; ddu0 = a r1 t0^(r1-1) + b r2 t0^(r2-1)
    const double p1 = std::pow(t0, r1), p2 = std::pow(t0, r2);
    const double q1 = r1 * std::pow(t0, r1 - 1), q2 = r2 * std::pow(t0, r2 - 1);
    const double det = p1 * q2 - p2 * q1;
    a = (q2 * du0 - p2 * ddu0) / det;
    b = (-q1 * du0 + p1 * ddu0) / det;
    c1 = 0;
    c2 = 0;
  }

  Vec du(double t) const { return a * std::pow(t, r1) + b * std::pow(t, r2); }
};

}  // namespace

TEST_SUITE_BEGIN("integrator");

TEST_CASE("stationary initial data stays put bitwise") {
  const auto zero = test::zero_objective();
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  const auto traj =
      integrator::integrate(cfg, zero, test::tight_integrator(100.0, {1.0, 2.5, 50.0, 100.0}));
  CHECK(traj.samples.size() == 4);
  for (const auto& s : traj.samples) {
    CHECK(s.state.u[0] == 3.0);
    CHECK(s.state.u[1] == 1.0);
    CHECK(s.state.du.norm() == 0.0);
    CHECK(s.state.ddu.norm() == 0.0);
  }
  // midpoint interpolation is equally exact
  CHECK(integrator::sample_at(traj, 7.3).u[0] == 3.0);
}

TEST_CASE("free motion matches the Euler-equation closed form") {
  const auto zero = test::zero_objective();
  for (const double alpha : {3.0, 5.0}) {
    auto cfg = test::basic_config(SystemKind::TOGES_V, alpha, vec2(0, 0));
    cfg.du0 = vec2(1.0, -0.5);
    cfg.ddu0 = vec2(0.25, 1.0);
    const FreeMotionOracle oracle(alpha, cfg.t0, cfg.du0, cfg.ddu0);

    const auto traj =
        integrator::integrate(cfg, zero, test::tight_integrator(100.0, test::log_grid(1, 100, 60)));
    for (const auto& s : traj.samples) {
      const Vec expect = oracle.du(s.state.t);
      CHECK((s.state.du - expect).norm() <= 1e-8 * (1.0 + expect.norm()));
    }
  }
}

TEST_CASE("tolerance tightening changes AVD/f1 samples by < 1e-7") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::AVD, 3.0, vec2(3, 1));
  auto icfg = test::tight_integrator(100.0, test::log_grid(1, 100, 50));
  const auto coarse = integrator::integrate(cfg, f1, icfg);
  icfg.rel_tol = 1e-12;
  icfg.abs_tol = 1e-14;
  const auto fine = integrator::integrate(cfg, f1, icfg);
  for (std::size_t i = 0; i < coarse.samples.size(); ++i) {
    CHECK((coarse.samples[i].state.u - fine.samples[i].state.u).norm() <= 1e-7);
  }
}

TEST_CASE("self-convergence under tolerance halving, all kinds") {
  struct Case {
    SystemKind kind;
    const char* problem;
  };
  const Case cases[] = {
      {SystemKind::AVD, "f1"},      {SystemKind::AVD, "f3"},
      {SystemKind::RESCALED, "f1"}, {SystemKind::RESCALED, "f2"},
      {SystemKind::TOGES, "f1"},    {SystemKind::TOGES, "f3"},
      {SystemKind::TOGES_V, "f1"},  {SystemKind::TOGES_V, "f2"},
      {SystemKind::TOGES_V, "f3"},  {SystemKind::TOGES_VH, "f1"},
      {SystemKind::TOGES_VH, "f3"}, {SystemKind::SC3, "f1"},
      {SystemKind::SC3, "quad_mu(2.0)"}, {SystemKind::HEAVY_BALL, "f1"},
      {SystemKind::TOGES_VR, "abs_sum"},
  };
  for (const auto& c : cases) {
    CAPTURE(dynamics::to_string(c.kind));
    CAPTURE(c.problem);
    const auto problem = problems::builtin_problem(c.problem);
    auto cfg = test::basic_config(c.kind, 3.5, vec2(3, 1));
    cfg.beta = c.kind == SystemKind::TOGES_VH ? 1.0 : 0.0;
    cfg.mu = problem.strong_convexity_mu.value_or(1.0);
    cfg.lambda = 1.0;

    auto icfg = test::tight_integrator(50.0, {50.0});
    icfg.rel_tol = 1e-9;
    icfg.abs_tol = 1e-12;
    const auto loose = integrator::integrate(cfg, problem, icfg);
    icfg.rel_tol /= 2;
    icfg.abs_tol /= 2;
    const auto tight = integrator::integrate(cfg, problem, icfg);

    const Vec& a = loose.samples.back().state.u;
    const Vec& b = tight.samples.back().state.u;
    CHECK((a - b).norm() <= 10 * 1e-9 * (1.0 + b.norm()));
  }
}

TEST_CASE("samples land exactly on the requested grid") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  const std::vector<double> grid = {1.0, 1.7, 3.141592653589793, 10.0, 64.25, 100.0};
  const auto traj = integrator::integrate(cfg, f1, test::tight_integrator(100.0, grid));
  REQUIRE(traj.samples.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(traj.samples[i].state.t == grid[i]);
  }
  CHECK(traj.samples[0].state.u[0] == 3.0);  // initial data, bitwise
  CHECK(traj.step_stats.accepted > 0);
}

TEST_CASE("sample_at agrees with re-integration to the query time") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  const auto traj = integrator::integrate(cfg, f1, test::tight_integrator(100.0));

  const double t_query = 37.3;
  const auto run_to = integrator::integrate(cfg, f1, test::tight_integrator(t_query, {t_query}));
  const auto interp = integrator::sample_at(traj, t_query);
  CHECK((interp.u - run_to.samples.back().state.u).norm() <= 1e-7);
  CHECK((interp.du - run_to.samples.back().state.du).norm() <= 1e-7);

  CHECK_THROWS_AS(integrator::sample_at(traj, 0.5), RangeError);
  CHECK_THROWS_AS(integrator::sample_at(traj, 100.5), RangeError);
}

TEST_CASE("max_steps exhaustion carries the partial trajectory") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));
  auto icfg = test::tight_integrator(1000.0);
  icfg.max_steps = 5;
  try {
    integrator::integrate(cfg, f1, icfg);
    FAIL("expected TruncatedTrajectoryError");
  } catch (const integrator::TruncatedTrajectoryError& e) {
    CHECK(!e.partial.samples.empty());
    CHECK(e.partial.samples.front().state.u[0] == 3.0);
  }
}

TEST_CASE("domain exits reject steps and eventually give up") {
  // Minimizer outside the open domain: the trajectory must hit the wall.
  problems::ObjectiveSpec wall;
  wall.dim = 1;
  wall.name = "wall";
  wall.domain_check = [](const Vec& x) { return x[0] < 2.0; };
  wall.value = [](const Vec& x) { return 0.5 * (x[0] - 3.0) * (x[0] - 3.0); };
  wall.grad = [](const Vec& x) { return Vec(Vec::Constant(1, x[0] - 3.0)); };
  wall.inf_value = 0.0;
  wall.minimizer_projection = [](const Vec&) { return Vec(Vec::Constant(1, 2.0)); };

  dynamics::DynamicsConfig cfg;
  cfg.kind = SystemKind::AVD;
  cfg.alpha = 3.0;
  cfg.t0 = 1.0;
  cfg.u0 = Vec::Constant(1, 0.0);
  cfg.du0 = Vec::Zero(1);

  try {
    integrator::integrate(cfg, wall, test::tight_integrator(100.0));
    FAIL("expected DomainError");
  } catch (const DomainError&) {
    // expected: 40 consecutive rejections at the boundary
  }
}

TEST_CASE("f3 trajectories never sample outside the domain") {
  const auto f3 = problems::builtin_problem("f3");
  for (const Vec& start : {vec2(3, 1), vec2(0.05, 0.05)}) {
    auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, start);
    const auto traj =
        integrator::integrate(cfg, f3, test::tight_integrator(200.0, test::log_grid(1, 200, 80)));
    for (const auto& s : traj.samples) {
      CHECK(f3.domain_check(s.state.u));
      CHECK(f3.domain_check(dynamics::aux_point_v(s.state)));
    }
  }
}

TEST_CASE("configuration errors") {
  const auto f1 = problems::builtin_problem("f1");
  auto cfg = test::basic_config(SystemKind::TOGES_V, 3.0, vec2(3, 1));

  auto bad_end = test::tight_integrator(0.5);
  CHECK_THROWS_AS(integrator::integrate(cfg, f1, bad_end), ConfigError);

  auto bad_grid = test::tight_integrator(10.0, {5.0, 2.0});
  CHECK_THROWS_AS(integrator::integrate(cfg, f1, bad_grid), ConfigError);

  auto outside = test::tight_integrator(10.0, {0.2, 5.0});
  CHECK_THROWS_AS(integrator::integrate(cfg, f1, outside), ConfigError);
}

TEST_SUITE_END();
