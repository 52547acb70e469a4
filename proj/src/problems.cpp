#include "igflow/problems.hpp"

#include <cmath>
#include <utility>

namespace igflow::problems {

namespace {

Vec zero(int dim) { return Vec::Zero(dim); }

// "quad_mu(1.25)" -> 1.25; anything malformed -> ConfigError.
double parse_quad_mu(const std::string& name) {
  const auto open = name.find('(');
  const auto close = name.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ConfigError("quad_mu requires a modulus, e.g. quad_mu(1.0)");
  }
  try {
    const double mu = std::stod(name.substr(open + 1, close - open - 1));
    if (!(mu > 0)) throw ConfigError("quad_mu modulus must be > 0");
    return mu;
  } catch (const std::invalid_argument&) {
    throw ConfigError("could not parse modulus in '" + name + "'");
  }
}

ObjectiveSpec make_f1() {
  ObjectiveSpec f;
  f.dim = 2;
  f.name = "f1";
  f.value = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  f.grad = [](const Vec& x) { return Vec(x); };
  f.hvp = [](const Vec&, const Vec& d) { return Vec(d); };
  f.inf_value = 0.0;
  f.minimizer_projection = [](const Vec& x) { return zero(static_cast<int>(x.size())); };
  f.strong_convexity_mu = 1.0;
  return f;
}

ObjectiveSpec make_f2() {
  ObjectiveSpec f;
  f.dim = 2;
  f.name = "f2";
  f.value = [](const Vec& x) {
    const double s = x[0] + x[1] - 1.0;
    return 0.5 * s * s;
  };
  f.grad = [](const Vec& x) {
    const double s = x[0] + x[1] - 1.0;
    Vec g(2);
    g << s, s;
    return g;
  };
  f.hvp = [](const Vec&, const Vec& d) {
    const double s = d[0] + d[1];
    Vec g(2);
    g << s, s;
    return g;
  };
  f.inf_value = 0.0;
  // argmin is the line x1 + x2 = 1; orthogonal projection onto it.
  f.minimizer_projection = [](const Vec& x) {
    const double s = 0.5 * (x[0] + x[1] - 1.0);
    Vec p(2);
    p << x[0] - s, x[1] - s;
    return p;
  };
  return f;
}

ObjectiveSpec make_f3() {
  ObjectiveSpec f;
  f.dim = 2;
  f.name = "f3";
  f.domain_check = [](const Vec& x) { return x[0] > -1.0 && x[1] > -1.0; };
  f.value = [](const Vec& x) {
    return x[0] + x[1] * x[1] - 2.0 * std::log(x[0] + 1.0) - 2.0 * std::log(x[1] + 1.0);
  };
  f.grad = [](const Vec& x) {
    Vec g(2);
    g << 1.0 - 2.0 / (x[0] + 1.0), 2.0 * x[1] - 2.0 / (x[1] + 1.0);
    return g;
  };
  // Hessian is diag(2/(x1+1)^2, 2 + 2/(x2+1)^2).
  f.hvp = [](const Vec& x, const Vec& d) {
    const double a = x[0] + 1.0;
    const double b = x[1] + 1.0;
    Vec g(2);
    g << 2.0 / (a * a) * d[0], (2.0 + 2.0 / (b * b)) * d[1];
    return g;
  };
  // Stationarity: x1 = 1, x2 solves x2^2 + x2 - 1 = 0.
  const double x2 = 0.5 * (std::sqrt(5.0) - 1.0);
  Vec xstar(2);
  xstar << 1.0, x2;
  f.inf_value = f.value(xstar);
  f.minimizer_projection = [xstar](const Vec&) { return xstar; };
  return f;
}

ObjectiveSpec make_abs_sum(int dim) {
  ObjectiveSpec f;
  f.dim = dim;
  f.name = "abs_sum";
  f.value = [](const Vec& x) { return x.cwiseAbs().sum(); };
  f.prox = moreau::abs_sum_prox();
  f.inf_value = 0.0;
  f.minimizer_projection = [](const Vec& x) { return zero(static_cast<int>(x.size())); };
  return f;
}

}  // namespace

double ObjectiveSpec::eval(const Vec& x) const {
  if (domain_check && !domain_check(x)) {
    throw DomainError("objective '" + name + "' evaluated outside its domain");
  }
  return value(x);
}

Vec ObjectiveSpec::eval_grad(const Vec& x) const {
  if (!grad) throw CapabilityError("objective '" + name + "' has no gradient oracle");
  if (domain_check && !domain_check(x)) {
    throw DomainError("objective '" + name + "' gradient evaluated outside its domain");
  }
  return grad(x);
}

ObjectiveSpec quad_mu(double mu, int dim) {
  if (!(mu > 0)) throw ConfigError("quad_mu modulus must be > 0");
  ObjectiveSpec f;
  f.dim = dim;
  f.name = "quad_mu(" + std::to_string(mu) + ")";
  f.value = [mu](const Vec& x) { return 0.5 * mu * x.squaredNorm(); };
  f.grad = [mu](const Vec& x) { return Vec(mu * x); };
  f.hvp = [mu](const Vec&, const Vec& d) { return Vec(mu * d); };
  f.inf_value = 0.0;
  f.minimizer_projection = [](const Vec& x) { return zero(static_cast<int>(x.size())); };
  f.strong_convexity_mu = mu;
  return f;
}

ObjectiveSpec builtin_problem(const std::string& name) {
  if (name == "f1") return make_f1();
  if (name == "f2") return make_f2();
  if (name == "f3") return make_f3();
  if (name == "abs_sum") return make_abs_sum(2);
  if (name.rfind("quad_mu", 0) == 0) return quad_mu(parse_quad_mu(name));
  throw ConfigError("unknown problem '" + name + "'");
}

ObjectiveSpec scale(const ObjectiveSpec& f, double c) {
  if (!(c > 0)) throw ConfigError("objective scale factor must be > 0");
  ObjectiveSpec g;
  g.dim = f.dim;
  g.name = std::to_string(c) + "*" + f.name;
  if (f.value) {
    auto v = f.value;
    g.value = [v, c](const Vec& x) { return c * v(x); };
  }
  if (f.grad) {
    auto gr = f.grad;
    g.grad = [gr, c](const Vec& x) { return Vec(c * gr(x)); };
  }
  if (f.hvp) {
    auto h = f.hvp;
    g.hvp = [h, c](const Vec& x, const Vec& d) { return Vec(c * h(x, d)); };
  }
  g.inf_value = c * f.inf_value;
  g.minimizer_projection = f.minimizer_projection;
  if (f.strong_convexity_mu) g.strong_convexity_mu = c * *f.strong_convexity_mu;
  g.domain_check = f.domain_check;
  return g;
}

double check_gradient(const ObjectiveSpec& problem, const Vec& x, double h) {
  if (!(h > 0)) throw ConfigError("finite-difference step must be > 0");
  if (!problem.has_grad()) {
    throw CapabilityError("objective '" + problem.name + "' has no gradient oracle");
  }
  const Vec g = problem.eval_grad(x);
  double worst = 0.0;
  Vec xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double cd = (problem.eval(xp) - problem.eval(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(cd - g[i]) / (1.0 + std::abs(g[i])));
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return worst;
}

double check_hvp(const ObjectiveSpec& problem, const Vec& x, const Vec& d, double h) {
  if (!(h > 0)) throw ConfigError("finite-difference step must be > 0");
  if (!problem.has_hvp()) {
    throw CapabilityError("objective '" + problem.name + "' has no Hessian-vector oracle");
  }
  const Vec hv = problem.hvp(x, d);
  const Vec cd = (problem.eval_grad(x + h * d) - problem.eval_grad(x - h * d)) / (2.0 * h);
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(cd[i] - hv[i]) / (1.0 + std::abs(hv[i])));
  }
  return worst;
}

}  // namespace igflow::problems
