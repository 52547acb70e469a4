#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

#include "igflow/errors.hpp"
#include "igflow/moreau.hpp"

namespace igflow::problems {

// A convex objective with analytic oracles. Immutable after construction;
// every oracle is a pure function, so a spec may be shared across threads.
struct ObjectiveSpec {
  int dim = 0;
  std::string name;

  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;                  // null for nonsmooth objectives
  std::function<Vec(const Vec&, const Vec&)> hvp;       // Hessian-vector product, optional
  std::optional<moreau::ProxOracle> prox;

  double inf_value = 0.0;
  std::function<Vec(const Vec&)> minimizer_projection;  // projection onto argmin
  std::optional<double> strong_convexity_mu;
  std::function<bool(const Vec&)> domain_check;         // open-domain membership

  bool has_grad() const { return static_cast<bool>(grad); }
  bool has_hvp() const { return static_cast<bool>(hvp); }
  bool has_prox() const { return prox.has_value(); }

  // Evaluates value(x), raising DomainError outside the open domain.
  double eval(const Vec& x) const;
  Vec eval_grad(const Vec& x) const;
};

// Built-in objectives, addressed by name: "f1", "f2", "f3", "abs_sum",
// and "quad_mu(<mu>)". Unknown names raise ConfigError.
ObjectiveSpec builtin_problem(const std::string& name);

// (mu/2)|x|^2 in the given dimension.
ObjectiveSpec quad_mu(double mu, int dim = 2);

// The objective c*f for c > 0; argmin is unchanged, infimum and modulus
// scale by c. Drops the prox oracle (it does not rescale the same way).
ObjectiveSpec scale(const ObjectiveSpec& f, double c);

// Max over coordinates of |central difference - grad component| / (1 + |grad component|).
double check_gradient(const ObjectiveSpec& problem, const Vec& x, double h);

// Same metric for hvp(x,d) against the central difference of grad along d.
double check_hvp(const ObjectiveSpec& problem, const Vec& x, const Vec& d, double h);

}  // namespace igflow::problems
