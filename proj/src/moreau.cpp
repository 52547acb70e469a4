#include "igflow/moreau.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "igflow/problems.hpp"

namespace igflow::moreau {

namespace {

void require_positive_lambda(double lambda) {
  if (!(lambda > 0)) throw ConfigError("Moreau index lambda must be > 0");
}

}  // namespace

double moreau_value(const ProxOracle& oracle, double lambda, const Vec& x) {
  require_positive_lambda(lambda);
  const Vec p = oracle.prox(lambda, x);
  const double raw = oracle.raw_value(p);
  if (!std::isfinite(raw)) {
    throw OracleInconsistencyError(
        "prox output lies outside the effective domain of the raw function");
  }
  return raw + (x - p).squaredNorm() / (2.0 * lambda);
}

Vec moreau_grad(const ProxOracle& oracle, double lambda, const Vec& x) {
  require_positive_lambda(lambda);
  return (x - oracle.prox(lambda, x)) / lambda;
}

problems::ObjectiveSpec regularize(const ProxOracle& oracle, double lambda,
                                   double inf_value,
                                   std::function<Vec(const Vec&)> minimizer_projection,
                                   int dim) {
  require_positive_lambda(lambda);
  problems::ObjectiveSpec f;
  f.dim = dim;
  f.name = "moreau(lambda=" + std::to_string(lambda) + ")";
  f.value = [oracle, lambda](const Vec& x) { return moreau_value(oracle, lambda, x); };
  f.grad = [oracle, lambda](const Vec& x) { return moreau_grad(oracle, lambda, x); };
  f.prox = oracle;
  f.inf_value = inf_value;
  f.minimizer_projection = std::move(minimizer_projection);
  return f;
}

ProxOracle abs_sum_prox() {
  ProxOracle p;
  p.prox = [](double lambda, const Vec& x) {
    Vec out(x.size());
    for (int i = 0; i < x.size(); ++i) {
      const double mag = std::max(std::abs(x[i]) - lambda, 0.0);
      out[i] = x[i] < 0 ? -mag : mag;
    }
    return out;
  };
  p.raw_value = [](const Vec& x) { return x.cwiseAbs().sum(); };
  return p;
}

ProxOracle box_prox(double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("box bounds must satisfy lo <= hi");
  ProxOracle p;
  p.prox = [lo, hi](double, const Vec& x) {
    return Vec(x.cwiseMax(lo).cwiseMin(hi));
  };
  p.raw_value = [lo, hi](const Vec& x) {
    for (int i = 0; i < x.size(); ++i) {
      if (x[i] < lo || x[i] > hi) return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  };
  return p;
}

}  // namespace igflow::moreau
