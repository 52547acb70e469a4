#pragma once

#include <Eigen/Core>
#include <functional>

#include "igflow/errors.hpp"

namespace igflow {

using Vec = Eigen::VectorXd;

namespace problems {
struct ObjectiveSpec;
}

namespace moreau {

// Proximal mapping of a convex lower-semicontinuous f, together with the raw
// function values (which may be +inf outside the effective domain).
struct ProxOracle {
  std::function<Vec(double lambda, const Vec& x)> prox;
  std::function<double(const Vec& x)> raw_value;
};

// Moreau envelope value f_lambda(x) = f(prox(lambda,x)) + |x - prox|^2/(2 lambda).
double moreau_value(const ProxOracle& oracle, double lambda, const Vec& x);

// Envelope gradient (x - prox(lambda,x)) / lambda; Lipschitz with constant 1/lambda.
Vec moreau_grad(const ProxOracle& oracle, double lambda, const Vec& x);

// Wraps the envelope as a smooth objective. Infimum and argmin are those of
// the raw function; the prox oracle is kept on the result so prox-based gap
// selectors keep working. No Hessian oracle is provided.
problems::ObjectiveSpec regularize(const ProxOracle& oracle, double lambda,
                                   double inf_value,
                                   std::function<Vec(const Vec&)> minimizer_projection,
                                   int dim);

// Component-wise soft threshold, prox of x -> sum_i |x_i|.
ProxOracle abs_sum_prox();

// Component-wise clamp to [lo, hi], prox of the box indicator.
ProxOracle box_prox(double lo, double hi);

}  // namespace moreau
}  // namespace igflow
