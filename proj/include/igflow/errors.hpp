#pragma once

#include <stdexcept>
#include <string>

namespace igflow {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration (unknown problem name, wrong system kind,
// missing parameters, invalid windows).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A required oracle (grad, hvp, prox) is absent on the objective.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Evaluation outside the objective's open domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Query outside the time span of a trajectory.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Too few usable points for a fit.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Two routes to the same quantity disagree beyond tolerance, or an oracle
// returned something structurally impossible.
class OracleInconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace igflow
