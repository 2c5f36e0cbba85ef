#pragma once

#include <stdexcept>
#include <string>

namespace nscbf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions disagree or exceed the supported ambient dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An optimization problem has an empty feasible set.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace nscbf
