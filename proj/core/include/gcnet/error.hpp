#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gcnet {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid dimensions, non-finite input, violated preconditions.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// Iterative solver hit its iteration cap. Carries the residual magnitude
// and the indices of the subproblems that failed (rows, columns, draws).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double violation,
                   std::vector<int> failed_indices = {})
      : Error(what), violation(violation), failed_indices(std::move(failed_indices)) {}

  double violation;
  std::vector<int> failed_indices;
};

// Infeasible linear program (CLIME column) or degenerate selection grid.
class FeasibilityError : public Error {
 public:
  explicit FeasibilityError(const std::string& what, int index = -1)
      : Error(what), index(index) {}

  int index;
};

// Numerical failure outside iteration control (Cholesky, eigensolver).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace gcnet
