#pragma once

#include <stdexcept>
#include <string>

namespace dlm {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad counts, malformed configs, violated preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A kernel (or one of its derivatives) has no finite value at the requested radius.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The kernel catalogue has no entry for the requested operator.
class CatalogueMissError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of a numerical solve.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Rank deficiency beyond the declared tolerance.
class SingularSystemError : public SolverError {
 public:
  SingularSystemError(const std::string& what, double condition_estimate, int iteration = -1)
      : SolverError(what), condition_estimate_(condition_estimate), iteration_(iteration) {}

  double condition_estimate() const noexcept { return condition_estimate_; }
  /// Newton iteration index at failure, -1 outside Newton.
  int iteration() const noexcept { return iteration_; }

 private:
  double condition_estimate_;
  int iteration_;
};

class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, int iteration) : SolverError(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace dlm
