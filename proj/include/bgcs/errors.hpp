#ifndef BGCS_ERRORS_HPP
#define BGCS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bgcs {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A density or kernel that diverges at the requested point.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Intermediate or final value exceeds the double range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Caller violated a documented precondition (index range, cutoff size, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Run configuration that cannot produce a meaningful result (e.g. unstable slicing).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Series or quadrature that did not reach its tolerance; carries the best estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_estimate)
      : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

}  // namespace bgcs

#endif  // BGCS_ERRORS_HPP
