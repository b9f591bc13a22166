#ifndef SINGINT_ERRORS_HPP
#define SINGINT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace singint {

/// Bad input: unknown names, malformed documents, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: stage solves that do not converge, NaN/Inf blowup.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace singint

#endif
