#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace yamabe {

/// Argument outside the mathematical domain of an operation (k out of range,
/// t >= 1, Phi <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An eigenvalue vector left the closed cone. Carries the smallest
/// elementary symmetric value seen and, when known, the offending grid node.
class AdmissibilityError : public std::runtime_error {
 public:
  AdmissibilityError(const std::string& what, double min_sigma,
                     std::ptrdiff_t node = -1)
      : std::runtime_error(what), min_sigma_(min_sigma), node_(node) {}

  double min_sigma() const noexcept { return min_sigma_; }
  std::ptrdiff_t node() const noexcept { return node_; }

 private:
  double min_sigma_;
  std::ptrdiff_t node_;
};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of a driver (e.g. nonnegative scalar curvature)
/// does not hold for the supplied data.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace yamabe
