#pragma once

#include <stdexcept>

namespace edsense {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series, continued fraction, root search or quadrature did not reach its
/// tolerance within the allowed work.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed quantity fell outside the range its definition guarantees.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edsense
