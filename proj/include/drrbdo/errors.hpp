#ifndef DRRBDO_ERRORS_HPP
#define DRRBDO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace drrbdo {

/// Malformed input: dimension mismatch, asymmetric matrix, bad index.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Stiffness matrix is singular at the requested design.
class MechanismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem data or configuration rejected (files, schemas, sampler setup).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The conic solver did not reach an optimal status where one was required.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace drrbdo

#endif  // DRRBDO_ERRORS_HPP
