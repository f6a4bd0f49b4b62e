#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace soblab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed form evaluated at a point where it is not differentiable.
class SingularPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A numeric construction (antiderivative, endpoint limit) did not converge
/// within its budget.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Positive definiteness of the coefficient matrix failed at a sample point.
class EllipticityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// integrate() met a non-finite integrand value; carries the offending node.
class NonFiniteIntegrandError : public std::runtime_error {
 public:
  NonFiniteIntegrandError(std::size_t index, const std::string& where)
      : std::runtime_error("non-finite integrand value at node " + std::to_string(index) +
                           " (" + where + ")"),
        node_index(index),
        location(where) {}
  std::size_t node_index;
  std::string location;
};

/// Malformed or inconsistent experiment configuration; carries the key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& message)
      : std::runtime_error("config error at '" + key_path + "': " + message), path(key_path) {}
  std::string path;
};

}  // namespace soblab
