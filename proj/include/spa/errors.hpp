#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spa {

/// Invalid argument or parameter outside the domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model whose parameters violate a validity condition.
class ModelValidityError : public std::runtime_error {
 public:
  explicit ModelValidityError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Non-finite, singular or otherwise failed numerical computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Covariance matrix that admits no symmetric factorization.
class FactorizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace spa
