#pragma once

#include <stdexcept>
#include <string>

namespace xpowx {

/// Input outside the mathematical domain of an operation (composite where a
/// prime is required, zero modulus, out-of-range residue, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A hypothesis the caller is responsible for does not hold.
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid configuration constants (e.g. c2 <= 2/ln 2 for the N_q construction).
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Work would exceed the caller's budget. `required` names the cost that was
/// refused, e.g. "23^8 = 78310985281".
class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& what, std::string required)
      : std::runtime_error(what), required_(std::move(required)) {}

  const std::string& required() const noexcept { return required_; }

 private:
  std::string required_;
};

}  // namespace xpowx
