#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cylsp {

/// Evaluation outside the domain of a formula (singular point, nonpositive
/// coefficient, out-of-range parameter).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A structural invariant of a data type was found broken.
class InvariantViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical method failed to reach its target. Carries the residual
/// history so callers can report what happened.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what,
                       std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

/// M is +infinity on the whole slice: there is nothing to minimize.
class NoMinimizerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace cylsp
