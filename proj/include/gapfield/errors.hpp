#pragma once

#include <stdexcept>
#include <string>

namespace gapfield {

// Raised when an input lies outside the domain of an operation
// (non-positive radii, evaluation at a pole, |z| too close to 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when a truncated series or quadrature cannot reach the requested
// tolerance within its term budget. Carries the bound that was achieved.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double achieved_bound, long terms)
      : std::runtime_error(what + " (achieved bound " + std::to_string(achieved_bound) +
                           " after " + std::to_string(terms) + " terms)"),
        achieved_bound_(achieved_bound),
        terms_(terms) {}

  double achieved_bound() const noexcept { return achieved_bound_; }
  long terms() const noexcept { return terms_; }

 private:
  double achieved_bound_;
  long terms_;
};

}  // namespace gapfield
