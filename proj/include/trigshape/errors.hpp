#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace trigshape {

/// Argument outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Antiderivative requested for a polynomial whose constant term is not zero.
class NonZeroMean : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integral positivity failed on some type II intervals (b too close to 1/2).
class ConstructionInfeasible : public std::runtime_error {
 public:
  ConstructionInfeasible(const std::string& what, std::vector<int> failing)
      : std::runtime_error(what), failing_(std::move(failing)) {}
  const std::vector<int>& failing_intervals() const noexcept { return failing_; }

 private:
  std::vector<int> failing_;
};

/// Bisection for the rebalancing constant could not bracket a root.
class NoRoot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The simplex solver lost feasibility or hit a singular basis.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inductive sequence cannot place a new step below the evaluation cap.
class InfeasibleStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sequence term is too large to evaluate pointwise.
class EvalCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trigshape
