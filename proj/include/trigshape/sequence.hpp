#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trigshape/construction.hpp"

namespace trigshape {

/// A sequence eps_n >= 0 tending to zero: one of the presets "zero",
/// "inv_log" (1 / log(n + 2)), "inv_quarter_power" (n^{-1/4}), or "inline"
/// (explicit eps_1, eps_2, ...; zero past the end of the list).
struct EpsSequence {
  std::string id = "zero";
  std::vector<double> values;

  double operator()(double n) const;
  static EpsSequence preset(const std::string& id);
  static EpsSequence inline_list(std::vector<double> values);
};

/// b_n = (max{eps_n^2, 1/n})^{2/5}.
double b_of(const EpsSequence& eps, double n);

enum class SequenceMode { PaperFaithful, Demonstration };

struct SequenceStep {
  int sigma = 0;
  double log_n = 0.0;  ///< natural log of n_sigma (exact when evaluable)
  long n = 0;           ///< n_sigma, 0 when beyond the evaluation cap
  double b = 0.0;
  double log_d = 0.0;  ///< log d_sigma
  double log_n1 = 0.0;  ///< log N_{1,sigma}
  double log_n2 = 0.0;  ///< log N_{2,sigma}
  double second_derivative_norm = 0.0;  ///< ||F''_{sigma-1}|| used for N_2
  Interval J;           ///< J_sigma (inherited from J_{sigma-1} when not evaluable)
  bool evaluable = false;
  int zero_intervals_inside = 0;
  std::shared_ptr<const CounterexampleFunction> f;
};

struct SequenceState {
  int s = 2;
  EpsSequence eps;
  SequenceMode mode = SequenceMode::Demonstration;
  /// Replaces the exponent 10 of N_2 and the power 8 of |J| in the N_1 condition.
  double exponent_override = 1.0;
  double eval_cap = 1e6;
  /// Zero intervals of g_{n_sigma} required inside J_{sigma-1}.
  int min_zero_intervals = 3;
  std::vector<SequenceStep> steps;

  int sigma() const noexcept { return static_cast<int>(steps.size()); }
  double log_d(int j) const;  ///< log d_j, d_0 = 1
  double d(int j) const;
  Interval J(int j) const;  ///< J_0 = I_0
  bool all_evaluable() const;
  double n1_exponent() const { return mode == SequenceMode::PaperFaithful ? 8.0 : exponent_override; }
  double n2_exponent() const { return mode == SequenceMode::PaperFaithful ? 10.0 : exponent_override; }
};

SequenceState start_sequence(int s, EpsSequence eps, SequenceMode mode, double exponent_override = 1.0,
                             double eval_cap = 1e6);

/// Appends step sigma + 1. Throws InfeasibleStep when the previous step was
/// already beyond the evaluation cap.
SequenceState advance_sequence(const SequenceState& state);

/// F_sigma(x) = sum_{j<=sigma} d_{j-1} f_{n_j, b_{n_j}}(x).
double f_eps_partial(const SequenceState& state, double x);
/// F'_sigma(x).
double f_eps_partial_derivative(const SequenceState& state, double x);
/// F_sigma as a PeriodicFunction (breakpoints of all terms merged).
PeriodicFunction f_eps_function(const SequenceState& state);

/// ||F''_sigma|| over [-pi, pi], accounting for one-sided limits at kinks.
double second_derivative_norm(const SequenceState& state);

void to_json(nlohmann::json& j, const SequenceState& state);

}  // namespace trigshape
