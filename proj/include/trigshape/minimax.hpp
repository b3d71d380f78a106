#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trigshape/lp.hpp"
#include "trigshape/partition.hpp"
#include "trigshape/smoothness.hpp"

namespace trigshape {

/// Shape constraint attached to a best-approximation problem.
struct ConstraintSpec {
  enum class Kind { None, Comonotone, ComonotoneExcluding, MeasureRelaxed };
  Kind kind = Kind::None;
  std::optional<PointSet> y;
  /// Sign constraints are dropped on these intervals (ComonotoneExcluding).
  std::vector<Interval> excluded;
  /// Allowed measure of {P' Pi < 0} in [-pi, pi] (MeasureRelaxed).
  double eps_budget = 0.0;

  static ConstraintSpec none();
  static ConstraintSpec comonotone(PointSet y);
  static ConstraintSpec excluding(PointSet y, std::vector<Interval> excluded);
  static ConstraintSpec measure_relaxed(PointSet y, double eps);

  void validate() const;
  std::string name() const;
};

/// LP method for the discretised problem. Auto: simplex from a discrete
/// Remez basis without sign constraints up to degree 400, interior point
/// otherwise.
enum class LpMethod { Auto, Simplex, InteriorPoint };

struct MinimaxOptions {
  int approx_grid = 0;      ///< 0: 8 (n + 1)
  int constraint_grid = 0;  ///< 0: 16 (n + s)
  /// Grid doublings after the first solve, each warm started.
  int refinements = 0;
  double cert_tol = 1e-8;
  /// Cutting-plane rounds when the violation exceeds cert_tol. Above
  /// degree 400 the rounds are skipped and the repair runs directly: each
  /// round costs minutes there and gains little.
  int cert_rounds = 3;
  /// Final fallback: add eta * int Pi to P (mean-zero Pi only).
  bool repair = true;
  int greedy_rounds = 8;
  /// Certification grid = certify_factor * approx grid, plus breakpoints.
  int certify_factor = 8;
  LpMethod method = LpMethod::Auto;
  lp::Options lp;
  lp::InteriorOptions ipm;
};

enum class SolutionStatus { Certified, Repaired, Uncertified };
std::string to_string(SolutionStatus s);

struct MinimaxSolution {
  TrigPoly poly;
  double delta_grid = 0.0;       ///< LP optimum, a lower estimate of the continuum error
  double delta_certified = 0.0;  ///< fine-grid sup |f - poly|, an upper estimate
  double violation = 0.0;        ///< measure of {poly' Pi < 0} (0 without Y)
  /// Violation outside the excluded set (ComonotoneExcluding).
  double violation_outside = 0.0;
  SolutionStatus status = SolutionStatus::Certified;
  std::string spec;
  int degree = 0;
  int approx_grid = 0;
  int constraint_grid = 0;
  long lp_iterations = 0;
  std::vector<Interval> excluded;  ///< exclusion set actually used

  // Warm-start data: LP basis and the grids it refers to.
  std::vector<long> basis;
  /// Shadow prices of the sign constraints, one per constraint-grid point.
  std::vector<double> sign_duals;
};

void to_json(nlohmann::json& j, const MinimaxSolution& s);

struct MinimaxProblem {
  PeriodicFunction f;
  int degree = 0;
  ConstraintSpec spec;
  MinimaxOptions options;
};

MinimaxSolution solve(const MinimaxProblem& problem);

/// E_n(f).
MinimaxSolution best_unconstrained(const PeriodicFunction& f, int n, const MinimaxOptions& opts = {});
/// E_n^(1)(f, Y): P' Pi >= 0 on the constraint grid, P'(y_i) = 0.
MinimaxSolution best_comonotone(const PeriodicFunction& f, int n, const PointSet& y,
                                const MinimaxOptions& opts = {});
/// Sign constraints only outside `excluded`.
MinimaxSolution best_excluding(const PeriodicFunction& f, int n, const PointSet& y,
                               const std::vector<Interval>& excluded, const MinimaxOptions& opts = {});
/// Greedy upper bound for the best error among P with meas{P' Pi < 0} <= eps.
/// Returns the best certified-feasible candidate; the comonotone solution is
/// always a feasible fallback.
MinimaxSolution best_measure_relaxed(const PeriodicFunction& f, int n, const PointSet& y, double eps,
                                     const MinimaxOptions& opts = {});

/// sup |f - p| over `J`: `points` equispaced samples plus the breakpoints of
/// f inside J, near-maximal samples polished by golden section.
double sup_error(const PeriodicFunction& f, const TrigPoly& p, const Interval& J, int points);

/// Length of the longest alternating sequence of points where
/// |f - p| >= (1 - rel_tol) * level, counted around the circle.
int equioscillation_count(const PeriodicFunction& f, const TrigPoly& p, double level, int grid,
                          double rel_tol = 1e-6);

struct RatioRow {
  int n = 0;
  int k = 0;
  std::string spec;
  double e_lower = 0.0;
  double e_upper = 0.0;
  double omega_lower = 0.0;
  double omega_upper = 0.0;
  double ratio_lower = 0.0;
  double ratio_upper = 0.0;
};

/// E/omega_k(f, pi/n) with certified brackets on both sides. `family`
/// supplies f for each n (it may depend on n, as f_{n,b_n} does).
std::vector<RatioRow> ratio_table(const std::function<PeriodicFunction(int)>& family, int k,
                                  const std::vector<int>& n_list,
                                  const std::function<ConstraintSpec(int)>& spec_for_n,
                                  const MinimaxOptions& opts = {}, const ModulusOptions& mopts = {});

std::string ratio_table_csv(const std::vector<RatioRow>& rows);
void to_json(nlohmann::json& j, const RatioRow& r);

}  // namespace trigshape
