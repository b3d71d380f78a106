#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trigshape::lp {

/// Column oracle for a standard-form problem
///   maximize  c^T z   subject to  A z = b,  z >= 0.
/// Columns are generated on demand so that large structured problems
/// (grid constraints of a minimax fit) never need A in memory.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;
  virtual int rows() const = 0;
  virtual long cols() const = 0;
  virtual void column(long j, std::span<double> out) const = 0;
  virtual double cost(long j) const = 0;
  /// false for columns temporarily withdrawn from the problem.
  virtual bool active(long j) const { (void)j; return true; }
  /// d_j = c_j - pi . a_j for every column. The default builds each column;
  /// structured sources override it with a fast transform.
  virtual void reduced_costs(std::span<const double> pi, std::vector<double>& d) const;
  /// out = A v over the active columns (v has one entry per column).
  virtual void multiply(std::span<const double> v, std::span<double> out) const;
  /// out_j = a_j . y for active columns, 0 for the others.
  virtual void transpose_multiply(std::span<const double> y, std::span<double> out) const;
  /// out = A diag(w) A^T over the active columns, row-major rows() x rows().
  virtual void weighted_gram(std::span<const double> w, std::vector<double>& out) const;
};

/// Explicit dense matrix source (column-major A).
class DenseColumns final : public ColumnSource {
 public:
  DenseColumns(int rows, long cols, std::vector<double> a_colmajor, std::vector<double> cost);
  int rows() const override { return rows_; }
  long cols() const override { return cols_; }
  void column(long j, std::span<double> out) const override;
  double cost(long j) const override { return cost_[static_cast<std::size_t>(j)]; }

 private:
  int rows_;
  long cols_;
  std::vector<double> a_;
  std::vector<double> cost_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

struct Options {
  long max_iterations = 200000;
  double optimality_tol = 1e-11;  ///< relative to max |c_j|
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Rebuild B^{-1} from scratch after this many rank-one updates (0: auto).
  long reinvert_every = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after = 50;
};

struct Result {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  std::vector<long> basis;       ///< column index per row
  std::vector<double> x_basic;   ///< values of the basic variables
  std::vector<double> pi;        ///< simplex multipliers c_B^T B^{-1}
  /// Value of every column (interior point only; empty for the simplex).
  std::vector<double> x;
  long iterations = 0;
  long degenerate_pivots = 0;
  long reinversions = 0;
};

/// Revised primal simplex with an explicit dense B^{-1} updated by rank-one
/// eta steps and periodically reinverted. Dantzig pricing, smallest index on
/// ties, Bland's rule after a run of degenerate pivots. Deterministic.
///
/// `warm_basis` (one column per row) skips phase one when it is nonsingular
/// and primal feasible; otherwise phase one with artificial columns runs.
/// Throws NumericalFailure when a reinverted basis is numerically singular.
Result solve(const ColumnSource& src, std::span<const double> b, const Options& opts = {},
             const std::optional<std::vector<long>>& warm_basis = std::nullopt);

struct InteriorOptions {
  int max_iterations = 120;
  /// Relative primal, dual and gap tolerance.
  double tol = 1e-10;
  /// A stalled run still counts as optimal at this level.
  double accept_tol = 1e-5;
  /// Fraction of the step to the boundary.
  double step = 0.995;
};

/// Mehrotra predictor-corrector interior point method for the same
/// standard form, on the normal equations A D A^T (dense Cholesky of size
/// rows()). Result::basis is empty; Result::x holds the column values and
/// Result::pi the multipliers of the best iterate. Status is Optimal when its
/// relative residuals and gap are below accept_tol, IterationLimit
/// otherwise (which is also how infeasible or unbounded problems show up).
Result solve_interior(const ColumnSource& src, std::span<const double> b, const InteriorOptions& opts = {});

/// Dense inequality form with free variables:
///   minimize c^T x  subject to  A x <= b   (A row-major, m x n).
/// Solved through its dual in standard form. Throws NumericalFailure when
/// the problem is infeasible or unbounded.
struct InequalityResult {
  std::vector<double> x;
  double objective = 0.0;
  long iterations = 0;
};

InequalityResult solve_lp(std::span<const double> c, int m, std::span<const double> a_rowmajor,
                          std::span<const double> b, const Options& opts = {});

}  // namespace trigshape::lp
