#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "trigshape/partition.hpp"
#include "trigshape/smoothness.hpp"
#include "trigshape/trig_poly.hpp"

namespace trigshape {

/// Largest odd integer not exceeding alpha; alpha < 1 is rejected.
long largest_odd(double alpha);

/// nu = largest_odd(b^{3/4} n) + 13.
int nu_for(int n, double b);

struct TruncationParams {
  int s = 2;
  int nu = 0;
  double b = 0.1;
  std::optional<int> n;

  /// Checks s even and positive, nu even with nu > 10 s, 0 < b < 1/2.
  void validate() const;
  static TruncationParams from_n(int s, int n, double b);

  double x(long j) const { return extremum(nu, j); }
  /// pi - (j + b) pi / nu and pi - (j - b) pi / nu.
  double x_l(long j) const;
  double x_r(long j) const;
  /// The same with b/2.
  double xbar_l(long j) const;
  double xbar_r(long j) const;
};

void to_json(nlohmann::json& j, const TruncationParams& p);
TruncationParams truncation_params_from_json(const nlohmann::json& j);

/// Piecewise function on [-pi, pi], extended periodically. Each piece is
/// scale * polys[poly] restricted to [breakpoints[i], breakpoints[i+1]], or
/// identically zero when poly < 0.
class PiecewiseTrig {
 public:
  struct Piece {
    int poly = -1;
    double scale = 1.0;
  };

  PiecewiseTrig() = default;
  PiecewiseTrig(std::vector<double> breakpoints, std::vector<Piece> pieces, std::vector<TrigPoly> polys);

  double operator()(double x) const;
  /// int_0^x of the function, exact up to round-off, valid on all of R
  /// (the period integral accumulates for |x| > pi).
  double integral_from_zero(double x) const;
  double integral(double lo, double hi) const;
  /// Integral over one period.
  double period_integral() const { return cumulative_.back(); }

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const std::vector<TrigPoly>& polys() const noexcept { return polys_; }
  /// Largest jump between adjacent pieces at interior breakpoints.
  double max_jump() const;

 private:
  std::size_t locate(double x) const;
  double piece_integral(std::size_t i, double lo, double hi) const;
  double cumulative_at(double x) const;

  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
  std::vector<TrigPoly> polys_;
  std::vector<double> cumulative_;
  double at_zero_ = 0.0;
};

void to_json(nlohmann::json& j, const PiecewiseTrig& p);
PiecewiseTrig piecewise_from_json(const nlohmann::json& j);

/// 2^{2s} (cos nu x + cos pi b) Pi(x), computed as a sampled product.
TrigPoly t_nu_b(const TruncationParams& p, const PointSet& y);

/// t_nu_b with cos nu x clipped below at -cos pi b: zero on the cores
/// (x_{j,l}, x_{j,r}) around odd j, equal to t_nu_b elsewhere.
PiecewiseTrig t_bar(const TruncationParams& p, const PointSet& y);

struct PositivityEntry {
  int j = 0;
  /// int over [x_{2j+1}, x_{2j-1}] of t_nu_b.
  double integral = 0.0;
  /// integral * sign Pi(x_{2j}); must be positive.
  double signed_integral = 0.0;
  bool ok = false;
};

/// One entry per TypeII interval. Throws ConstructionInfeasible listing the
/// failing j when `throw_on_failure` and any entry is not positive.
std::vector<PositivityEntry> check_integral_positivity(const TruncationParams& p, const PointSet& y,
                                                       bool throw_on_failure = true);

inline constexpr double kMjTol = 1e-12;

struct MjSolution {
  int j = 0;
  double m_j = 0.0;   ///< sup of |t_bar| on the interval
  double M_j = 0.0;
  double scale = 1.0;  ///< M_j / m_j when m_j > M_j, else 1
  double integral_t = 0.0;
  double integral_tbar = 0.0;
  double integral_g = 0.0;
  double residual = 0.0;  ///< |int g - int t|
};

/// Bisection on M in [0, 4] for the TypeII interval with index j.
MjSolution solve_Mj(const TruncationParams& p, const PointSet& y, int j);

/// Everything produced by one construction: t_nu_b, g, its antiderivative
/// f and the exact antiderivative T of t_nu_b.
class CounterexampleFunction {
 public:
  CounterexampleFunction(TruncationParams params, PointSet y, TrigPoly t, PiecewiseTrig g,
                         std::vector<IntervalClass> classes, std::vector<MjSolution> mj);

  const TruncationParams& params() const noexcept { return params_; }
  const PointSet& point_set() const noexcept { return y_; }
  const TrigPoly& t() const noexcept { return t_; }
  const TrigPoly& T() const noexcept { return T_; }
  const PiecewiseTrig& g() const noexcept { return g_; }
  const std::vector<IntervalClass>& classes() const noexcept { return classes_; }
  const std::vector<MjSolution>& mj_table() const noexcept { return mj_; }

  double f(double x) const { return g_.integral_from_zero(x); }
  double g_at(double x) const { return g_(x); }
  /// f(pi) - f(-pi) = int_{-pi}^{pi} g.
  double period_residual() const { return g_.period_integral(); }

  /// f as a PeriodicFunction carrying its breakpoints and frequency.
  PeriodicFunction as_function() const;
  PeriodicFunction derivative_function() const;

 private:
  TruncationParams params_;
  PointSet y_;
  TrigPoly t_;
  TrigPoly T_;
  PiecewiseTrig g_;
  std::vector<IntervalClass> classes_;
  std::vector<MjSolution> mj_;
};

void to_json(nlohmann::json& j, const CounterexampleFunction& f);
CounterexampleFunction counterexample_from_json(const nlohmann::json& j);

/// g = t_bar on TypeI intervals and the rebalanced g_{j,M_j} on TypeII ones.
PiecewiseTrig build_g(const TruncationParams& p, const PointSet& y);

/// Full construction; f(x) = int_0^x g.
CounterexampleFunction build_f(const TruncationParams& p, const PointSet& y);

/// Antiderivative of t_nu_b with T(0) = 0.
TrigPoly build_T(const TruncationParams& p, const PointSet& y);

struct DescentReport {
  Interval middle_third;
  double measure = 0.0;
  double c7 = 0.0;
};

/// meas{x in middle third of J : T'(x) < -9 b^2 / 4} and the implied
/// C_7 = measure / (b |J|).
DescentReport descent_set_measure(const TruncationParams& p, const PointSet& y, const Interval& J);

/// b^2 |J| / (pi n) - (C4 / n) (b^{9/4} + b |E| + b^{5/4} / n).
double lemma21_rhs(double b, int n, double j_len, double e_measure, double c4);

}  // namespace trigshape
