#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

namespace trigshape {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Closed interval [lo, hi] of radians, at most one period long.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_);

  double length() const noexcept { return hi - lo; }
  double center() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  static Interval period() { return {-kPi, kPi}; }
};

/// Coefficient-form trigonometric polynomial
///   p(x) = a_0 + sum_{j=1..n} (a_j cos jx + b_j sin jx).
///
/// Immutable value type. The declared degree is the storage degree; trailing
/// zero coefficients are allowed. Evaluation switches to a direct sum over
/// the nonzero frequencies when the coefficient vector is sparse.
class TrigPoly {
 public:
  TrigPoly();
  explicit TrigPoly(int degree);
  /// `cos_coeffs` holds a_0..a_n, `sin_coeffs` holds b_1..b_n.
  TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

  static TrigPoly constant(double c);
  static TrigPoly cosine(int k, double amplitude = 1.0);
  static TrigPoly sine(int k, double amplitude = 1.0);

  int degree() const noexcept { return static_cast<int>(a_.size()) - 1; }
  double a(int j) const { return a_.at(static_cast<std::size_t>(j)); }
  /// b(0) is always 0.
  double b(int j) const { return b_.at(static_cast<std::size_t>(j)); }
  std::span<const double> cos_coeffs() const noexcept { return a_; }
  /// b_1..b_n.
  std::vector<double> sin_coeffs() const;
  /// Indices j >= 1 with a nonzero cosine or sine coefficient.
  std::span<const int> support() const noexcept { return support_; }

  double operator()(double x) const;

  TrigPoly with_degree(int degree) const;
  double max_abs_coeff() const noexcept;
  /// Zeroes every coefficient below `rel_tol * max_abs_coeff()`.
  TrigPoly chopped(double rel_tol) const;
  TrigPoly plus_constant(double c) const;

  friend TrigPoly operator+(const TrigPoly& p, const TrigPoly& q);
  friend TrigPoly operator-(const TrigPoly& p, const TrigPoly& q);
  friend TrigPoly operator*(double s, const TrigPoly& p);

 private:
  void finalize();

  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<int> support_;
  bool sparse_ = false;
};

double eval(const TrigPoly& p, double x);
TrigPoly derivative(const TrigPoly& p);
TrigPoly derivative(const TrigPoly& p, int order);

inline constexpr double kMeanTol = 1e-12;

/// Periodic antiderivative q with q(0) = 0. Throws NonZeroMean when
/// |a_0| > mean_tol.
TrigPoly antiderivative(const TrigPoly& p, double mean_tol = kMeanTol);

/// Product computed by sampling both factors on an equispaced grid of
/// 2(deg p + deg q) + 2 points and inverting the discrete Fourier transform.
TrigPoly multiply(const TrigPoly& p, const TrigPoly& q);

/// Exact integral of p over [lo, hi].
double integral(const TrigPoly& p, double lo, double hi);

struct SupNormOptions {
  int points_per_degree = 16;
  int min_points = 64;
};

/// max |p| on `interval`, grid scan followed by golden-section polish of
/// every near-maximal grid peak.
double sup_norm(const TrigPoly& p, const Interval& interval, const SupNormOptions& opts = {});
double sup_norm(const TrigPoly& p);

/// max p (signed) on `interval`.
double max_value(const TrigPoly& p, const Interval& interval, const SupNormOptions& opts = {});

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

inline constexpr double kTheoremTol = 1e-9;

/// ||p^(k)|| <= (deg p)^k ||p||.
InequalityReport check_bernstein(const TrigPoly& p, int k);
/// ||p'||_[-h/2,h/2] <= (deg p / sin(h/2)) ||p||_[-h,h], 0 < h <= pi.
InequalityReport check_privalov(const TrigPoly& p, double h);

void to_json(nlohmann::json& j, const TrigPoly& p);
void from_json(const nlohmann::json& j, TrigPoly& p);

}  // namespace trigshape
