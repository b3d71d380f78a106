#pragma once

#include <functional>
#include <vector>

#include <json.hpp>

#include "trigshape/trig_poly.hpp"

namespace trigshape {

/// 2s sign-change points per period, y_1 > y_2 > ... > y_2s in [-pi, pi),
/// extended to all integers by y_i = y_{i+2s} + 2 pi.
class PointSet {
 public:
  PointSet(int s, std::vector<double> points);

  int s() const noexcept { return s_; }
  const std::vector<double>& points() const noexcept { return points_; }
  /// Periodically extended y_i for any integer i (y(1) is the largest base point).
  double y(long i) const;
  bool is_equidistant(double tol = 1e-12) const;

 private:
  int s_;
  std::vector<double> points_;
};

/// y_i = pi + pi/(2s) - i pi/s, i = 1..2s.
PointSet make_equidistant(int s);

/// prod_i sin((x - y_i)/2).
double pi_eval(const PointSet& y, double x);

/// Degree-s interpolant of pi_eval at 4s+1 equispaced nodes.
TrigPoly pi_as_trigpoly(const PointSet& y);

/// I_0 = [-pi/(3s), pi/(3s)].
Interval central_interval(int s);

/// x_j = pi - j pi / nu.
inline double extremum(int nu, long j) { return kPi - static_cast<double>(j) * kPi / nu; }

enum class IntervalKind { TypeI, TypeII };

struct IntervalClass {
  int j = 0;
  /// [x_{2j+1}, x_{2j-1}] clipped to [-pi, pi].
  Interval interval;
  IntervalKind kind = IntervalKind::TypeII;
  /// Sign of Pi at x_{2j}: -1, 0 or 1.
  int pi_sign_at_center = 0;
};

/// Intervals j = 0..nu covering [-pi, pi]; TypeI when Y (with its 2 pi
/// translates) meets the open window (x_{2j+2}, x_{2j-2}).
std::vector<IntervalClass> classify_intervals(const PointSet& y, int nu);

inline constexpr double kMembershipTol = 1e-10;

struct MembershipReport {
  bool member = true;
  double worst_violation_x = 0.0;
  /// min over the grid of fprime * Pi.
  double worst_value = 0.0;
};

/// Grid test of fprime(x) Pi(x) >= -kMembershipTol on grid_n points of [-pi, pi].
MembershipReport delta1_membership(const std::function<double(double)>& fprime, const PointSet& y,
                                   int grid_n);

struct ViolationReport {
  double measure = 0.0;
  std::vector<Interval> intervals;
};

/// Sorted roots of q in `window` where q changes sign, located by a scan of
/// at least 8 deg q points, minimum polishing between samples and bisection
/// to 1e-12.
std::vector<double> sign_changes(const TrigPoly& q, const Interval& window);

/// {x in window : q(x) < 0} as a union of intervals.
ViolationReport negative_set(const TrigPoly& q, const Interval& window);

/// meas{x in [-pi, pi] : P'(x) Pi(x) < 0}.
ViolationReport violation_measure(const TrigPoly& p, const PointSet& y);

/// Total length of `set` lying outside the union of `excluded`.
double measure_outside(const std::vector<Interval>& set, const std::vector<Interval>& excluded);
/// Total length of `set` inside `window`.
double measure_inside(const std::vector<Interval>& set, const Interval& window);

void to_json(nlohmann::json& j, const PointSet& y);
PointSet point_set_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ViolationReport& v);

}  // namespace trigshape
