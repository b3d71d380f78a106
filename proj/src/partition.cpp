#include "trigshape/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trigshape/errors.hpp"
#include "trigshape/fourier.hpp"
#include "trigshape/scan.hpp"

namespace trigshape {

PointSet::PointSet(int s, std::vector<double> points) : s_(s), points_(std::move(points)) {
  if (s < 1) throw DomainError("PointSet: s must be positive");
  if (points_.size() != static_cast<std::size_t>(2 * s)) {
    throw DomainError("PointSet: need exactly 2s points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw DomainError("PointSet: non-finite point");
    if (i > 0 && !(points_[i] < points_[i - 1])) {
      throw DomainError("PointSet: points must be strictly decreasing");
    }
  }
  if (!(points_.back() >= -kPi && points_.front() < kPi)) {
    throw DomainError("PointSet: points must lie in [-pi, pi)");
  }
}

double PointSet::y(long i) const {
  const long m = 2L * s_;
  // i = base + k m with base in 1..m; y_i = y_base - 2 pi k
  long k = (i - 1) / m;
  if ((i - 1) % m < 0) --k;
  const long base = i - k * m;
  return points_[static_cast<std::size_t>(base - 1)] - kTwoPi * static_cast<double>(k);
}

bool PointSet::is_equidistant(double tol) const {
  const PointSet ref = make_equidistant(s_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (std::abs(points_[i] - ref.points_[i]) > tol) return false;
  }
  return true;
}

PointSet make_equidistant(int s) {
  if (s < 1) throw DomainError("make_equidistant: s must be positive");
  std::vector<double> pts(static_cast<std::size_t>(2 * s));
  for (int i = 1; i <= 2 * s; ++i) {
    pts[static_cast<std::size_t>(i - 1)] = kPi + kPi / (2.0 * s) - i * kPi / s;
  }
  return PointSet(s, std::move(pts));
}

double pi_eval(const PointSet& y, double x) {
  double prod = 1.0;
  for (double yi : y.points()) prod *= std::sin(0.5 * (x - yi));
  return prod;
}

TrigPoly pi_as_trigpoly(const PointSet& y) {
  const int s = y.s();
  const std::size_t n = static_cast<std::size_t>(4 * s + 1);
  std::vector<double> samples(n);
  for (std::size_t k = 0; k < n; ++k) {
    samples[k] = pi_eval(y, kTwoPi * static_cast<double>(k) / static_cast<double>(n));
  }
  return fourier::interpolate(samples, s);
}

Interval central_interval(int s) {
  if (s < 1) throw DomainError("central_interval: s must be positive");
  return {-kPi / (3.0 * s), kPi / (3.0 * s)};
}

std::vector<IntervalClass> classify_intervals(const PointSet& y, int nu) {
  const int s = y.s();
  if (nu % 2 != 0) throw DomainError("classify_intervals: nu must be even");
  if (nu <= 10 * s) throw DomainError("classify_intervals: need nu > 10 s");
  std::vector<double> pts;
  for (double p : y.points()) {
    pts.push_back(p - kTwoPi);
    pts.push_back(p);
    pts.push_back(p + kTwoPi);
  }
  std::vector<IntervalClass> out;
  out.reserve(static_cast<std::size_t>(nu) + 1);
  for (int j = 0; j <= nu; ++j) {
    IntervalClass c;
    c.j = j;
    const double lo = std::max(extremum(nu, 2L * j + 1), -kPi);
    const double hi = std::min(extremum(nu, 2L * j - 1), kPi);
    c.interval = Interval(lo, hi);
    const double wlo = extremum(nu, 2L * j + 2);
    const double whi = extremum(nu, 2L * j - 2);
    const bool hit = std::any_of(pts.begin(), pts.end(), [&](double p) { return wlo < p && p < whi; });
    c.kind = hit ? IntervalKind::TypeI : IntervalKind::TypeII;
    const double pc = pi_eval(y, extremum(nu, 2L * j));
    c.pi_sign_at_center = pc > 0 ? 1 : (pc < 0 ? -1 : 0);
    out.push_back(c);
  }
  return out;
}

MembershipReport delta1_membership(const std::function<double(double)>& fprime, const PointSet& y,
                                   int grid_n) {
  if (grid_n < 1000) throw DomainError("delta1_membership: grid_n must be at least 1000");
  MembershipReport r;
  r.worst_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_n; ++k) {
    const double x = -kPi + kTwoPi * k / grid_n;
    const double v = fprime(x) * pi_eval(y, x);
    if (v < r.worst_value) {
      r.worst_value = v;
      r.worst_violation_x = x;
    }
  }
  r.member = r.worst_value >= -kMembershipTol;
  return r;
}

namespace {

constexpr double kRootTol = 1e-12;

double bisect_root(const TrigPoly& q, double a, double b) {
  bool neg_a = q(a) < 0.0;
  while (b - a > kRootTol) {
    const double m = 0.5 * (a + b);
    if ((q(m) < 0.0) == neg_a) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> sign_changes(const TrigPoly& q, const Interval& window) {
  std::vector<double> roots;
  if (q.support().empty() || window.length() <= 0.0) return roots;
  const int deg = std::max(q.degree(), 1);
  const double frac = window.length() / kTwoPi;
  const auto n = static_cast<std::size_t>(
      std::max(64.0, 8.0 * deg * std::max(frac, 1.0 / 8.0)) + 1);
  std::vector<double> v;
  if (frac >= 1.0 - 1e-14 && deg > 8) {
    v = fourier::evaluate_grid(q, n - 1, window.lo);
    v.push_back(q(window.hi));
  } else {
    v.resize(n);
    const double step = window.length() / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = q(window.lo + step * static_cast<double>(i));
  }
  const double step = window.length() / static_cast<double>(n - 1);
  auto xat = [&](std::size_t i) {
    return i + 1 == n ? window.hi : window.lo + step * static_cast<double>(i);
  };
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  // A sampled extremum this close to zero may hide a pair of roots inside
  // its neighbouring cells: |q''| <= deg^2 ||q|| bounds the hidden excursion.
  const double dip = 0.5 * vmax * std::pow(deg * step, 2) / std::pow(kPi / 4.0, 2);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((v[i] < 0.0) != (v[i + 1] < 0.0)) roots.push_back(bisect_root(q, xat(i), xat(i + 1)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(v[i]) > dip) continue;
    const bool neg = v[i] < 0.0;
    const double l = i == 0 ? v[i] : v[i - 1];
    const double r = i + 1 == n ? v[i] : v[i + 1];
    // Nonnegative local minimum or negative local maximum.
    const bool candidate = neg ? (v[i] >= l && v[i] >= r) : (v[i] <= l && v[i] <= r);
    if (!candidate) continue;
    const double a = i == 0 ? xat(0) : xat(i - 1);
    const double b = i + 1 == n ? xat(n - 1) : xat(i + 1);
    const double sgn = neg ? 1.0 : -1.0;
    const scan::Peak pk = scan::golden_max([&](double x) { return sgn * q(x); }, a, b, 1e-15);
    const double val = sgn * pk.value;
    if ((val < 0.0) == neg) continue;
    const double la = q(a), rb = q(b);
    if ((la < 0.0) == neg) roots.push_back(bisect_root(q, a, pk.x));
    if ((rb < 0.0) == neg) roots.push_back(bisect_root(q, pk.x, b));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) <= 2.0 * kRootTol; }),
              roots.end());
  return roots;
}

ViolationReport negative_set(const TrigPoly& q, const Interval& window) {
  ViolationReport rep;
  std::vector<double> cuts{window.lo};
  for (double r : sign_changes(q, window)) {
    if (r > window.lo && r < window.hi) cuts.push_back(r);
  }
  cuts.push_back(window.hi);
  // Round-off in the coefficients splits a double root into two close
  // simple roots enclosing a sliver where |q| stays at noise level. Such
  // slivers inherit the sign of their neighbours.
  double coef_sum = std::abs(q.a(0));
  for (int j : q.support()) coef_sum += std::abs(q.a(j)) + std::abs(q.b(j));
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * coef_sum;
  const std::size_t m = cuts.size() - 1;
  std::vector<int> sign(m, 0);  // -1 negative, 1 nonnegative, 0 undecided
  for (std::size_t i = 0; i < m; ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double mid = q(0.5 * (a + b));
    bool sliver = false;
    if (b - a < 1e-5 && std::abs(mid) <= noise) {
      sliver = true;
      for (int k = 1; k <= 4 && sliver; ++k) sliver = std::abs(q(a + (b - a) * k / 5.0)) <= noise;
    }
    if (!sliver) sign[i] = mid < 0.0 ? -1 : 1;
  }
  int last = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sign[i] != 0) {
      last = sign[i];
    } else if (last != 0) {
      sign[i] = last;
    }
  }
  for (std::size_t i = m; i-- > 0;) {
    if (sign[i] != 0) {
      last = sign[i];
    } else {
      sign[i] = last != 0 ? last : (q(0.5 * (cuts[i] + cuts[i + 1])) < 0.0 ? -1 : 1);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a || sign[i] > 0) continue;
    if (!rep.intervals.empty() && rep.intervals.back().hi >= a) {
      rep.intervals.back().hi = b;
    } else {
      rep.intervals.emplace_back(a, b);
    }
  }
  for (const auto& iv : rep.intervals) rep.measure += iv.length();
  return rep;
}

ViolationReport violation_measure(const TrigPoly& p, const PointSet& y) {
  const TrigPoly q = multiply(derivative(p), pi_as_trigpoly(y));
  return negative_set(q, Interval::period());
}

namespace {

std::vector<Interval> merged(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

}  // namespace

double measure_inside(const std::vector<Interval>& set, const Interval& window) {
  double m = 0.0;
  for (const auto& iv : set) m += std::max(0.0, std::min(iv.hi, window.hi) - std::max(iv.lo, window.lo));
  return m;
}

double measure_outside(const std::vector<Interval>& set, const std::vector<Interval>& excluded) {
  const auto ex = merged(excluded);
  double m = 0.0;
  for (const auto& iv : set) {
    double inside = 0.0;
    for (const auto& e : ex) inside += std::max(0.0, std::min(iv.hi, e.hi) - std::max(iv.lo, e.lo));
    m += iv.length() - inside;
  }
  return std::max(m, 0.0);
}

void to_json(nlohmann::json& j, const PointSet& y) {
  j = nlohmann::json{{"s", y.s()}, {"points", y.points()}};
}

PointSet point_set_from_json(const nlohmann::json& j) {
  return PointSet(j.at("s").get<int>(), j.at("points").get<std::vector<double>>());
}

void to_json(nlohmann::json& j, const ViolationReport& v) {
  nlohmann::json ivs = nlohmann::json::array();
  for (const auto& iv : v.intervals) ivs.push_back({iv.lo, iv.hi});
  j = nlohmann::json{{"measure", v.measure}, {"intervals", ivs}};
}

}  // namespace trigshape
