#include "trigshape/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trigshape/errors.hpp"
#include "trigshape/fourier.hpp"
#include "trigshape/scan.hpp"

namespace trigshape {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("Interval: need finite lo <= hi");
  }
  if (hi - lo > kTwoPi * (1.0 + 1e-12)) {
    throw DomainError("Interval: longer than one period");
  }
}

TrigPoly::TrigPoly() : TrigPoly(0) {}

TrigPoly::TrigPoly(int degree) {
  if (degree < 0) throw DomainError("TrigPoly: negative degree");
  a_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
  b_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
  finalize();
}

TrigPoly::TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : a_(std::move(cos_coeffs)) {
  if (a_.empty()) a_.push_back(0.0);
  if (sin_coeffs.size() > a_.size() - 1) {
    throw DomainError("TrigPoly: more sine than cosine coefficients");
  }
  b_.assign(a_.size(), 0.0);
  std::copy(sin_coeffs.begin(), sin_coeffs.end(), b_.begin() + 1);
  finalize();
}

void TrigPoly::finalize() {
  for (std::size_t j = 0; j < a_.size(); ++j) {
    if (!std::isfinite(a_[j]) || !std::isfinite(b_[j])) {
      throw DomainError("TrigPoly: non-finite coefficient");
    }
  }
  support_.clear();
  for (std::size_t j = 1; j < a_.size(); ++j) {
    if (a_[j] != 0.0 || b_[j] != 0.0) support_.push_back(static_cast<int>(j));
  }
  sparse_ = support_.size() * 4 < a_.size();
}

TrigPoly TrigPoly::constant(double c) { return TrigPoly({c}, {}); }

TrigPoly TrigPoly::cosine(int k, double amplitude) {
  if (k < 0) throw DomainError("cosine: negative frequency");
  std::vector<double> a(static_cast<std::size_t>(k) + 1, 0.0);
  a[static_cast<std::size_t>(k)] = amplitude;
  return TrigPoly(std::move(a), {});
}

TrigPoly TrigPoly::sine(int k, double amplitude) {
  if (k < 1) throw DomainError("sine: frequency must be positive");
  std::vector<double> a(static_cast<std::size_t>(k) + 1, 0.0);
  std::vector<double> b(static_cast<std::size_t>(k), 0.0);
  b[static_cast<std::size_t>(k) - 1] = amplitude;
  return TrigPoly(std::move(a), std::move(b));
}

std::vector<double> TrigPoly::sin_coeffs() const { return {b_.begin() + 1, b_.end()}; }

double TrigPoly::operator()(double x) const {
  double sum = a_[0];
  if (sparse_) {
    for (int j : support_) {
      const double jx = j * x;
      sum += a_[static_cast<std::size_t>(j)] * std::cos(jx) + b_[static_cast<std::size_t>(j)] * std::sin(jx);
    }
    return sum;
  }
  // Rotation recurrence for (cos jx, sin jx), re-anchored every 128 steps to
  // keep the accumulated phase error at round-off level.
  const double c1 = std::cos(x);
  const double s1 = std::sin(x);
  double c = 1.0;
  double s = 0.0;
  const std::size_t n = a_.size();
  for (std::size_t j = 1; j < n; ++j) {
    if (j % 128 == 0) {
      const double jx = static_cast<double>(j) * x;
      c = std::cos(jx);
      s = std::sin(jx);
    } else {
      const double cn = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = cn;
    }
    sum += a_[j] * c + b_[j] * s;
  }
  return sum;
}

TrigPoly TrigPoly::with_degree(int degree) const {
  if (degree < 0) throw DomainError("with_degree: negative degree");
  TrigPoly r(degree);
  const std::size_t m = std::min(a_.size(), r.a_.size());
  std::copy_n(a_.begin(), m, r.a_.begin());
  std::copy_n(b_.begin(), m, r.b_.begin());
  r.finalize();
  return r;
}

double TrigPoly::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (std::size_t j = 0; j < a_.size(); ++j) m = std::max({m, std::abs(a_[j]), std::abs(b_[j])});
  return m;
}

TrigPoly TrigPoly::chopped(double rel_tol) const {
  TrigPoly r = *this;
  const double cut = rel_tol * max_abs_coeff();
  for (std::size_t j = 0; j < a_.size(); ++j) {
    if (std::abs(r.a_[j]) < cut) r.a_[j] = 0.0;
    if (std::abs(r.b_[j]) < cut) r.b_[j] = 0.0;
  }
  r.finalize();
  return r;
}

TrigPoly TrigPoly::plus_constant(double c) const {
  TrigPoly r = *this;
  r.a_[0] += c;
  r.finalize();
  return r;
}

TrigPoly operator+(const TrigPoly& p, const TrigPoly& q) {
  TrigPoly r = p.with_degree(std::max(p.degree(), q.degree()));
  for (std::size_t j = 0; j < q.a_.size(); ++j) {
    r.a_[j] += q.a_[j];
    r.b_[j] += q.b_[j];
  }
  r.finalize();
  return r;
}

TrigPoly operator-(const TrigPoly& p, const TrigPoly& q) { return p + (-1.0) * q; }

TrigPoly operator*(double s, const TrigPoly& p) {
  TrigPoly r = p;
  for (std::size_t j = 0; j < r.a_.size(); ++j) {
    r.a_[j] *= s;
    r.b_[j] *= s;
  }
  r.finalize();
  return r;
}

double eval(const TrigPoly& p, double x) { return p(x); }

TrigPoly derivative(const TrigPoly& p) {
  const int n = p.degree();
  std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> b(static_cast<std::size_t>(n), 0.0);
  for (int j : p.support()) {
    a[static_cast<std::size_t>(j)] = j * p.b(j);
    b[static_cast<std::size_t>(j) - 1] = -j * p.a(j);
  }
  return TrigPoly(std::move(a), std::move(b));
}

TrigPoly derivative(const TrigPoly& p, int order) {
  if (order < 0) throw DomainError("derivative: negative order");
  TrigPoly r = p;
  for (int k = 0; k < order; ++k) r = derivative(r);
  return r;
}

TrigPoly antiderivative(const TrigPoly& p, double mean_tol) {
  if (std::abs(p.a(0)) > mean_tol) {
    throw NonZeroMean("antiderivative: constant term " + std::to_string(p.a(0)) + " is not zero");
  }
  const int n = p.degree();
  std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> b(static_cast<std::size_t>(n), 0.0);
  double at_zero = 0.0;
  for (int j : p.support()) {
    a[static_cast<std::size_t>(j)] = -p.b(j) / j;
    b[static_cast<std::size_t>(j) - 1] = p.a(j) / j;
    at_zero += a[static_cast<std::size_t>(j)];
  }
  a[0] = -at_zero;
  return TrigPoly(std::move(a), std::move(b));
}

TrigPoly multiply(const TrigPoly& p, const TrigPoly& q) {
  const int deg = p.degree() + q.degree();
  const auto n = static_cast<std::size_t>(2 * deg + 2);
  auto vp = fourier::evaluate_grid_fft(p.with_degree(deg), n);
  const auto vq = fourier::evaluate_grid_fft(q.with_degree(deg), n);
  for (std::size_t k = 0; k < n; ++k) vp[k] *= vq[k];
  return fourier::interpolate(vp, deg);
}

double integral(const TrigPoly& p, double lo, double hi) {
  double sum = p.a(0) * (hi - lo);
  for (int j : p.support()) {
    const double a = p.a(j);
    const double b = p.b(j);
    // Differences of sin/cos via product formulas to avoid cancellation on
    // short intervals.
    const double half = 0.5 * j * (hi - lo);
    const double mid = 0.5 * j * (hi + lo);
    const double dsin = 2.0 * std::cos(mid) * std::sin(half);
    const double dcos = -2.0 * std::sin(mid) * std::sin(half);
    sum += (a * dsin - b * dcos) / j;
  }
  return sum;
}

namespace {

std::size_t scan_points(const TrigPoly& p, const SupNormOptions& opts) {
  return static_cast<std::size_t>(
      std::max(opts.min_points, opts.points_per_degree * std::max(p.degree(), 1)) + 1);
}

template <class Transform>
scan::Peak scan_poly(const TrigPoly& p, const Interval& interval, const SupNormOptions& opts,
                     Transform tr) {
  const std::size_t n = scan_points(p, opts);
  std::vector<double> values;
  if (interval.length() >= kTwoPi * (1.0 - 1e-14) && p.degree() > 8) {
    values = fourier::evaluate_grid(p, n - 1, interval.lo);
    values.push_back(values.front());
  } else {
    values.resize(n);
    const double step = interval.length() / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) values[i] = p(interval.lo + step * static_cast<double>(i));
  }
  for (double& v : values) v = tr(v);
  const double vmax = *std::max_element(values.begin(), values.end());
  const double vmin = *std::min_element(values.begin(), values.end());
  const double slack = 0.2 * std::max(std::abs(vmax), vmax - vmin) + 1e-300;
  auto f = [&](double x) { return tr(p(x)); };
  scan::Peak best = scan::polish_grid_max(f, interval.lo, interval.hi, values, slack);
  return best;
}

}  // namespace

double sup_norm(const TrigPoly& p, const Interval& interval, const SupNormOptions& opts) {
  if (p.support().empty()) return std::abs(p.a(0));
  return scan_poly(p, interval, opts, [](double v) { return std::abs(v); }).value;
}

double sup_norm(const TrigPoly& p) { return sup_norm(p, Interval::period()); }

double max_value(const TrigPoly& p, const Interval& interval, const SupNormOptions& opts) {
  if (p.support().empty()) return p.a(0);
  return scan_poly(p, interval, opts, [](double v) { return v; }).value;
}

InequalityReport check_bernstein(const TrigPoly& p, int k) {
  if (k < 1) throw DomainError("check_bernstein: k must be >= 1");
  InequalityReport r;
  r.lhs = sup_norm(derivative(p, k));
  r.rhs = std::pow(static_cast<double>(p.degree()), k) * sup_norm(p);
  r.holds = r.lhs <= r.rhs * (1.0 + kTheoremTol) + kTheoremTol * 1e-3;
  return r;
}

InequalityReport check_privalov(const TrigPoly& p, double h) {
  if (!(h > 0.0 && h <= kPi)) throw DomainError("check_privalov: h must lie in (0, pi]");
  InequalityReport r;
  r.lhs = sup_norm(derivative(p), Interval(-0.5 * h, 0.5 * h));
  r.rhs = p.degree() / std::sin(0.5 * h) * sup_norm(p, Interval(-h, h));
  r.holds = r.lhs <= r.rhs * (1.0 + kTheoremTol) + kTheoremTol * 1e-3;
  return r;
}

void to_json(nlohmann::json& j, const TrigPoly& p) {
  j = nlohmann::json{{"degree", p.degree()},
                     {"cos_coeffs", std::vector<double>(p.cos_coeffs().begin(), p.cos_coeffs().end())},
                     {"sin_coeffs", p.sin_coeffs()}};
}

void from_json(const nlohmann::json& j, TrigPoly& p) {
  auto a = j.at("cos_coeffs").get<std::vector<double>>();
  auto b = j.at("sin_coeffs").get<std::vector<double>>();
  const int degree = j.at("degree").get<int>();
  if (static_cast<int>(a.size()) != degree + 1 || static_cast<int>(b.size()) != degree) {
    throw DomainError("TrigPoly JSON: coefficient counts do not match degree");
  }
  p = TrigPoly(std::move(a), std::move(b));
}

}  // namespace trigshape
