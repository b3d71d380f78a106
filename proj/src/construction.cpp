#include "trigshape/construction.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <string>

#include "trigshape/errors.hpp"
#include "trigshape/scan.hpp"

namespace trigshape {

long largest_odd(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw DomainError("largest_odd: argument must be at least 1");
  }
  auto k = static_cast<long>(std::floor(alpha));
  if (k % 2 == 0) --k;
  return k;
}

int nu_for(int n, double b) {
  if (n < 1) throw DomainError("nu_for: n must be positive");
  if (!(b > 0.0 && b < 0.5)) throw DomainError("nu_for: b must lie in (0, 1/2)");
  return static_cast<int>(largest_odd(std::pow(b, 0.75) * n) + 13);
}

void TruncationParams::validate() const {
  if (s < 1 || s % 2 != 0) throw DomainError("TruncationParams: s must be a positive even integer");
  if (nu % 2 != 0) throw DomainError("TruncationParams: nu must be even");
  if (nu <= 10 * s) {
    throw DomainError("TruncationParams: need nu > 10 s (nu = " + std::to_string(nu) +
                      ", s = " + std::to_string(s) + ")");
  }
  if (!(b > 0.0 && b < 0.5)) throw DomainError("TruncationParams: b must lie in (0, 1/2)");
  if (n && nu != nu_for(*n, b)) throw DomainError("TruncationParams: nu does not match n and b");
}

TruncationParams TruncationParams::from_n(int s, int n, double b) {
  TruncationParams p;
  p.s = s;
  p.b = b;
  p.n = n;
  p.nu = nu_for(n, b);
  p.validate();
  return p;
}

double TruncationParams::x_l(long j) const { return kPi - (static_cast<double>(j) + b) * kPi / nu; }
double TruncationParams::x_r(long j) const { return kPi - (static_cast<double>(j) - b) * kPi / nu; }
double TruncationParams::xbar_l(long j) const {
  return kPi - (static_cast<double>(j) + 0.5 * b) * kPi / nu;
}
double TruncationParams::xbar_r(long j) const {
  return kPi - (static_cast<double>(j) - 0.5 * b) * kPi / nu;
}

void to_json(nlohmann::json& j, const TruncationParams& p) {
  j = nlohmann::json{{"s", p.s}, {"nu", p.nu}, {"b", p.b}};
  if (p.n) j["n"] = *p.n;
}

TruncationParams truncation_params_from_json(const nlohmann::json& j) {
  TruncationParams p;
  p.s = j.at("s").get<int>();
  p.nu = j.at("nu").get<int>();
  p.b = j.at("b").get<double>();
  if (j.contains("n")) p.n = j.at("n").get<int>();
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

PiecewiseTrig::PiecewiseTrig(std::vector<double> breakpoints, std::vector<Piece> pieces,
                             std::vector<TrigPoly> polys)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), polys_(std::move(polys)) {
  if (pieces_.empty() || breakpoints_.size() != pieces_.size() + 1) {
    throw DomainError("PiecewiseTrig: need one more breakpoint than pieces");
  }
  if (std::abs(breakpoints_.front() + kPi) > 1e-12 || std::abs(breakpoints_.back() - kPi) > 1e-12) {
    throw DomainError("PiecewiseTrig: breakpoints must span [-pi, pi]");
  }
  breakpoints_.front() = -kPi;
  breakpoints_.back() = kPi;
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] >= breakpoints_[i - 1])) {
      throw DomainError("PiecewiseTrig: breakpoints must be sorted");
    }
  }
  for (const auto& pc : pieces_) {
    if (pc.poly >= static_cast<int>(polys_.size())) throw DomainError("PiecewiseTrig: bad poly index");
  }
  cumulative_.assign(breakpoints_.size(), 0.0);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + piece_integral(i, breakpoints_[i], breakpoints_[i + 1]);
  }
  at_zero_ = cumulative_at(0.0);
}

std::size_t PiecewiseTrig::locate(double x) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::size_t i = it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return std::min(i, pieces_.size() - 1);
}

double PiecewiseTrig::piece_integral(std::size_t i, double lo, double hi) const {
  const Piece& pc = pieces_[i];
  if (pc.poly < 0 || hi == lo) return 0.0;
  return pc.scale * trigshape::integral(polys_[static_cast<std::size_t>(pc.poly)], lo, hi);
}

double PiecewiseTrig::cumulative_at(double x) const {
  const std::size_t i = locate(x);
  return cumulative_[i] + piece_integral(i, breakpoints_[i], x);
}

namespace {

double wrap_period(double x, double* turns = nullptr) {
  const double m = std::floor((x + kPi) / kTwoPi);
  double r = x - kTwoPi * m;
  if (r >= kPi) {
    r -= kTwoPi;
  }
  if (turns != nullptr) *turns = m;
  return r;
}

}  // namespace

double PiecewiseTrig::operator()(double x) const {
  if (x < -kPi || x > kPi) x = wrap_period(x);
  const std::size_t i = locate(x);
  const Piece& pc = pieces_[i];
  if (pc.poly < 0) return 0.0;
  return pc.scale * polys_[static_cast<std::size_t>(pc.poly)](x);
}

double PiecewiseTrig::integral_from_zero(double x) const {
  if (x >= -kPi && x <= kPi) return cumulative_at(x) - at_zero_;
  double turns = 0.0;
  const double r = wrap_period(x, &turns);
  return cumulative_at(r) - at_zero_ + turns * period_integral();
}

double PiecewiseTrig::integral(double lo, double hi) const {
  return integral_from_zero(hi) - integral_from_zero(lo);
}

double PiecewiseTrig::max_jump() const {
  double jump = 0.0;
  for (std::size_t i = 1; i + 1 < breakpoints_.size(); ++i) {
    const double x = breakpoints_[i];
    auto value = [&](std::size_t k) {
      const Piece& pc = pieces_[k];
      return pc.poly < 0 ? 0.0 : pc.scale * polys_[static_cast<std::size_t>(pc.poly)](x);
    };
    jump = std::max(jump, std::abs(value(i) - value(i - 1)));
  }
  return jump;
}

void to_json(nlohmann::json& j, const PiecewiseTrig& p) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& pc : p.pieces()) pieces.push_back({{"poly", pc.poly}, {"scale", pc.scale}});
  j = nlohmann::json{{"breakpoints", p.breakpoints()}, {"pieces", pieces}, {"polys", p.polys()}};
}

PiecewiseTrig piecewise_from_json(const nlohmann::json& j) {
  std::vector<PiecewiseTrig::Piece> pieces;
  for (const auto& pc : j.at("pieces")) {
    pieces.push_back({pc.at("poly").get<int>(), pc.at("scale").get<double>()});
  }
  return PiecewiseTrig(j.at("breakpoints").get<std::vector<double>>(), std::move(pieces),
                       j.at("polys").get<std::vector<TrigPoly>>());
}

// ---------------------------------------------------------------------------

namespace {

void require_equidistant(const TruncationParams& p, const PointSet& y) {
  p.validate();
  if (y.s() != p.s || !y.is_equidistant()) {
    throw DomainError("construction: the point set must be the equidistant one with matching s");
  }
}

// Breakpoints -pi, then x_{k,l}, x_k, x_{k,r} for odd k = 2 nu - 1, ..., 1,
// then pi. The nonzero piece right of x_{2j+1,r} belongs to interval j, so
// interval scales are indexed by j = nu, nu - 1, ..., 0 in ascending x.
PiecewiseTrig zone_layout(const TruncationParams& p, const TrigPoly& t, const std::vector<double>& scale) {
  std::vector<double> bp{-kPi};
  std::vector<PiecewiseTrig::Piece> pieces;
  pieces.push_back({0, scale[static_cast<std::size_t>(p.nu)]});
  for (long k = 2L * p.nu - 1; k >= 1; k -= 2) {
    bp.push_back(p.x_l(k));
    pieces.push_back({-1, 1.0});
    bp.push_back(p.x(k));
    pieces.push_back({-1, 1.0});
    bp.push_back(p.x_r(k));
    pieces.push_back({0, scale[static_cast<std::size_t>((k - 1) / 2)]});
  }
  bp.push_back(kPi);
  return PiecewiseTrig(std::move(bp), std::move(pieces), {t});
}

Interval interval_of(const TruncationParams& p, int j) {
  return {std::max(p.x(2L * j + 1), -kPi), std::min(p.x(2L * j - 1), kPi)};
}

Interval nonzero_part(const TruncationParams& p, int j) {
  return {std::max(p.x_r(2L * j + 1), -kPi), std::min(p.x_l(2L * j - 1), kPi)};
}

}  // namespace

TrigPoly t_nu_b(const TruncationParams& p, const PointSet& y) {
  require_equidistant(p, y);
  const TrigPoly shifted = TrigPoly::cosine(p.nu).plus_constant(std::cos(kPi * p.b));
  const TrigPoly prod = std::ldexp(1.0, 2 * p.s) * multiply(shifted, pi_as_trigpoly(y));
  // The product has 3 nonzero frequencies; drop the sampling round-off so
  // evaluation takes the sparse path.
  return prod.chopped(1e-14);
}

PiecewiseTrig t_bar(const TruncationParams& p, const PointSet& y) {
  const TrigPoly t = t_nu_b(p, y);
  return zone_layout(p, t, std::vector<double>(static_cast<std::size_t>(p.nu) + 1, 1.0));
}

std::vector<PositivityEntry> check_integral_positivity(const TruncationParams& p, const PointSet& y,
                                                       bool throw_on_failure) {
  const TrigPoly t = t_nu_b(p, y);
  std::vector<PositivityEntry> out;
  std::vector<int> failing;
  for (const auto& c : classify_intervals(y, p.nu)) {
    if (c.kind != IntervalKind::TypeII) continue;
    PositivityEntry e;
    e.j = c.j;
    e.integral = integral(t, c.interval.lo, c.interval.hi);
    e.signed_integral = e.integral * c.pi_sign_at_center;
    e.ok = e.signed_integral > 0.0;
    if (!e.ok) failing.push_back(c.j);
    out.push_back(e);
  }
  if (throw_on_failure && !failing.empty()) {
    std::string list;
    for (int j : failing) list += (list.empty() ? "" : ",") + std::to_string(j);
    throw ConstructionInfeasible("integral positivity fails on intervals j = " + list +
                                     " (b is too large for this s)",
                                 failing);
  }
  return out;
}

namespace {

MjSolution solve_Mj_with(const TruncationParams& p, const TrigPoly& t, const IntervalClass& c) {
  MjSolution sol;
  sol.j = c.j;
  const Interval whole = interval_of(p, c.j);
  const Interval core = nonzero_part(p, c.j);
  sol.integral_t = integral(t, whole.lo, whole.hi);
  sol.integral_tbar = integral(t, core.lo, core.hi);
  sol.m_j = scan::scan_max([&](double x) { return std::abs(t(x)); }, core.lo, core.hi, 65).value;
  const double sgn = c.pi_sign_at_center;
  if (!(sgn * sol.integral_t > 0.0)) {
    throw ConstructionInfeasible("integral positivity fails on interval j = " + std::to_string(c.j),
                                 {c.j});
  }
  auto gap = [&](double M) {
    const double factor = sol.m_j > M ? M / sol.m_j : 1.0;
    return sgn * (factor * sol.integral_tbar - sol.integral_t);
  };
  double lo = 0.0, hi = 4.0;
  if (!(gap(lo) < 0.0) || !(gap(hi) > 0.0)) {
    throw NoRoot("solve_Mj: cannot bracket M on interval j = " + std::to_string(c.j));
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  sol.M_j = 0.5 * (lo + hi);
  sol.scale = sol.m_j > sol.M_j ? sol.M_j / sol.m_j : 1.0;
  sol.integral_g = sol.scale * sol.integral_tbar;
  sol.residual = std::abs(sol.integral_g - sol.integral_t);
  return sol;
}

}  // namespace

MjSolution solve_Mj(const TruncationParams& p, const PointSet& y, int j) {
  require_equidistant(p, y);
  const auto classes = classify_intervals(y, p.nu);
  if (j < 0 || j > p.nu) throw DomainError("solve_Mj: interval index out of range");
  const auto& c = classes[static_cast<std::size_t>(j)];
  if (c.kind != IntervalKind::TypeII) throw DomainError("solve_Mj: interval is not of type II");
  return solve_Mj_with(p, t_nu_b(p, y), c);
}

namespace {

struct GParts {
  TrigPoly t;
  PiecewiseTrig g;
  std::vector<IntervalClass> classes;
  std::vector<MjSolution> mj;
};

GParts build_parts(const TruncationParams& p, const PointSet& y) {
  require_equidistant(p, y);
  check_integral_positivity(p, y, true);
  GParts parts;
  parts.t = t_nu_b(p, y);
  parts.classes = classify_intervals(y, p.nu);
  std::vector<double> scale(static_cast<std::size_t>(p.nu) + 1, 1.0);
  std::vector<MjSolution> solved(parts.classes.size());
  std::vector<char> is_type2(parts.classes.size(), 0);
  for (std::size_t i = 0; i < parts.classes.size(); ++i) {
    is_type2[i] = parts.classes[i].kind == IntervalKind::TypeII;
  }
  const auto count = static_cast<long>(parts.classes.size());
  std::vector<std::exception_ptr> errors(parts.classes.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!is_type2[k]) continue;
    try {
      solved[k] = solve_Mj_with(p, parts.t, parts.classes[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 0; i < parts.classes.size(); ++i) {
    if (!is_type2[i]) continue;
    scale[static_cast<std::size_t>(parts.classes[i].j)] = solved[i].scale;
    parts.mj.push_back(solved[i]);
  }
  parts.g = zone_layout(p, parts.t, scale);
  return parts;
}

}  // namespace

PiecewiseTrig build_g(const TruncationParams& p, const PointSet& y) { return build_parts(p, y).g; }

CounterexampleFunction build_f(const TruncationParams& p, const PointSet& y) {
  GParts parts = build_parts(p, y);
  return CounterexampleFunction(p, y, std::move(parts.t), std::move(parts.g), std::move(parts.classes),
                                std::move(parts.mj));
}

TrigPoly build_T(const TruncationParams& p, const PointSet& y) { return antiderivative(t_nu_b(p, y)); }

CounterexampleFunction::CounterexampleFunction(TruncationParams params, PointSet y, TrigPoly t,
                                               PiecewiseTrig g, std::vector<IntervalClass> classes,
                                               std::vector<MjSolution> mj)
    : params_(std::move(params)),
      y_(std::move(y)),
      t_(std::move(t)),
      T_(antiderivative(t_)),
      g_(std::move(g)),
      classes_(std::move(classes)),
      mj_(std::move(mj)) {}

PeriodicFunction CounterexampleFunction::as_function() const {
  auto g = std::make_shared<const PiecewiseTrig>(g_);
  PeriodicFunction f;
  f.eval = [g](double x) { return g->integral_from_zero(x); };
  const auto& bp = g_.breakpoints();
  f.breakpoints.assign(bp.begin(), bp.end());
  f.smoothness_hint = 1;
  f.frequency_hint = params_.nu + params_.s;
  return f;
}

PeriodicFunction CounterexampleFunction::derivative_function() const {
  auto g = std::make_shared<const PiecewiseTrig>(g_);
  PeriodicFunction f;
  f.eval = [g](double x) { return (*g)(x); };
  const auto& bp = g_.breakpoints();
  f.breakpoints.assign(bp.begin(), bp.end());
  f.smoothness_hint = 0;
  f.frequency_hint = params_.nu + params_.s;
  return f;
}

void to_json(nlohmann::json& j, const CounterexampleFunction& f) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : f.classes()) {
    classes.push_back({{"j", c.j},
                       {"lo", c.interval.lo},
                       {"hi", c.interval.hi},
                       {"kind", c.kind == IntervalKind::TypeI ? "I" : "II"},
                       {"pi_sign", c.pi_sign_at_center}});
  }
  nlohmann::json mj = nlohmann::json::array();
  for (const auto& m : f.mj_table()) {
    mj.push_back({{"j", m.j},
                  {"m_j", m.m_j},
                  {"M_j", m.M_j},
                  {"scale", m.scale},
                  {"integral_t", m.integral_t},
                  {"integral_tbar", m.integral_tbar},
                  {"integral_g", m.integral_g},
                  {"residual", m.residual}});
  }
  j = nlohmann::json{{"params", f.params()},
                     {"point_set", f.point_set()},
                     {"t", f.t()},
                     {"g", f.g()},
                     {"intervals", classes},
                     {"M_j", mj},
                     {"period_residual", f.period_residual()}};
}

CounterexampleFunction counterexample_from_json(const nlohmann::json& j) {
  const TruncationParams p = truncation_params_from_json(j.at("params"));
  PointSet y = point_set_from_json(j.at("point_set"));
  std::vector<IntervalClass> classes;
  for (const auto& c : j.at("intervals")) {
    IntervalClass ic;
    ic.j = c.at("j").get<int>();
    ic.interval = Interval(c.at("lo").get<double>(), c.at("hi").get<double>());
    ic.kind = c.at("kind").get<std::string>() == "I" ? IntervalKind::TypeI : IntervalKind::TypeII;
    ic.pi_sign_at_center = c.at("pi_sign").get<int>();
    classes.push_back(ic);
  }
  std::vector<MjSolution> mj;
  for (const auto& m : j.at("M_j")) {
    MjSolution s;
    s.j = m.at("j").get<int>();
    s.m_j = m.at("m_j").get<double>();
    s.M_j = m.at("M_j").get<double>();
    s.scale = m.at("scale").get<double>();
    s.integral_t = m.at("integral_t").get<double>();
    s.integral_tbar = m.at("integral_tbar").get<double>();
    s.integral_g = m.at("integral_g").get<double>();
    s.residual = m.at("residual").get<double>();
    mj.push_back(s);
  }
  return CounterexampleFunction(p, std::move(y), j.at("t").get<TrigPoly>(), piecewise_from_json(j.at("g")),
                                std::move(classes), std::move(mj));
}

DescentReport descent_set_measure(const TruncationParams& p, const PointSet& y, const Interval& J) {
  const Interval i0 = central_interval(p.s);
  if (J.lo < i0.lo - 1e-12 || J.hi > i0.hi + 1e-12) {
    throw DomainError("descent_set_measure: J must lie inside I_0");
  }
  const double third = J.length() / 3.0;
  DescentReport r;
  r.middle_third = Interval(J.lo + third, J.hi - third);
  const TrigPoly q = t_nu_b(p, y).plus_constant(9.0 * p.b * p.b / 4.0);
  r.measure = negative_set(q, r.middle_third).measure;
  r.c7 = J.length() > 0.0 ? r.measure / (p.b * J.length()) : 0.0;
  return r;
}

double lemma21_rhs(double b, int n, double j_len, double e_measure, double c4) {
  const double nn = n;
  return b * b * j_len / (kPi * nn) -
         (c4 / nn) * (std::pow(b, 2.25) + b * e_measure + std::pow(b, 1.25) / nn);
}

}  // namespace trigshape
