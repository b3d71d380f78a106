#include "trigshape/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trigshape/errors.hpp"
#include "trigshape/scan.hpp"

namespace trigshape {

double EpsSequence::operator()(double n) const {
  if (id == "zero") return 0.0;
  if (id == "inv_log") return 1.0 / std::log(n + 2.0);
  if (id == "inv_quarter_power") return std::pow(n, -0.25);
  if (id == "inline") {
    const double k = std::floor(n);
    if (k >= 1.0 && k <= static_cast<double>(values.size())) return values[static_cast<std::size_t>(k) - 1];
    return 0.0;
  }
  throw DomainError("unknown eps sequence '" + id + "'");
}

EpsSequence EpsSequence::preset(const std::string& id) {
  if (id != "zero" && id != "inv_log" && id != "inv_quarter_power") {
    throw DomainError("unknown eps preset '" + id + "' (expected zero, inv_log or inv_quarter_power)");
  }
  EpsSequence e;
  e.id = id;
  return e;
}

EpsSequence EpsSequence::inline_list(std::vector<double> values) {
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("eps values must be finite and nonnegative");
  }
  EpsSequence e;
  e.id = "inline";
  e.values = std::move(values);
  return e;
}

double b_of(const EpsSequence& eps, double n) {
  const double e = eps(n);
  return std::pow(std::max(e * e, 1.0 / n), 0.4);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log b_n as a function of L = log n, usable far beyond the range of double n.
double log_b_at(const EpsSequence& eps, double L) {
  double log_eps = kNegInf;
  if (L < 600.0) {
    const double e = eps(std::exp(L));
    log_eps = e > 0.0 ? std::log(e) : kNegInf;
  } else if (eps.id == "inv_log") {
    log_eps = -std::log(L);
  } else if (eps.id == "inv_quarter_power") {
    log_eps = -0.25 * L;
  }
  return 0.4 * std::max(2.0 * log_eps, -L);
}

// Smallest L with log b(e^L) < log_bound for every larger L (b_n is
// nonincreasing for every supported sequence past the end of inline lists).
double log_n1(const EpsSequence& eps, double log_bound) {
  if (log_b_at(eps, 0.0) < log_bound) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!(log_b_at(eps, hi) < log_bound)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_b_at(eps, mid) < log_bound) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct ZoneRange {
  long jmin = 0;  // odd
  long jmax = -1;
  int count() const { return jmax < jmin ? 0 : static_cast<int>((jmax - jmin) / 2 + 1); }
};

// Odd j whose zero interval [x_{j,l}, x_{j,r}] lies inside J.
ZoneRange zones_inside(int nu, double b, const Interval& J) {
  ZoneRange r;
  auto lo = static_cast<long>(std::ceil(nu * (kPi - J.hi) / kPi + b));
  auto hi = static_cast<long>(std::floor(nu * (kPi - J.lo) / kPi - b));
  if (lo % 2 == 0) ++lo;
  if (hi % 2 == 0) --hi;
  r.jmin = lo;
  r.jmax = hi;
  return r;
}

}  // namespace

double SequenceState::log_d(int j) const {
  if (j <= 0) return 0.0;
  return steps.at(static_cast<std::size_t>(j) - 1).log_d;
}

double SequenceState::d(int j) const { return std::exp(log_d(j)); }

Interval SequenceState::J(int j) const {
  if (j <= 0) return central_interval(s);
  return steps.at(static_cast<std::size_t>(j) - 1).J;
}

bool SequenceState::all_evaluable() const {
  return std::all_of(steps.begin(), steps.end(), [](const SequenceStep& st) { return st.evaluable; });
}

SequenceState start_sequence(int s, EpsSequence eps, SequenceMode mode, double exponent_override,
                             double eval_cap) {
  if (s < 1 || s % 2 != 0) throw DomainError("start_sequence: s must be a positive even integer");
  if (!(exponent_override > 0.0)) throw DomainError("start_sequence: exponent_override must be positive");
  SequenceState st;
  st.s = s;
  st.eps = std::move(eps);
  st.mode = mode;
  st.exponent_override = exponent_override;
  st.eval_cap = eval_cap;
  return st;
}

namespace {

// Sum over terms of d_{j-1} * (one-sided) g_j'(x), with every term's piece
// chosen by `probe`, a point in the open subinterval containing x.
double f2_at(const SequenceState& st, double x, double probe) {
  double sum = 0.0;
  for (int j = 1; j <= st.sigma(); ++j) {
    const auto& g = st.steps[static_cast<std::size_t>(j) - 1].f->g();
    const auto& bp = g.breakpoints();
    auto it = std::upper_bound(bp.begin(), bp.end(), probe);
    std::size_t k = it == bp.begin() ? 0 : static_cast<std::size_t>(it - bp.begin()) - 1;
    k = std::min(k, g.pieces().size() - 1);
    const auto& pc = g.pieces()[k];
    if (pc.poly < 0) continue;
    const TrigPoly& t = g.polys()[static_cast<std::size_t>(pc.poly)];
    double dv = 0.0;
    for (int m : t.support()) dv += m * (t.b(m) * std::cos(m * x) - t.a(m) * std::sin(m * x));
    sum += st.d(j - 1) * pc.scale * dv;
  }
  return sum;
}

}  // namespace

double second_derivative_norm(const SequenceState& st) {
  if (st.sigma() == 0) return 0.0;
  if (!st.all_evaluable()) throw EvalCapExceeded("second_derivative_norm: a term is beyond the evaluation cap");
  std::vector<double> cuts;
  double freq = 1.0;
  for (const auto& step : st.steps) {
    const auto& bp = step.f->g().breakpoints();
    cuts.insert(cuts.end(), bp.begin(), bp.end());
    freq = std::max(freq, static_cast<double>(step.f->params().nu + step.f->params().s));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    const double probe = 0.5 * (a + b);
    const auto pts = static_cast<std::size_t>(std::ceil((b - a) * freq * 8.0 / kTwoPi)) + 9;
    const auto pk = scan::scan_max([&](double x) { return std::abs(f2_at(st, x, probe)); }, a, b, pts);
    best = std::max(best, pk.value);
  }
  return best;
}

SequenceState advance_sequence(const SequenceState& state) {
  if (!state.all_evaluable()) {
    throw InfeasibleStep("advance_sequence: the previous step is beyond the evaluation cap; only bounds are tracked");
  }
  SequenceState next = state;
  const int sigma = state.sigma() + 1;
  const Interval prevJ = state.J(sigma - 1);
  SequenceStep step;
  step.sigma = sigma;

  step.log_n1 = log_n1(state.eps, state.n1_exponent() * std::log(prevJ.length()));
  step.second_derivative_norm = second_derivative_norm(state);
  step.log_n2 = step.second_derivative_norm > 0.0
                    ? state.n2_exponent() * (std::log(step.second_derivative_norm) - state.log_d(sigma - 1))
                    : kNegInf;
  const double log_prev = sigma == 1 ? kNegInf : state.steps.back().log_n;
  const double log_lower = std::max({log_prev, step.log_n1, step.log_n2, 0.0});

  if (!(log_lower < std::log(state.eval_cap))) {
    // Beyond the cap: record the bound on n_sigma and the implied d_sigma.
    step.evaluable = false;
    step.log_n = log_lower;
    step.b = std::exp(log_b_at(state.eps, log_lower));
    step.log_d = state.log_d(sigma - 1) + 2.25 * std::log(step.b) - log_lower;
    step.J = prevJ;
    next.steps.push_back(step);
    return next;
  }

  const PointSet y = make_equidistant(state.s);
  auto n = static_cast<long>(std::floor(std::exp(log_lower))) + 1;
  for (; static_cast<double>(n) <= state.eval_cap; ++n) {
    const double b = b_of(state.eps, static_cast<double>(n));
    if (!(b < 0.5) || std::pow(b, 0.75) * static_cast<double>(n) < 1.0) continue;
    const int nu = nu_for(static_cast<int>(n), b);
    if (nu <= 10 * state.s) continue;
    const ZoneRange zr = zones_inside(nu, b, prevJ);
    if (zr.count() < state.min_zero_intervals) continue;
    TruncationParams p;
    p.s = state.s;
    p.nu = nu;
    p.b = b;
    p.n = static_cast<int>(n);
    std::shared_ptr<const CounterexampleFunction> f;
    try {
      f = std::make_shared<const CounterexampleFunction>(build_f(p, y));
    } catch (const ConstructionInfeasible&) {
      continue;
    }
    step.evaluable = true;
    step.n = n;
    step.log_n = std::log(static_cast<double>(n));
    step.b = b;
    step.log_d = state.log_d(sigma - 1) + 2.25 * std::log(b) - step.log_n;
    step.zero_intervals_inside = zr.count();
    // Zero interval nearest the centre of J_{sigma-1}.
    const double c = prevJ.center();
    long best = zr.jmin;
    for (long j = zr.jmin; j <= zr.jmax; j += 2) {
      if (std::abs(p.x(j) - c) < std::abs(p.x(best) - c)) best = j;
    }
    step.J = Interval(p.x_l(best), p.x_r(best));
    step.f = std::move(f);
    next.steps.push_back(step);
    return next;
  }
  throw InfeasibleStep("advance_sequence: no admissible n_sigma below the evaluation cap");
}

double f_eps_partial(const SequenceState& state, double x) {
  double sum = 0.0;
  for (int j = 1; j <= state.sigma(); ++j) {
    const auto& st = state.steps[static_cast<std::size_t>(j) - 1];
    if (!st.evaluable) throw EvalCapExceeded("f_eps_partial: term beyond the evaluation cap");
    sum += state.d(j - 1) * st.f->f(x);
  }
  return sum;
}

double f_eps_partial_derivative(const SequenceState& state, double x) {
  double sum = 0.0;
  for (int j = 1; j <= state.sigma(); ++j) {
    const auto& st = state.steps[static_cast<std::size_t>(j) - 1];
    if (!st.evaluable) throw EvalCapExceeded("f_eps_partial_derivative: term beyond the evaluation cap");
    sum += state.d(j - 1) * st.f->g_at(x);
  }
  return sum;
}

PeriodicFunction f_eps_function(const SequenceState& state) {
  if (!state.all_evaluable()) throw EvalCapExceeded("f_eps_function: term beyond the evaluation cap");
  auto snapshot = std::make_shared<const SequenceState>(state);
  PeriodicFunction f;
  f.eval = [snapshot](double x) { return f_eps_partial(*snapshot, x); };
  for (const auto& st : state.steps) {
    const auto& bp = st.f->g().breakpoints();
    f.breakpoints.insert(f.breakpoints.end(), bp.begin(), bp.end());
    f.frequency_hint = std::max(f.frequency_hint, static_cast<double>(st.f->params().nu + st.f->params().s));
  }
  std::sort(f.breakpoints.begin(), f.breakpoints.end());
  f.breakpoints.erase(std::unique(f.breakpoints.begin(), f.breakpoints.end()), f.breakpoints.end());
  f.smoothness_hint = 1;
  return f;
}

void to_json(nlohmann::json& j, const SequenceState& state) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& st : state.steps) {
    steps.push_back({{"sigma", st.sigma},
                     {"evaluable", st.evaluable},
                     {"n", st.n},
                     {"log_n", num(st.log_n)},
                     {"b", st.b},
                     {"log_d", num(st.log_d)},
                     {"log_N1", num(st.log_n1)},
                     {"log_N2", num(st.log_n2)},
                     {"second_derivative_norm", st.second_derivative_norm},
                     {"J", {st.J.lo, st.J.hi}},
                     {"zero_intervals_inside", st.zero_intervals_inside}});
  }
  j = nlohmann::json{{"s", state.s},
                     {"eps", state.eps.id},
                     {"mode", state.mode == SequenceMode::PaperFaithful ? "paper_faithful" : "demonstration"},
                     {"exponent_override", state.exponent_override},
                     {"constants_relaxed", state.mode == SequenceMode::Demonstration},
                     {"eval_cap", state.eval_cap},
                     {"steps", steps}};
  if (state.eps.id == "inline") j["eps_values"] = state.eps.values;
}

}  // namespace trigshape
