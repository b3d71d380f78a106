#include <doctest.h>

#include <cmath>

#include "trigshape/construction.hpp"
#include "trigshape/errors.hpp"

using namespace trigshape;

namespace {

const PointSet& ystar2() {
  static const PointSet y = make_equidistant(2);
  return y;
}

// Composite Simpson rule, used as an independent oracle for the exact
// piecewise integrals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("nu from n and b") {
  CHECK(largest_odd(1.0) == 1);
  CHECK(largest_odd(8.9) == 7);
  CHECK(largest_odd(9.0) == 9);
  CHECK_THROWS_AS(largest_odd(0.7), DomainError);
  // b^{3/4} n = 0.1^{0.75} * 400 = 71.13 -> 71 + 13.
  CHECK(nu_for(400, 0.1) == 84);
  CHECK(nu_for(100, 0.05) == 22);
  CHECK(nu_for(200, 0.2) == 72);
  const TruncationParams p = TruncationParams::from_n(2, 400, 0.1);
  CHECK(p.nu == 84);
  CHECK_THROWS_AS(TruncationParams::from_n(4, 100, 0.05), DomainError);  // nu = 22 <= 40
  CHECK_THROWS_AS(TruncationParams::from_n(2, 400, 0.5), DomainError);
  CHECK_THROWS_AS(TruncationParams::from_n(3, 400, 0.1), DomainError);
}

TEST_CASE("t_nu_b") {
  const TruncationParams p{2, 36, 0.1, {}};
  const TrigPoly t = t_nu_b(p, ystar2());
  CHECK(t.degree() == p.nu + p.s);
  CHECK(std::abs(t.a(0)) <= 1e-12);
  double sum = 0.0;
  for (int i = 0; i < 1024; ++i) sum += t(-kPi + kTwoPi * i / 1024.0);
  CHECK(std::abs(sum) * kTwoPi / 1024.0 <= 1e-12);
  CHECK(t.support().size() == 3);
  for (double y : ystar2().points()) CHECK(std::abs(t(y)) < 1e-14);
  const TruncationParams tiny{2, 36, 1e-9, {}};
  const TrigPoly t0 = t_nu_b(tiny, ystar2());
  for (double x : {0.3, 1.2, -2.0}) {
    CHECK(t0(x) == doctest::Approx(16.0 * (std::cos(36 * x) + std::cos(kPi * 1e-9)) * pi_eval(ystar2(), x)).epsilon(1e-12));
  }
  const TrigPoly tn = TrigPoly::cosine(p.nu);
  for (long j = 0; j < 2 * p.nu; ++j) {
    CHECK(std::abs(tn(p.x_l(j))) == doctest::Approx(std::cos(kPi * p.b)).epsilon(1e-12));
    CHECK(std::abs(tn(p.x_r(j))) == doctest::Approx(std::cos(kPi * p.b)).epsilon(1e-12));
  }
}

TEST_CASE("t_bar") {
  const TruncationParams p{2, 36, 0.1, {}};
  const TrigPoly t = t_nu_b(p, ystar2());
  const PiecewiseTrig tb = t_bar(p, ystar2());
  for (long j = 1; j < 2 * p.nu; j += 2) {
    CHECK(tb(p.x(j)) == 0.0);
    CHECK(p.x_r(j) - p.x_l(j) == doctest::Approx(2.0 * kPi * p.b / p.nu));
  }
  CHECK(tb.max_jump() < 1e-12);
  double sup_tb = 0.0, sup_t = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = -kPi + kTwoPi * i / 100000.0;
    sup_tb = std::max(sup_tb, std::abs(tb(x)));
    sup_t = std::max(sup_t, std::abs(t(x)));
    // Zero exactly where cos nu x < -cos pi b, equal to t elsewhere.
    if (std::cos(p.nu * x) < -std::cos(kPi * p.b) - 1e-9) {
      CHECK(tb(x) == 0.0);
    } else if (std::cos(p.nu * x) > -std::cos(kPi * p.b) + 1e-9) {
      CHECK(tb(x) == doctest::Approx(t(x)).epsilon(1e-12));
    }
  }
  CHECK(sup_tb <= sup_t + 1e-15);
  CHECK(sup_t <= 4.0);
}

TEST_CASE("PiecewiseTrig integrals") {
  const TruncationParams p{2, 36, 0.1, {}};
  const PiecewiseTrig g = build_g(p, ystar2());
  for (auto [a, b] : {std::pair{-3.0, -2.5}, std::pair{-0.2, 0.4}, std::pair{1.0, 3.1}}) {
    const double exact = g.integral(a, b);
    const double quad = simpson([&](double x) { return g(x); }, a, b, 200000);
    CHECK(std::abs(exact - quad) < 1e-8);
  }
  CHECK(g.integral_from_zero(0.0) == 0.0);
  // True antiderivative on R: one period adds the period integral.
  CHECK(g.integral_from_zero(1.0 + kTwoPi) - g.integral_from_zero(1.0) ==
        doctest::Approx(g.period_integral()).epsilon(1e-12));
}

TEST_CASE("integral positivity") {
  const TruncationParams p{2, 36, 0.05, {}};
  const auto rep = check_integral_positivity(p, ystar2());
  CHECK_FALSE(rep.empty());
  for (const auto& e : rep) CHECK(e.ok);
  const TrigPoly t = t_nu_b(p, ystar2());
  CHECK(std::abs(integral(t, -kPi, kPi)) < 1e-13);
  // Independent oracle for one interval integral.
  const auto& e = rep[rep.size() / 2];
  const double lo = std::max(p.x(2L * e.j + 1), -kPi), hi = std::min(p.x(2L * e.j - 1), kPi);
  CHECK(e.integral == doctest::Approx(simpson([&](double x) { return t(x); }, lo, hi, 2000)).epsilon(1e-10));

  // Near b = 1/2 the clipped mass dominates on some intervals.
  const TruncationParams wide{2, 36, 0.49, {}};
  const auto rep2 = check_integral_positivity(wide, ystar2(), false);
  bool any_fail = false;
  for (const auto& r : rep2) any_fail = any_fail || !r.ok;
  if (any_fail) CHECK_THROWS_AS(check_integral_positivity(wide, ystar2()), ConstructionInfeasible);
}

TEST_CASE("solve_Mj") {
  const TruncationParams p{2, 36, 0.1, {}};
  const auto classes = classify_intervals(ystar2(), p.nu);
  int solved = 0;
  for (const auto& c : classes) {
    if (c.kind != IntervalKind::TypeII) continue;
    const MjSolution s = solve_Mj(p, ystar2(), c.j);
    CHECK(s.M_j > 0.0);
    CHECK(s.M_j < 4.0);
    CHECK(s.residual <= 1e-12);
    // Closed form: min(M, m)/m * int tbar = int t.
    CHECK(s.M_j == doctest::Approx(s.m_j * s.integral_t / s.integral_tbar).epsilon(1e-12));
    // Mirror image x -> -x is interval nu - j.
    const MjSolution m = solve_Mj(p, ystar2(), p.nu - c.j);
    CHECK(m.M_j == doctest::Approx(s.M_j).epsilon(1e-12));
    ++solved;
  }
  CHECK(solved > 0);
  for (const auto& c : classes) {
    if (c.kind == IntervalKind::TypeI) {
      CHECK_THROWS_AS(solve_Mj(p, ystar2(), c.j), DomainError);
      break;
    }
  }
}

TEST_CASE("build_g and build_f") {
  for (auto [n, b] : {std::pair{400, 0.1}, std::pair{200, 0.2}, std::pair{100, 0.05}}) {
    const TruncationParams p = TruncationParams::from_n(2, n, b);
    const CounterexampleFunction cf = build_f(p, ystar2());
    const PiecewiseTrig& g = cf.g();
    CHECK(g.max_jump() < 1e-12);
    for (long j = 1; j < 2 * p.nu; j += 2) CHECK(g(p.x(j)) == 0.0);

    double worst_sign = 0.0, worst_even = 0.0, worst_odd = 0.0, sup_tf = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double x = -kPi + kTwoPi * i / 100000.0;
      worst_sign = std::min(worst_sign, g(x) * pi_eval(ystar2(), x));
      worst_even = std::max(worst_even, std::abs(g(x) - g(-x)));
      worst_odd = std::max(worst_odd, std::abs(cf.f(x) + cf.f(-x)));
      sup_tf = std::max(sup_tf, std::abs(cf.T()(x) - cf.f(x)));
    }
    CHECK(worst_sign >= -1e-10);
    CHECK(worst_even <= 1e-10);
    CHECK(worst_odd <= 1e-10);
    CHECK(cf.f(0.0) == 0.0);
    const double c1 = 80.0 * kPi * (4 * p.s + 2);
    CHECK(sup_tf <= c1 * std::pow(b, 3) / p.nu);

    // Per-interval L1 gap, by quadrature.
    const TrigPoly& t = cf.t();
    for (const auto& c : cf.classes()) {
      const double l1 = simpson([&](double x) { return std::abs(t(x) - g(x)); }, c.interval.lo,
                                c.interval.hi, 4000);
      CHECK(l1 <= 80.0 * kPi * std::pow(b, 3) / p.nu);
    }
    // The residual equals the period integral of g.
    CHECK(cf.period_residual() ==
          doctest::Approx(simpson([&](double x) { return g(x); }, -kPi, kPi, 400000)).epsilon(1e-6));
    CHECK(delta1_membership([&](double x) { return g(x); }, ystar2(), 20000).member);
  }
}

TEST_CASE("build_T") {
  const TruncationParams p = TruncationParams::from_n(2, 400, 0.1);
  const TrigPoly T = build_T(p, ystar2());
  const TrigPoly t = t_nu_b(p, ystar2());
  const TrigPoly dT = derivative(T);
  for (int j = 1; j <= t.degree(); ++j) {
    CHECK(std::abs(dT.a(j) - t.a(j)) < 1e-14);
    CHECK(std::abs(dT.b(j) - t.b(j)) < 1e-14);
  }
  CHECK(T(0.0) == 0.0);
  const Interval i0 = central_interval(2);
  const double depth = 9.0 * p.b * p.b / 4.0;
  int cores = 0;
  for (long j = 1; j < 2 * p.nu; j += 2) {
    if (p.xbar_l(j) < i0.lo || p.xbar_r(j) > i0.hi) continue;
    ++cores;
    CHECK(max_value(t, Interval(p.xbar_l(j), p.xbar_r(j))) < -depth);
    CHECK(p.xbar_r(j) - p.x(j) == doctest::Approx(kPi * p.b / (2.0 * p.nu)));
  }
  CHECK(cores > 0);
  CHECK(sup_norm(derivative(T, 4)) <= 4.0 * std::pow(1.0 + 2.0 * p.s, 3) * std::pow(p.nu, 3));
}

TEST_CASE("descent_set_measure") {
  const TruncationParams p = TruncationParams::from_n(2, 400, 0.1);
  const Interval i0 = central_interval(2);
  const DescentReport r = descent_set_measure(p, ystar2(), i0);
  // Dense-grid oracle.
  const TrigPoly t = t_nu_b(p, ystar2());
  const double depth = 9.0 * p.b * p.b / 4.0;
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.middle_third.lo + r.middle_third.length() * (i + 0.5) / n;
    if (t(x) < -depth) ++hits;
  }
  CHECK(r.measure == doctest::Approx(r.middle_third.length() * hits / n).epsilon(1e-3));
  CHECK(r.c7 > 0.0);
  // Each core inside the middle third contributes at least pi b / nu.
  int cores = 0;
  for (long j = 1; j < 2 * p.nu; j += 2) {
    if (p.xbar_l(j) >= r.middle_third.lo && p.xbar_r(j) <= r.middle_third.hi) ++cores;
  }
  CHECK(r.measure >= cores * kPi * p.b / p.nu);
  // A J shorter than one oscillation may see nothing.
  const DescentReport small = descent_set_measure(p, ystar2(), Interval(0.0, 0.5 * kPi / p.nu));
  CHECK(small.measure >= 0.0);
  CHECK_THROWS_AS(descent_set_measure(p, ystar2(), Interval(0.0, 1.0)), DomainError);
}

TEST_CASE("lemma21_rhs") {
  CHECK(lemma21_rhs(0.1, 400, 0.5, 1e6, 10.0) < 0.0);
  CHECK(std::abs(lemma21_rhs(1e-12, 400, 0.5, 0.0, 10.0)) < std::abs(lemma21_rhs(1e-6, 400, 0.5, 0.0, 10.0)) * 1e-6);
  const double v = lemma21_rhs(0.1, 400, 0.5, 0.0, 0.0);
  CHECK(v == doctest::Approx(0.01 * 0.5 / (kPi * 400)));
}

TEST_CASE("counterexample JSON replay") {
  const TruncationParams p = TruncationParams::from_n(2, 200, 0.1);
  const CounterexampleFunction cf = build_f(p, ystar2());
  const nlohmann::json j = cf;
  const CounterexampleFunction back = counterexample_from_json(nlohmann::json::parse(j.dump()));
  for (double x : {-3.0, -1.0, 0.2, 2.5}) {
    CHECK(back.f(x) == doctest::Approx(cf.f(x)).epsilon(1e-15));
    CHECK(back.g_at(x) == cf.g_at(x));
  }
  CHECK(back.mj_table().size() == cf.mj_table().size());
}
