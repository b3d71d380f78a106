#include <doctest.h>

#include <cmath>

#include "trigshape/errors.hpp"
#include "trigshape/partition.hpp"

using namespace trigshape;

namespace {

double raw_product(const std::vector<double>& ys, double x) {
  double p = 1.0;
  for (double y : ys) p *= std::sin((x - y) / 2.0);
  return p;
}

}  // namespace

TEST_CASE("make_equidistant") {
  const PointSet y1 = make_equidistant(1);
  CHECK(y1.points()[0] == doctest::Approx(kPi / 2));
  CHECK(y1.points()[1] == doctest::Approx(-kPi / 2));
  const PointSet y2 = make_equidistant(2);
  const double expect[] = {3 * kPi / 4, kPi / 4, -kPi / 4, -3 * kPi / 4};
  for (int i = 0; i < 4; ++i) CHECK(y2.points()[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]));
  for (int s = 1; s <= 6; ++s) {
    const PointSet y = make_equidistant(s);
    for (int i = 1; i < 2 * s; ++i) CHECK(y.y(i) - y.y(i + 1) == doctest::Approx(kPi / s));
    CHECK(y.y(s + 1) < 0.0);
    CHECK(y.y(s) > 0.0);
    // Periodic extension.
    for (long i = -7; i < 9; ++i) CHECK(y.y(i) == doctest::Approx(y.y(i + 2 * s) + kTwoPi));
  }
  CHECK_THROWS_AS(PointSet(1, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(make_equidistant(0), DomainError);
}

TEST_CASE("pi_eval") {
  const PointSet y2 = make_equidistant(2);
  CHECK(pi_eval(y2, 0.0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(pi_eval(y2, kPi / 6) == doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK(pi_eval(y2, -kPi / 6) == doctest::Approx(1.0 / 16).epsilon(1e-14));
  for (double y : y2.points()) CHECK(std::abs(pi_eval(y2, y)) < 1e-16);

  for (int s = 1; s <= 4; ++s) {
    const PointSet y = make_equidistant(s);
    const double sign = s % 2 == 0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double x = -kPi + kTwoPi * k / 10000.0;
      const double closed = sign * std::ldexp(1.0, 1 - 2 * s) * std::cos(s * x);
      worst = std::max({worst, std::abs(pi_eval(y, x) - closed), std::abs(raw_product(y.points(), x) - closed)});
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("pi_as_trigpoly") {
  const TrigPoly p2 = pi_as_trigpoly(make_equidistant(2));
  CHECK(p2.degree() == 2);
  CHECK(p2.a(2) == doctest::Approx(0.125).epsilon(1e-13));
  for (int j = 0; j <= 2; ++j) {
    if (j != 2) CHECK(std::abs(p2.a(j)) <= 1e-12);
    CHECK(std::abs(p2.b(j)) <= 1e-12);
  }
  const TrigPoly p1 = pi_as_trigpoly(make_equidistant(1));
  CHECK(p1.a(1) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(std::abs(p1.a(0)) <= 1e-12);

  const PointSet irregular(3, {2.9, 1.0, 0.2, -0.4, -1.5, -3.0});
  const TrigPoly pi = pi_as_trigpoly(irregular);
  double worst = 0.0;
  for (int k = 0; k <= 5000; ++k) {
    const double x = -kPi + kTwoPi * k / 5000.0;
    worst = std::max(worst, std::abs(pi(x) - pi_eval(irregular, x)));
  }
  CHECK(worst <= 1e-10);
  // Exactly 2s sign changes per period.
  CHECK(sign_changes(pi, Interval(-kPi + 1e-3, kPi + 1e-3)).size() == 6);
}

TEST_CASE("classify_intervals") {
  for (int s : {1, 2, 3, 4, 6}) {
    const PointSet y = make_equidistant(s);
    for (int nu = 10 * s + 2; nu <= 10 * s + 60; nu += 6) {
      const auto cls = classify_intervals(y, nu);
      CHECK(cls.size() == static_cast<std::size_t>(nu) + 1);
      int type1 = 0;
      double covered = 0.0;
      for (std::size_t i = 0; i < cls.size(); ++i) {
        const auto& c = cls[i];
        covered += c.interval.length();
        if (i > 0) CHECK(std::abs(cls[i - 1].interval.lo - c.interval.hi) < 1e-14);
        if (c.kind == IntervalKind::TypeI) {
          ++type1;
        } else {
          for (long k = -2 * s; k <= 4 * s; ++k) {
            const double p = y.y(k);
            CHECK_FALSE((c.interval.lo <= p && p <= c.interval.hi));
          }
          CHECK(c.pi_sign_at_center != 0);
        }
      }
      CHECK(type1 <= 4 * s);
      CHECK(covered == doctest::Approx(kTwoPi).epsilon(1e-13));
      CHECK(cls.front().interval.hi == doctest::Approx(kPi));
      CHECK(cls.back().interval.lo == doctest::Approx(-kPi));
    }
  }
  const PointSet y2 = make_equidistant(2);
  CHECK_THROWS_AS(classify_intervals(y2, 20), DomainError);
  CHECK_THROWS_AS(classify_intervals(y2, 37), DomainError);
}

TEST_CASE("delta1_membership") {
  const PointSet y = make_equidistant(2);
  const auto ok = delta1_membership([&](double x) { return pi_eval(y, x); }, y, 2000);
  CHECK(ok.member);
  const auto bad = delta1_membership([&](double x) { return -pi_eval(y, x); }, y, 2000);
  CHECK_FALSE(bad.member);
  CHECK(std::abs(pi_eval(y, bad.worst_violation_x)) > 0.0);
  CHECK_THROWS_AS(delta1_membership([](double) { return 0.0; }, y, 10), DomainError);
}

TEST_CASE("violation_measure") {
  const PointSet y = make_equidistant(2);
  // P' = Pi up to scale: comonotone.
  const TrigPoly P = antiderivative(pi_as_trigpoly(y).plus_constant(-pi_as_trigpoly(y).a(0)));
  CHECK(violation_measure(P, y).measure == 0.0);
  // P' = -Pi: P' Pi = -Pi^2 <= 0 everywhere.
  const auto all = violation_measure((-1.0) * P, y);
  CHECK(all.measure == doctest::Approx(kTwoPi).epsilon(1e-9));

  // P' = Pi (1 + 2 cos 4x) has known negative set where 1 + 2 cos 4x < 0.
  const TrigPoly w = TrigPoly::cosine(4, 2.0).plus_constant(1.0);
  const TrigPoly dp = multiply(pi_as_trigpoly(y), w);
  const TrigPoly P2 = antiderivative(dp.plus_constant(-dp.a(0)));
  const auto rep = violation_measure(P2, y);
  // cos 4x < -1/2 on a third of each period of cos 4x.
  CHECK(rep.measure == doctest::Approx(kTwoPi / 3.0).epsilon(1e-9));
  const auto pos = negative_set((-1.0) * multiply(derivative(P2), pi_as_trigpoly(y)), Interval::period());
  CHECK(rep.measure + pos.measure == doctest::Approx(kTwoPi).epsilon(1e-9));

  // A dip narrower than the scan spacing is still found.
  const TrigPoly narrow = TrigPoly::cosine(50, 1.0).plus_constant(1.0 - 1e-6);
  const auto dips = negative_set(narrow, Interval::period());
  CHECK(dips.intervals.size() == 50);
  CHECK(dips.measure > 0.0);
}

TEST_CASE("measure helpers") {
  const std::vector<Interval> set{{-1.0, 0.0}, {0.5, 1.0}};
  CHECK(measure_outside(set, {}) == doctest::Approx(1.5));
  CHECK(measure_outside(set, {{-0.5, 0.75}}) == doctest::Approx(0.75));
  CHECK(measure_inside(set, Interval(-0.25, 0.6)) == doctest::Approx(0.35));
}
