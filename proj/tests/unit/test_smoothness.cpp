#include <doctest.h>

#include <cmath>
#include <random>

#include "trigshape/construction.hpp"
#include "trigshape/errors.hpp"
#include "trigshape/smoothness.hpp"

using namespace trigshape;

namespace {

double omega4_cos(int nu, double t) {
  const double s = std::sin(std::min(nu * t, kPi) / 2.0);
  return 16.0 * s * s * s * s;
}

}  // namespace

TEST_CASE("sym_diff") {
  const PeriodicFunction c = from_trig_poly(TrigPoly::cosine(1));
  for (double h : {0.1, 0.7, 2.0}) CHECK(std::abs(sym_diff(c, 1, h, 0.0)) < 1e-15);

  const int nu = 9;
  const PeriodicFunction cn = from_trig_poly(TrigPoly::cosine(nu));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uh(0.0, kPi), ux(-kPi, kPi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double h = uh(rng), x = ux(rng);
    const double s = std::sin(nu * h / 2.0);
    worst = std::max(worst, std::abs(sym_diff(cn, 2, h, x) + 4.0 * s * s * std::cos(nu * x)));
  }
  CHECK(worst < 1e-12);

  const PeriodicFunction k = from_trig_poly(TrigPoly::constant(2.5));
  for (int order = 1; order <= 6; ++order) CHECK(std::abs(sym_diff(k, order, 0.3, 1.1)) < 1e-13);
  CHECK_THROWS_AS(sym_diff(k, 0, 0.3, 0.0), DomainError);
}

TEST_CASE("modulus of cos nu x") {
  for (int nu : {8, 36}) {
    const PeriodicFunction f = from_trig_poly(TrigPoly::cosine(nu));
    for (double t : {kPi / 64, kPi / 16, kPi / 4, kPi}) {
      const ModulusResult r = modulus(f, 4, t);
      CHECK(std::abs(r.lower - omega4_cos(nu, t)) < 1e-6);
      CHECK(r.lower <= omega4_cos(nu, t) + 1e-12);
    }
  }
  const ModulusResult zero = modulus(from_trig_poly(TrigPoly::constant(1.0)), 3, 1.0);
  CHECK(zero.lower < 1e-14);
  CHECK_THROWS_AS(modulus(from_trig_poly(TrigPoly::cosine(1)), 4, 4.0), DomainError);
  CHECK_THROWS_AS(modulus(from_trig_poly(TrigPoly::cosine(1)), 4, 0.0), DomainError);
}

TEST_CASE("modulus properties") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  std::vector<double> a(13), b(12);
  for (auto& v : a) v = nd(rng);
  for (auto& v : b) v = nd(rng);
  const TrigPoly p(a, b);
  const PeriodicFunction f = from_trig_poly(p);
  const double norm = sup_norm(p);
  ModulusOptions opts;
  opts.res = 256;
  double prev = 0.0;
  for (double t : {0.05, 0.1, 0.3, 1.0, 2.0}) {
    const ModulusResult r = modulus(f, 3, t, opts);
    CHECK(r.lower >= prev - 1e-9);
    CHECK(r.lower <= 8.0 * norm * (1.0 + 1e-12));
    prev = r.lower;
    // Derivative bound: omega_k(f, t) <= t^k ||f^(k)||.
    CHECK(r.lower <= std::pow(t, 3) * sup_norm(derivative(p, 3)) * (1.0 + 1e-9));
  }
  const ModulusResult r1 = modulus(f, 2, 0.4, opts);
  const PeriodicFunction scaled = from_trig_poly((-3.0) * p);
  CHECK(modulus(scaled, 2, 0.4, opts).lower == doctest::Approx(3.0 * r1.lower).epsilon(1e-9));

  const PeriodicFunction g = from_trig_poly(TrigPoly::cosine(5));
  PeriodicFunction sum;
  sum.eval = [&](double x) { return f(x) + g(x); };
  sum.frequency_hint = 12;
  CHECK(modulus(sum, 2, 0.4, opts).lower <= r1.lower + modulus(g, 2, 0.4, opts).upper + 1e-9);

  const ModulusResult ser = modulus_serial(f, 2, 0.4, opts);
  CHECK(ser.lower == r1.lower);
  CHECK(ser.h == r1.h);
  CHECK(ser.x == r1.x);
}

TEST_CASE("breakpoint augmentation finds kinks") {
  // |sin x| has a kink at 0 and pi; the second difference peaks there.
  PeriodicFunction f;
  f.eval = [](double x) { return std::abs(std::sin(x)); };
  f.breakpoints = {-kPi, 0.0, kPi};
  ModulusOptions opts;
  opts.res = 64;
  const double t = 0.01;
  const ModulusResult r = modulus(f, 2, t, opts);
  // At x = 0, h = t: |2 sin t - 0|.
  CHECK(r.lower >= 2.0 * std::sin(t) - 1e-12);
}

TEST_CASE("modulus of T_nu_b respects its fourth-derivative bound") {
  const TruncationParams prm{2, 36, 0.1, {}};
  const TrigPoly T = build_T(prm, make_equidistant(2));
  const double t = kPi / 100;
  const ModulusResult r = modulus(from_trig_poly(T), 4, t);
  CHECK(r.lower <= std::pow(t, 4) * sup_norm(derivative(T, 4)) * (1.0 + 1e-9));
}
