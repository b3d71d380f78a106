#include <doctest.h>

#include <cmath>

#include "trigshape/minimax.hpp"
#include "trigshape/test_functions.hpp"

using namespace trigshape;

TEST_CASE("best approximation of cos (n+1)x") {
  for (int n : {5, 15}) {
    const PeriodicFunction f = from_trig_poly(TrigPoly::cosine(n + 1));
    MinimaxOptions o;
    o.refinements = 2;
    const MinimaxSolution s = best_unconstrained(f, n, o);
    CHECK(s.delta_grid <= 1.0 + 1e-9);
    CHECK(s.delta_grid >= 1.0 - 1e-6);
    CHECK(s.delta_certified >= s.delta_grid - 1e-9);
    CHECK(s.delta_certified <= 1.0 + 1e-6);
    CHECK(equioscillation_count(f, s.poly, s.delta_grid, 64 * (n + 1)) >= 2 * n + 2);
  }
}

TEST_CASE("polynomials are reproduced") {
  const TrigPoly p({0.3, -1.0, 0.5, 0.25}, {0.2, 0.0, -0.7});
  const MinimaxSolution s = best_unconstrained(from_trig_poly(p), 3);
  CHECK(s.delta_grid <= 1e-9);
  CHECK(s.delta_certified <= 1e-9);
}

TEST_CASE("comonotone and relaxed orderings") {
  const PointSet y = make_equidistant(2);
  const PeriodicFunction f = spline_test_function(2);
  const int n = 16;
  const MinimaxSolution free = best_unconstrained(f, n);
  const MinimaxSolution como = best_comonotone(f, n, y);
  CHECK(como.delta_grid >= free.delta_grid - 1e-9);
  CHECK(como.violation <= 1e-8);
  CHECK(como.status != SolutionStatus::Uncertified);

  const MinimaxSolution none_ex = best_excluding(f, n, y, {});
  CHECK(none_ex.delta_grid == doctest::Approx(como.delta_grid).epsilon(1e-9));
  const MinimaxSolution all_ex = best_excluding(f, n, y, {Interval::period()});
  CHECK(all_ex.delta_grid == doctest::Approx(free.delta_grid).epsilon(1e-9));

  const MinimaxSolution r0 = best_measure_relaxed(f, n, y, 0.0);
  CHECK(r0.delta_grid == doctest::Approx(como.delta_grid).epsilon(1e-9));
  const MinimaxSolution r2pi = best_measure_relaxed(f, n, y, kTwoPi);
  CHECK(r2pi.delta_grid == doctest::Approx(free.delta_grid).epsilon(1e-9));
  const MinimaxSolution rmid = best_measure_relaxed(f, n, y, 0.2);
  CHECK(rmid.violation <= 0.2);
  CHECK(rmid.delta_certified <= como.delta_certified + 1e-12);
}

TEST_CASE("comonotone solution of a comonotone polynomial") {
  const PointSet y = make_equidistant(2);
  const TrigPoly pi = pi_as_trigpoly(y);
  const TrigPoly P = antiderivative(pi);
  const MinimaxSolution s = best_comonotone(from_trig_poly(P), 4, y);
  CHECK(s.delta_certified <= 1e-9);
  CHECK(s.violation <= 1e-8);
}

TEST_CASE("ratio table csv") {
  const auto rows = ratio_table([](int) { return from_trig_poly(TrigPoly::cosine(3)); }, 2, {2},
                                [](int) { return ConstraintSpec::none(); });
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].e_lower == doctest::Approx(1.0).epsilon(1e-9));
  const std::string csv = ratio_table_csv(rows);
  CHECK(csv.rfind("n,k,spec,E_lower,E_upper,omega_lower,omega_upper,ratio_lower,ratio_upper\n", 0) == 0);
}

TEST_CASE("interior point and simplex agree on sign-constrained problems") {
  const PointSet y = make_equidistant(2);
  const PeriodicFunction f = spline_test_function(2);
  for (int n : {8, 16, 24}) {
    MinimaxOptions ip, sx;
    ip.method = LpMethod::InteriorPoint;
    sx.method = LpMethod::Simplex;
    ip.cert_rounds = sx.cert_rounds = 0;
    ip.repair = sx.repair = false;
    const MinimaxSolution a = best_comonotone(f, n, y, ip);
    const MinimaxSolution b = best_comonotone(f, n, y, sx);
    CHECK(a.delta_grid == doctest::Approx(b.delta_grid).epsilon(1e-6));
    const std::vector<Interval> ex{{-0.3, 0.2}};
    const MinimaxSolution c = best_excluding(f, n, y, ex, ip);
    const MinimaxSolution d = best_excluding(f, n, y, ex, sx);
    CHECK(c.delta_grid == doctest::Approx(d.delta_grid).epsilon(1e-6));
  }
}
