#include <doctest.h>

#include <cmath>
#include <random>

#include "trigshape/errors.hpp"
#include "trigshape/lp.hpp"

using namespace trigshape;

TEST_CASE("solve_lp small cases") {
  // min delta s.t. |1 - c| <= delta; variables (c, delta).
  {
    const std::vector<double> c{0.0, 1.0};
    const std::vector<double> A{-1.0, -1.0, 1.0, -1.0};
    const std::vector<double> b{-1.0, 1.0};
    const auto r = lp::solve_lp(c, 2, A, b);
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(r.x[0] - 1.0) < 1e-12);
  }
  // One-variable Chebyshev fit of cos at -1, 0, 1: c = midrange.
  {
    const double xs[] = {-1.0, 0.0, 1.0};
    std::vector<double> A, b;
    for (double x : xs) {
      A.insert(A.end(), {-1.0, -1.0});
      b.push_back(-std::cos(x));
      A.insert(A.end(), {1.0, -1.0});
      b.push_back(std::cos(x));
    }
    const auto r = lp::solve_lp(std::vector<double>{0.0, 1.0}, 6, A, b);
    const double mid = 0.5 * (1.0 + std::cos(1.0));
    CHECK(r.x[0] == doctest::Approx(mid).epsilon(1e-12));
    CHECK(r.objective == doctest::Approx(1.0 - mid).epsilon(1e-12));
  }
  // Unbounded primal.
  CHECK_THROWS_AS(lp::solve_lp(std::vector<double>{1.0}, 1, std::vector<double>{1.0}, std::vector<double>{0.0}),
                  NumericalFailure);
  // Infeasible primal: x <= -1 and -x <= -1.
  CHECK_THROWS_AS(lp::solve_lp(std::vector<double>{0.0}, 2, std::vector<double>{1.0, -1.0},
                               std::vector<double>{-1.0, -1.0}),
                  NumericalFailure);
}

TEST_CASE("random LPs match brute-force vertex enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    // 2 variables, box |x_i| <= 3 plus 5 random halfplanes containing 0.
    std::vector<double> A, b;
    for (int i = 0; i < 2; ++i) {
      for (double sg : {1.0, -1.0}) {
        A.push_back(i == 0 ? sg : 0.0);
        A.push_back(i == 1 ? sg : 0.0);
        b.push_back(3.0);
      }
    }
    for (int k = 0; k < 5; ++k) {
      A.push_back(u(rng));
      A.push_back(u(rng));
      b.push_back(0.2 + std::abs(u(rng)));
    }
    const std::vector<double> c{u(rng), u(rng)};
    const int m = static_cast<int>(b.size());
    const auto r = lp::solve_lp(c, m, A, b);
    // Oracle: best feasible intersection of two constraint lines.
    double best = 1e300;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double a11 = A[2 * i], a12 = A[2 * i + 1], a21 = A[2 * j], a22 = A[2 * j + 1];
        const double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-12) continue;
        const double x = (b[i] * a22 - a12 * b[j]) / det, y = (a11 * b[j] - b[i] * a21) / det;
        bool ok = true;
        for (int k = 0; k < m && ok; ++k) ok = A[2 * k] * x + A[2 * k + 1] * y <= b[k] + 1e-9;
        if (ok) best = std::min(best, c[0] * x + c[1] * y);
      }
    }
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-9));
    for (int k = 0; k < m; ++k) CHECK(A[2 * k] * r.x[0] + A[2 * k + 1] * r.x[1] <= b[k] + 1e-9);
  }
}

TEST_CASE("degenerate problems solve identically across runs") {
  // Many redundant constraints through the optimum.
  std::vector<double> A, b;
  for (int k = 0; k < 40; ++k) {
    const double t = 0.01 * k;
    A.insert(A.end(), {-1.0 - t, -1.0 + t, 0.0});
    b.push_back(0.0);
  }
  A.insert(A.end(), {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0});
  b.insert(b.end(), {1.0, 1.0, 1.0, 1.0});
  const std::vector<double> c{1.0, 1.0, 0.0};
  const int m = static_cast<int>(b.size());
  const auto r1 = lp::solve_lp(c, m, A, b);
  const auto r2 = lp::solve_lp(c, m, A, b);
  CHECK(r1.x == r2.x);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("interior point agrees with the simplex on random standard-form problems") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 4 + trial % 5;
    const long n = 3L * m + trial;
    // A z = b with b = A z0 for some z0 > 0 (feasible); costs bounded by
    // making the last row the sum of z (normalisation).
    std::vector<double> a(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    std::vector<double> cost(static_cast<std::size_t>(n));
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    for (long j = 0; j < n; ++j) {
      const double zj = 0.1 + 0.5 * (U(rng) + 1.0);
      for (int i = 0; i < m; ++i) {
        const double v = i == m - 1 ? 1.0 : U(rng);
        a[static_cast<std::size_t>(j * m + i)] = v;
        b[static_cast<std::size_t>(i)] += v * zj;
      }
      cost[static_cast<std::size_t>(j)] = U(rng);
    }
    const lp::DenseColumns src(m, n, a, cost);
    const auto rs = lp::solve(src, b);
    const auto ri = lp::solve_interior(src, b);
    REQUIRE(rs.status == lp::Status::Optimal);
    REQUIRE(ri.status == lp::Status::Optimal);
    CHECK(std::abs(rs.objective - ri.objective) <= 1e-6 * (1.0 + std::abs(rs.objective)));
    // Primal feasibility of the interior solution.
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (long j = 0; j < n; ++j) row += a[static_cast<std::size_t>(j * m + i)] * ri.x[static_cast<std::size_t>(j)];
      CHECK(std::abs(row - b[static_cast<std::size_t>(i)]) <= 1e-6 * (1.0 + std::abs(b[static_cast<std::size_t>(i)])));
    }
    for (double v : ri.x) CHECK(v >= 0.0);
  }
}
