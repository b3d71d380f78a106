#include "trigshape/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "trigshape/errors.hpp"
#include "trigshape/fourier.hpp"
#include "trigshape/scan.hpp"

namespace trigshape {

ConstraintSpec ConstraintSpec::none() { return {}; }

ConstraintSpec ConstraintSpec::comonotone(PointSet y) {
  ConstraintSpec c;
  c.kind = Kind::Comonotone;
  c.y = std::move(y);
  return c;
}

ConstraintSpec ConstraintSpec::excluding(PointSet y, std::vector<Interval> excluded) {
  ConstraintSpec c;
  c.kind = Kind::ComonotoneExcluding;
  c.y = std::move(y);
  c.excluded = std::move(excluded);
  return c;
}

ConstraintSpec ConstraintSpec::measure_relaxed(PointSet y, double eps) {
  ConstraintSpec c;
  c.kind = Kind::MeasureRelaxed;
  c.y = std::move(y);
  c.eps_budget = eps;
  return c;
}

void ConstraintSpec::validate() const {
  if (kind != Kind::None && !y) throw DomainError("constraint spec needs a point set");
  std::vector<Interval> ex = excluded;
  std::sort(ex.begin(), ex.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (ex[i].lo < -kPi - 1e-12 || ex[i].hi > kPi + 1e-12) throw DomainError("excluded interval outside [-pi, pi]");
    if (i > 0 && ex[i].lo < ex[i - 1].hi) throw DomainError("excluded intervals overlap");
  }
  if (kind == Kind::MeasureRelaxed && !(eps_budget >= 0.0 && eps_budget <= kTwoPi + 1e-12)) {
    throw DomainError("eps budget must lie in [0, 2 pi]");
  }
}

std::string ConstraintSpec::name() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Comonotone: return "comonotone";
    case Kind::ComonotoneExcluding: return "excluding";
    case Kind::MeasureRelaxed: return "measure_relaxed";
  }
  return "unknown";
}

std::string to_string(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::Certified: return "certified";
    case SolutionStatus::Repaired: return "repaired";
    case SolutionStatus::Uncertified: return "uncertified";
  }
  return "unknown";
}

namespace {

double grid_x(long k, long n) { return -kPi + kTwoPi * static_cast<double>(k) / static_cast<double>(n); }

bool in_any(const std::vector<Interval>& set, double x) {
  return std::any_of(set.begin(), set.end(), [x](const Interval& I) { return I.contains(x); });
}

// Standard-form dual of the discretised minimax problem. Rows are the 2n+1
// coefficients followed by the normalisation sum lambda = 1. Columns:
//   [0, K)            lambda+_k : ( phi(x_k), 1),  cost  f(x_k)
//   [K, 2K)           lambda-_k : (-phi(x_k), 1),  cost -f(x_k)
//   [2K, 2K+M)        mu_m      : ( w_m phi'(u_m) / n, 0)
//   [2K+M, 2K+M+2E)   +- phi'(y_i) / n   (free multiplier of P'(y_i) = 0)
//   [2K+M+2E, ... +X) mu at extra (cutting-plane) points
// The simplex multipliers are the coefficients of P followed by delta.
class MinimaxColumns final : public lp::ColumnSource {
 public:
  // `base` (optional) shifts the unknown: the columns describe Q = P - base,
  // with `fvals` already holding f - base on the grid.
  MinimaxColumns(int n, const std::vector<double>& fvals, int M, const PointSet* y,
                 const std::vector<Interval>& excluded, const std::vector<double>& extra,
                 const std::vector<double>& margin, const TrigPoly* base = nullptr)
      : n_(n), K_(static_cast<long>(fvals.size())), M_(M), f_(fvals), extra_(extra), margin_(margin) {
    w_.assign(static_cast<std::size_t>(M_), 0.0);
    if (y != nullptr && M_ > 0) {
      for (long m = 0; m < M_; ++m) {
        const double u = grid_x(m, M_);
        const double p = pi_eval(*y, u);
        if (std::abs(p) > 1e-300 && !in_any(excluded, u)) w_[static_cast<std::size_t>(m)] = p > 0.0 ? 1.0 : -1.0;
      }
      for (double yi : y->points()) {
        double v = yi;
        if (v >= kPi) v -= kTwoPi;
        if (!in_any(excluded, v)) eq_.push_back(v);
      }
    }
    xw_.assign(extra_.size(), 0.0);
    for (std::size_t i = 0; i < extra_.size() && y != nullptr; ++i) {
      const double p = pi_eval(*y, extra_[i]);
      if (std::abs(p) > 1e-300 && !in_any(excluded, extra_[i])) xw_[i] = p > 0.0 ? 1.0 : -1.0;
    }
    // Sign constraint w P'/n >= margin becomes w Q'/n >= margin - w base'/n.
    const double inv_n = 1.0 / std::max(n_, 1);
    mu_cost_.assign(static_cast<std::size_t>(M_), 0.0);
    eq_cost_.assign(eq_.size(), 0.0);
    xcost_ = margin_;
    if (base != nullptr) {
      const TrigPoly db = derivative(*base);
      if (M_ > 0) {
        const std::vector<double> dv = fourier::evaluate_grid(db, static_cast<std::size_t>(M_), -kPi);
        for (long m = 0; m < M_; ++m) {
          mu_cost_[static_cast<std::size_t>(m)] = -w_[static_cast<std::size_t>(m)] * dv[static_cast<std::size_t>(m)] * inv_n;
        }
      }
      for (std::size_t e = 0; e < eq_.size(); ++e) eq_cost_[e] = -db(eq_[e]) * inv_n;
      for (std::size_t i = 0; i < extra_.size(); ++i) xcost_[i] -= xw_[i] * db(extra_[i]) * inv_n;
    }
  }

  int rows() const override { return 2 * n_ + 2; }
  long cols() const override { return xbase() + static_cast<long>(extra_.size()); }
  long xbase() const { return 2 * K_ + M_ + 2 * static_cast<long>(eq_.size()); }
  long K() const { return K_; }
  long M() const { return M_; }
  long E() const { return static_cast<long>(eq_.size()); }

  bool active(long j) const override {
    if (j >= 2 * K_ && j < 2 * K_ + M_) return w_[static_cast<std::size_t>(j - 2 * K_)] != 0.0;
    if (j >= xbase()) return xw_[static_cast<std::size_t>(j - xbase())] != 0.0;
    return true;
  }

  double cost(long j) const override {
    if (j < K_) return f_[static_cast<std::size_t>(j)];
    if (j < 2 * K_) return -f_[static_cast<std::size_t>(j - K_)];
    if (j < 2 * K_ + M_) return mu_cost_[static_cast<std::size_t>(j - 2 * K_)];
    if (j >= xbase()) return xcost_[static_cast<std::size_t>(j - xbase())];
    const long e = j - 2 * K_ - M_;
    const double c = eq_cost_[static_cast<std::size_t>(e / 2)];
    return e % 2 == 0 ? c : -c;
  }

  void column(long j, std::span<double> out) const override {
    if (j < 2 * K_) {
      const double sgn = j < K_ ? 1.0 : -1.0;
      phi(grid_x(j < K_ ? j : j - K_, K_), sgn, out);
      out[static_cast<std::size_t>(2 * n_ + 1)] = 1.0;
    } else if (j < 2 * K_ + M_) {
      const long m = j - 2 * K_;
      dphi(grid_x(m, M_), w_[static_cast<std::size_t>(m)], out);
    } else if (j >= xbase()) {
      const auto i = static_cast<std::size_t>(j - xbase());
      dphi(extra_[i], xw_[i], out);
    } else {
      const long e = j - 2 * K_ - M_;
      dphi(eq_[static_cast<std::size_t>(e / 2)], e % 2 == 0 ? 1.0 : -1.0, out);
    }
  }

  void transpose_multiply(std::span<const double> y, std::span<double> out) const override {
    const TrigPoly P = poly_from(y, n_);
    const double delta = y[static_cast<std::size_t>(2 * n_ + 1)];
    const std::vector<double> pv = fourier::evaluate_grid(P, static_cast<std::size_t>(K_), -kPi);
    for (long k = 0; k < K_; ++k) {
      out[static_cast<std::size_t>(k)] = pv[static_cast<std::size_t>(k)] + delta;
      out[static_cast<std::size_t>(K_ + k)] = -pv[static_cast<std::size_t>(k)] + delta;
    }
    if (cols() == 2 * K_) return;
    const TrigPoly dP = derivative(P);
    const double inv_n = 1.0 / std::max(n_, 1);
    if (M_ > 0) {
      const std::vector<double> dv = fourier::evaluate_grid(dP, static_cast<std::size_t>(M_), -kPi);
      for (long m = 0; m < M_; ++m) {
        out[static_cast<std::size_t>(2 * K_ + m)] = w_[static_cast<std::size_t>(m)] * dv[static_cast<std::size_t>(m)] * inv_n;
      }
    }
    for (std::size_t e = 0; e < eq_.size(); ++e) {
      const double v = dP(eq_[e]) * inv_n;
      out[static_cast<std::size_t>(2 * K_ + M_) + 2 * e] = v;
      out[static_cast<std::size_t>(2 * K_ + M_) + 2 * e + 1] = -v;
    }
    for (std::size_t i = 0; i < extra_.size(); ++i) {
      out[static_cast<std::size_t>(xbase()) + i] = xw_[i] * dP(extra_[i]) * inv_n;
    }
  }

  void reduced_costs(std::span<const double> pi, std::vector<double>& d) const override {
    d.assign(static_cast<std::size_t>(cols()), 0.0);
    const TrigPoly P = poly_from(pi, n_);
    const double delta = pi[static_cast<std::size_t>(2 * n_ + 1)];
    const std::vector<double> pv = fourier::evaluate_grid(P, static_cast<std::size_t>(K_), -kPi);
    for (long k = 0; k < K_; ++k) {
      const double r = f_[static_cast<std::size_t>(k)] - pv[static_cast<std::size_t>(k)];
      d[static_cast<std::size_t>(k)] = r - delta;
      d[static_cast<std::size_t>(K_ + k)] = -r - delta;
    }
    if (M_ == 0 && eq_.empty() && extra_.empty()) return;
    const TrigPoly dP = derivative(P);
    const double inv_n = 1.0 / std::max(n_, 1);
    if (M_ > 0) {
      const std::vector<double> dv = fourier::evaluate_grid(dP, static_cast<std::size_t>(M_), -kPi);
      for (long m = 0; m < M_; ++m) {
        d[static_cast<std::size_t>(2 * K_ + m)] =
            mu_cost_[static_cast<std::size_t>(m)] - w_[static_cast<std::size_t>(m)] * dv[static_cast<std::size_t>(m)] * inv_n;
      }
    }
    for (std::size_t e = 0; e < eq_.size(); ++e) {
      const double v = eq_cost_[e] - dP(eq_[e]) * inv_n;
      d[static_cast<std::size_t>(2 * K_ + M_) + 2 * e] = v;
      d[static_cast<std::size_t>(2 * K_ + M_) + 2 * e + 1] = -v;
    }
    for (std::size_t i = 0; i < extra_.size(); ++i) {
      d[static_cast<std::size_t>(xbase()) + i] = xcost_[i] - xw_[i] * dP(extra_[i]) * inv_n;
    }
  }

  void multiply(std::span<const double> v, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const int n = n_;
    std::vector<double> u(static_cast<std::size_t>(K_));
    double total = 0.0;
    for (long k = 0; k < K_; ++k) {
      const double p = v[static_cast<std::size_t>(k)], q = v[static_cast<std::size_t>(K_ + k)];
      u[static_cast<std::size_t>(k)] = p - q;
      total += p + q;
    }
    const Sums su = sums(u, n);
    out[0] += su.c[0];
    for (int j = 1; j <= n; ++j) {
      out[static_cast<std::size_t>(2 * j - 1)] += su.c[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(2 * j)] += su.s[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(2 * n + 1)] = total;
    if (M_ > 0) {
      std::vector<double> g(static_cast<std::size_t>(M_));
      for (long m = 0; m < M_; ++m) g[static_cast<std::size_t>(m)] = v[static_cast<std::size_t>(2 * K_ + m)] * w_[static_cast<std::size_t>(m)];
      const Sums sg = sums(g, n);
      const double inv_n = 1.0 / std::max(n, 1);
      for (int j = 1; j <= n; ++j) {
        out[static_cast<std::size_t>(2 * j - 1)] -= j * inv_n * sg.s[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(2 * j)] += j * inv_n * sg.c[static_cast<std::size_t>(j)];
      }
    }
    std::vector<double> col(static_cast<std::size_t>(rows()));
    for (long j = 2 * K_ + M_; j < cols(); ++j) {
      const double vj = v[static_cast<std::size_t>(j)];
      if (vj == 0.0 || !active(j)) continue;
      column(j, col);
      for (std::size_t i = 0; i < col.size(); ++i) out[i] += vj * col[i];
    }
  }

  void weighted_gram(std::span<const double> wt, std::vector<double>& out) const override {
    const int n = n_;
    const int r = rows();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(r, r);
    std::vector<double> a(static_cast<std::size_t>(K_)), bd(static_cast<std::size_t>(K_));
    double total = 0.0;
    for (long k = 0; k < K_; ++k) {
      const double p = wt[static_cast<std::size_t>(k)], q = wt[static_cast<std::size_t>(K_ + k)];
      a[static_cast<std::size_t>(k)] = p + q;
      bd[static_cast<std::size_t>(k)] = p - q;
      total += p + q;
    }
    const Sums sa = sums(a, 2 * n);
    const Sums sb = sums(bd, n);
    Sums sg;
    const bool have_mu = M_ > 0;
    if (have_mu) {
      std::vector<double> g(static_cast<std::size_t>(M_));
      for (long m = 0; m < M_; ++m) {
        g[static_cast<std::size_t>(m)] = w_[static_cast<std::size_t>(m)] != 0.0 ? wt[static_cast<std::size_t>(2 * K_ + m)] : 0.0;
      }
      sg = sums(g, 2 * n);
    }
    auto C = [](const Sums& t, int p) { return t.c[static_cast<std::size_t>(std::abs(p))]; };
    auto S = [](const Sums& t, int p) { return p >= 0 ? t.s[static_cast<std::size_t>(p)] : -t.s[static_cast<std::size_t>(-p)]; };
    auto cos_row = [](int j) { return j == 0 ? 0 : 2 * j - 1; };
    const double inv_n2 = 1.0 / (static_cast<double>(std::max(n, 1)) * std::max(n, 1));
    // Products of cos/sin j x and cos/sin l x reduce to sums at j +- l.
    for (int j = 0; j <= n; ++j) {
      for (int l = 0; l <= n; ++l) {
        const double jl = static_cast<double>(j) * l * inv_n2;
        double cc = 0.5 * (C(sa, j - l) + C(sa, j + l));
        if (have_mu) cc += jl * 0.5 * (C(sg, j - l) - C(sg, j + l));
        G(cos_row(j), cos_row(l)) = cc;
        if (l >= 1) {
          double cs = 0.5 * (S(sa, l + j) + S(sa, l - j));
          if (have_mu) cs -= jl * 0.5 * (S(sg, j + l) + S(sg, j - l));
          G(cos_row(j), 2 * l) = cs;
          G(2 * l, cos_row(j)) = cs;
        }
        if (j >= 1 && l >= 1) {
          double ss = 0.5 * (C(sa, j - l) - C(sa, j + l));
          if (have_mu) ss += jl * 0.5 * (C(sg, j - l) + C(sg, j + l));
          G(2 * j, 2 * l) = ss;
        }
      }
    }
    const int last = 2 * n + 1;
    G(last, 0) = G(0, last) = sb.c[0];
    for (int l = 1; l <= n; ++l) {
      G(last, 2 * l - 1) = G(2 * l - 1, last) = sb.c[static_cast<std::size_t>(l)];
      G(last, 2 * l) = G(2 * l, last) = sb.s[static_cast<std::size_t>(l)];
    }
    G(last, last) = total;
    std::vector<double> col(static_cast<std::size_t>(r));
    for (long j = 2 * K_ + M_; j < cols(); ++j) {
      const double wj = wt[static_cast<std::size_t>(j)];
      if (wj == 0.0 || !active(j)) continue;
      column(j, col);
      const Eigen::Map<const Eigen::VectorXd> v(col.data(), r);
      G.noalias() += wj * v * v.transpose();
    }
    out.assign(G.data(), G.data() + static_cast<std::ptrdiff_t>(r) * r);
  }

  static TrigPoly poly_from(std::span<const double> pi, int n) {
    std::vector<double> a(static_cast<std::size_t>(n) + 1), b(static_cast<std::size_t>(n));
    a[0] = pi[0];
    for (int j = 1; j <= n; ++j) {
      a[static_cast<std::size_t>(j)] = pi[static_cast<std::size_t>(2 * j - 1)];
      b[static_cast<std::size_t>(j) - 1] = pi[static_cast<std::size_t>(2 * j)];
    }
    return TrigPoly(std::move(a), std::move(b));
  }

 private:
  // c[p] = sum_k v_k cos(p x_k), s[p] = sum_k v_k sin(p x_k) over the grid
  // x_k = -pi + 2 pi k / N, for p = 0..pmax (pmax < N / 2).
  struct Sums {
    std::vector<double> c, s;
  };
  static Sums sums(const std::vector<double>& v, int pmax) {
    const TrigPoly t = fourier::interpolate(v, pmax, -kPi);
    const double half = 0.5 * static_cast<double>(v.size());
    Sums out;
    out.c.resize(static_cast<std::size_t>(pmax) + 1);
    out.s.assign(static_cast<std::size_t>(pmax) + 1, 0.0);
    out.c[0] = 2.0 * half * t.a(0);
    for (int p = 1; p <= pmax; ++p) {
      out.c[static_cast<std::size_t>(p)] = half * t.a(p);
      out.s[static_cast<std::size_t>(p)] = half * t.b(p);
    }
    return out;
  }

  void phi(double x, double sgn, std::span<double> out) const {
    out[0] = sgn;
    for (int j = 1; j <= n_; ++j) {
      out[static_cast<std::size_t>(2 * j - 1)] = sgn * std::cos(j * x);
      out[static_cast<std::size_t>(2 * j)] = sgn * std::sin(j * x);
    }
  }
  void dphi(double x, double w, std::span<double> out) const {
    const double s = w / std::max(n_, 1);
    out[0] = 0.0;
    for (int j = 1; j <= n_; ++j) {
      out[static_cast<std::size_t>(2 * j - 1)] = -s * j * std::sin(j * x);
      out[static_cast<std::size_t>(2 * j)] = s * j * std::cos(j * x);
    }
    out[static_cast<std::size_t>(2 * n_ + 1)] = 0.0;
  }

  int n_;
  long K_;
  long M_;
  const std::vector<double>& f_;
  std::vector<double> w_;
  std::vector<double> eq_;
  const std::vector<double>& extra_;
  const std::vector<double>& margin_;
  std::vector<double> xw_;
  std::vector<double> mu_cost_;
  std::vector<double> eq_cost_;
  std::vector<double> xcost_;
};

// Coefficients of P and the levelled error h with f - P = +-h alternating
// on the reference points.
Eigen::VectorXd reference_solve(int n, const std::vector<double>& fvals, const std::vector<long>& ref) {
  const auto K = static_cast<long>(fvals.size());
  const int r = 2 * n + 2;
  Eigen::MatrixXd A(r, r);
  Eigen::VectorXd rhs(r);
  for (int i = 0; i < r; ++i) {
    const double x = grid_x(ref[static_cast<std::size_t>(i)], K);
    A(i, 0) = 1.0;
    for (int j = 1; j <= n; ++j) {
      A(i, 2 * j - 1) = std::cos(j * x);
      A(i, 2 * j) = std::sin(j * x);
    }
    A(i, r - 1) = i % 2 == 0 ? 1.0 : -1.0;
    rhs[i] = fvals[static_cast<std::size_t>(ref[static_cast<std::size_t>(i)])];
  }
  return A.partialPivLu().solve(rhs);
}

// Discrete multi-exchange Remez on the approximation grid. Returns the
// basis of the free problem at the final reference, which is primal feasible
// for every constrained variant as well (all mu columns at zero).
std::vector<long> remez_basis(int n, const std::vector<double>& fvals, int max_iter = 60) {
  const auto K = static_cast<long>(fvals.size());
  const int r = 2 * n + 2;
  std::vector<long> ref(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) ref[static_cast<std::size_t>(i)] = static_cast<long>(std::llround(static_cast<double>(i) * K / r)) % K;
  std::sort(ref.begin(), ref.end());
  double h_best = -1.0;
  double h_sign = 1.0;
  std::vector<long> best_ref = ref;
  std::vector<double> e(static_cast<std::size_t>(K));
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd c = reference_solve(n, fvals, ref);
    const double h = c[r - 1];
    if (!std::isfinite(h) || std::abs(h) <= h_best) break;
    h_best = std::abs(h);
    h_sign = h < 0.0 ? -1.0 : 1.0;
    best_ref = ref;
    const std::vector<double> coeffs(c.data(), c.data() + r - 1);
    const std::vector<double> pv =
        fourier::evaluate_grid(MinimaxColumns::poly_from(coeffs, n), static_cast<std::size_t>(K), -kPi);
    long kmax = 0;
    for (long k = 0; k < K; ++k) {
      e[static_cast<std::size_t>(k)] = fvals[static_cast<std::size_t>(k)] - pv[static_cast<std::size_t>(k)];
      if (std::abs(e[static_cast<std::size_t>(k)]) > std::abs(e[static_cast<std::size_t>(kmax)])) kmax = k;
    }
    auto mag = [&](long k) { return std::abs(e[static_cast<std::size_t>(k)]); };
    auto pos = [&](long k) { return e[static_cast<std::size_t>(k)] >= 0.0; };
    if (mag(kmax) <= h_best * (1.0 + 1e-12)) break;
    // One extremum per sign run, scanning the circle from the global maximum.
    std::vector<long> pts;
    for (long t = 0; t < K; ++t) {
      const long k = (kmax + t) % K;
      if (!pts.empty() && pos(k) == pos(pts.back())) {
        if (mag(k) > mag(pts.back())) pts.back() = k;
        continue;
      }
      pts.push_back(k);
    }
    if (pts.size() > 1 && pos(pts.back()) == pos(pts.front())) pts.pop_back();
    if (static_cast<int>(pts.size()) < r) break;
    // Drop the smallest extremum together with the smaller of its two
    // neighbours, which keeps the signs alternating around the circle.
    while (static_cast<int>(pts.size()) > r) {
      const std::size_t m = pts.size();
      std::size_t imin = 0;
      for (std::size_t i = 1; i < m; ++i) {
        if (mag(pts[i]) < mag(pts[imin])) imin = i;
      }
      const std::size_t prev = (imin + m - 1) % m, next = (imin + 1) % m;
      const std::size_t other = mag(pts[prev]) < mag(pts[next]) ? prev : next;
      pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(std::max(imin, other)));
      pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(std::min(imin, other)));
    }
    std::sort(pts.begin(), pts.end());
    ref = std::move(pts);
  }
  // f - P = sign * h at a reference point means the lambda+ column is active.
  std::vector<long> basis(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    const double sg = (i % 2 == 0 ? 1.0 : -1.0) * h_sign;
    const long k = best_ref[static_cast<std::size_t>(i)];
    basis[static_cast<std::size_t>(i)] = sg > 0.0 ? k : K + k;
  }
  return basis;
}

struct WarmStart {
  std::vector<long> basis;
  long K = 0;
  long M = 0;
  long E = 0;
  long X = 0;
};

std::optional<std::vector<long>> map_basis(const WarmStart& w, long K, long M, long E, long X) {
  if (w.basis.empty() || w.K == 0 || K % w.K != 0) return std::nullopt;
  const long fk = K / w.K;
  std::vector<long> out;
  out.reserve(w.basis.size());
  for (long j : w.basis) {
    if (j < w.K) {
      out.push_back(j * fk);
    } else if (j < 2 * w.K) {
      out.push_back(K + (j - w.K) * fk);
    } else if (j < 2 * w.K + w.M) {
      if (M % w.M != 0) return std::nullopt;
      out.push_back(2 * K + (j - 2 * w.K) * (M / w.M));
    } else if (j < 2 * w.K + w.M + 2 * w.E) {
      if (E != w.E) return std::nullopt;
      out.push_back(2 * K + M + (j - 2 * w.K - w.M));
    } else if (j < 2 * w.K + w.M + 2 * w.E + w.X) {
      if (E != w.E || X < w.X) return std::nullopt;
      out.push_back(2 * K + M + 2 * E + (j - 2 * w.K - w.M - 2 * w.E));
    } else {
      return std::nullopt;
    }
  }
  return out;
}

struct Stage {
  TrigPoly poly;
  double delta = 0.0;
  long K = 0;
  long M = 0;
  WarmStart warm;
  std::vector<double> sign_duals;
  long iterations = 0;
};

std::vector<double> sample(const PeriodicFunction& f, long K, const std::vector<double>* coarse) {
  std::vector<double> v(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k) {
    if (coarse != nullptr && k % 2 == 0) {
      v[static_cast<std::size_t>(k)] = (*coarse)[static_cast<std::size_t>(k / 2)];
    } else {
      v[static_cast<std::size_t>(k)] = f(grid_x(k, K));
    }
  }
  return v;
}

constexpr int kRemezMaxDegree = 400;

struct LpSettings {
  LpMethod method = LpMethod::Simplex;
  lp::Options simplex;
  lp::InteriorOptions ipm;
};

Stage run_lp(int n, const std::vector<double>& fvals, long M, const PointSet* y, const std::vector<Interval>& excluded,
             const std::vector<double>& extra, const std::vector<double>& margin, const WarmStart* warm,
             const LpSettings& how) {
  const auto K = static_cast<long>(fvals.size());
  std::vector<double> rhs(static_cast<std::size_t>(2 * n + 2), 0.0);
  rhs.back() = 1.0;
  Stage st;
  st.K = K;
  st.M = M;
  st.sign_duals.assign(static_cast<std::size_t>(M), 0.0);
  auto fail = [&](lp::Status status) {
    return NumericalFailure("minimax LP ended with status " + lp::to_string(status) + " (degree " + std::to_string(n) +
                            ", grid " + std::to_string(K) + ")");
  };
  if (how.method == LpMethod::InteriorPoint) {
    // Solve for the correction to the Fourier partial sum so that the
    // costs are on the scale of the error rather than of f.
    const TrigPoly base = fourier::interpolate(fvals, n, -kPi);
    const std::vector<double> bv = fourier::evaluate_grid(base, static_cast<std::size_t>(K), -kPi);
    std::vector<double> resid(fvals.size());
    for (std::size_t k = 0; k < resid.size(); ++k) resid[k] = fvals[k] - bv[k];
    const MinimaxColumns src(n, resid, static_cast<int>(M), y, excluded, extra, margin, &base);
    const lp::Result r = lp::solve_interior(src, rhs, how.ipm);
    if (r.status != lp::Status::Optimal) throw fail(r.status);
    st.poly = base + MinimaxColumns::poly_from(r.pi, n);
    st.delta = r.objective;
    st.iterations = r.iterations;
    for (long m = 0; m < M; ++m) st.sign_duals[static_cast<std::size_t>(m)] = r.x[static_cast<std::size_t>(2 * K + m)];
    return st;
  }
  const MinimaxColumns src(n, fvals, static_cast<int>(M), y, excluded, extra, margin);
  std::optional<std::vector<long>> start;
  if (warm != nullptr) start = map_basis(*warm, K, M, src.E(), static_cast<long>(extra.size()));
  if (!start) start = remez_basis(n, fvals);
  const lp::Result r = lp::solve(src, rhs, how.simplex, start);
  if (r.status != lp::Status::Optimal) throw fail(r.status);
  st.poly = MinimaxColumns::poly_from(r.pi, n);
  st.delta = r.objective;
  st.iterations = r.iterations;
  st.warm = {r.basis, K, M, src.E(), static_cast<long>(extra.size())};
  for (std::size_t i = 0; i < r.basis.size(); ++i) {
    const long j = r.basis[i];
    if (j >= 2 * K && j < 2 * K + M) st.sign_duals[static_cast<std::size_t>(j - 2 * K)] = r.x_basic[i];
  }
  return st;
}

double outside_violation(const TrigPoly& P, const PointSet& y, const std::vector<Interval>& excluded, double* total) {
  const ViolationReport rep = violation_measure(P, y);
  if (total != nullptr) *total = rep.measure;
  return measure_outside(rep.intervals, excluded);
}

struct Request {
  const PeriodicFunction* f = nullptr;
  int n = 0;
  const PointSet* y = nullptr;
  std::vector<Interval> excluded;
  std::string spec;
  const WarmStart* warm = nullptr;
};

MinimaxSolution solve_request(const Request& rq, const MinimaxOptions& opts) {
  const int n = rq.n;
  if (n < 0) throw DomainError("degree must be nonnegative");
  if (n > 800) throw DomainError("degree above the supported cap of 800");
  const int s = rq.y != nullptr ? rq.y->s() : 0;
  const bool constrained = rq.y != nullptr;
  long K = opts.approx_grid > 0 ? opts.approx_grid : 8L * (n + 1);
  long M = constrained ? (opts.constraint_grid > 0 ? opts.constraint_grid : 16L * (n + s)) : 0;
  if (K < 4L * (n + 1)) throw DomainError("approximation grid must have at least 4 (n + 1) points");
  if (constrained && M < 8L * (n + s)) throw DomainError("constraint grid must have at least 8 (n + s) points");

  LpSettings how{opts.method, opts.lp, opts.ipm};
  // The discrete Remez start loses accuracy on clustered references at high
  // degree; the interior point method has no such start to lose.
  if (how.method == LpMethod::Auto) {
    how.method = constrained || n > kRemezMaxDegree ? LpMethod::InteriorPoint : LpMethod::Simplex;
  }
  std::vector<double> fvals = sample(*rq.f, K, nullptr);
  std::vector<double> extra, margin;
  long iters = 0;
  Stage st = run_lp(n, fvals, M, rq.y, rq.excluded, extra, margin, rq.warm, how);
  iters += st.iterations;
  for (int r = 0; r < opts.refinements; ++r) {
    K *= 2;
    M *= 2;
    fvals = sample(*rq.f, K, &fvals);
    const WarmStart w = st.warm;
    st = run_lp(n, fvals, M, rq.y, rq.excluded, extra, margin, &w, how);
    iters += st.iterations;
  }
  // The margin-free grid LP is a relaxation of the continuum problem.
  const double delta_grid = st.delta;

  MinimaxSolution sol;
  sol.status = SolutionStatus::Certified;
  TrigPoly P = st.poly;
  if (constrained) {
    double total = 0.0;
    double out = outside_violation(P, *rq.y, rq.excluded, &total);
    const int rounds = n > kRemezMaxDegree ? 0 : opts.cert_rounds;
    for (int r = 0; r < rounds && out > opts.cert_tol; ++r) {
      // Cutting planes around the deepest point of every violation
      // interval, with a margin of twice the dip depth so that the two
      // touching points of the discrete solution merge.
      const TrigPoly q = multiply(derivative(P), pi_as_trigpoly(*rq.y));
      const std::size_t before = extra.size();
      for (const Interval& I : violation_measure(P, *rq.y).intervals) {
        if (in_any(rq.excluded, I.center())) continue;
        const auto pk = scan::golden_max([&](double x) { return -q(x); }, I.lo, I.hi);
        const double w = I.length();
        for (int t = -4; t <= 4; ++t) {
          const double x = std::clamp(pk.x + 0.5 * w * t, -kPi, kPi);
          const double p = std::abs(pi_eval(*rq.y, x));
          if (p < 1e-300) continue;
          // Nearly coincident columns make the LP ill-conditioned.
          const double grid_pos = (x + kPi) * static_cast<double>(M) / kTwoPi;
          if (std::abs(grid_pos - std::round(grid_pos)) < 1e-3) continue;
          const double gap = 1e-3 * kTwoPi / static_cast<double>(M);
          if (std::any_of(extra.begin(), extra.end(), [x, gap](double e) { return std::abs(e - x) < gap; })) continue;
          extra.push_back(x);
          margin.push_back(2.0 * pk.value / (p * std::max(n, 1)));
        }
      }
      if (extra.size() == before) break;
      const WarmStart w = st.warm;
      st = run_lp(n, fvals, M, rq.y, rq.excluded, extra, margin, &w, how);
      iters += st.iterations;
      P = st.poly;
      out = outside_violation(P, *rq.y, rq.excluded, &total);
    }
    const TrigPoly pi = pi_as_trigpoly(*rq.y);
    if (out > opts.cert_tol && opts.repair && std::abs(pi.a(0)) <= kMeanTol && n >= rq.y->s()) {
      // P + eta int Pi: P' Pi gains eta Pi^2.
      const TrigPoly Q = antiderivative(pi.plus_constant(-pi.a(0))).with_degree(n);
      const double scale = std::max(1e-300, derivative(P).max_abs_coeff());
      double eta = 1e-12 * scale;
      int k = 0;
      while (outside_violation(P + eta * Q, *rq.y, rq.excluded, nullptr) > opts.cert_tol && k < 80) {
        eta *= 2.0;
        ++k;
      }
      if (k < 80) {
        double lo = eta / 2.0, hi = eta;
        for (int it = 0; it < 8 && k > 0; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (outside_violation(P + mid * Q, *rq.y, rq.excluded, nullptr) > opts.cert_tol) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        P = P + hi * Q;
        sol.status = SolutionStatus::Repaired;
      } else {
        sol.status = SolutionStatus::Uncertified;
      }
      out = outside_violation(P, *rq.y, rq.excluded, &total);
    } else if (out > opts.cert_tol) {
      sol.status = SolutionStatus::Uncertified;
    }
    sol.violation = total;
    sol.violation_outside = out;
  }

  sol.poly = P;
  sol.delta_grid = delta_grid;
  sol.delta_certified = std::max(sup_error(*rq.f, P, Interval::period(), static_cast<int>(opts.certify_factor * K)),
                                 delta_grid);
  sol.spec = rq.spec;
  sol.degree = n;
  sol.approx_grid = static_cast<int>(K);
  sol.constraint_grid = static_cast<int>(M);
  sol.lp_iterations = iters;
  sol.excluded = rq.excluded;
  sol.basis = st.warm.basis;
  sol.sign_duals = st.sign_duals;
  return sol;
}

}  // namespace

MinimaxSolution best_unconstrained(const PeriodicFunction& f, int n, const MinimaxOptions& opts) {
  Request rq;
  rq.f = &f;
  rq.n = n;
  rq.spec = "none";
  return solve_request(rq, opts);
}

MinimaxSolution best_comonotone(const PeriodicFunction& f, int n, const PointSet& y, const MinimaxOptions& opts) {
  Request rq;
  rq.f = &f;
  rq.n = n;
  rq.y = &y;
  rq.spec = "comonotone";
  return solve_request(rq, opts);
}

MinimaxSolution best_excluding(const PeriodicFunction& f, int n, const PointSet& y,
                               const std::vector<Interval>& excluded, const MinimaxOptions& opts) {
  ConstraintSpec::excluding(y, excluded).validate();
  Request rq;
  rq.f = &f;
  rq.n = n;
  rq.y = &y;
  rq.excluded = excluded;
  rq.spec = "excluding";
  return solve_request(rq, opts);
}

namespace {

struct Candidate {
  Interval I;
  double score = 0.0;
};

void add_intervals(std::vector<Interval>& pool, const std::vector<Interval>& more) {
  pool.insert(pool.end(), more.begin(), more.end());
  std::sort(pool.begin(), pool.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& I : pool) {
    if (!merged.empty() && I.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, I.hi);
    } else {
      merged.push_back(I);
    }
  }
  pool = std::move(merged);
}

// Greedy pick under the budget: highest shadow price per unit length first.
std::vector<Interval> select(const std::vector<Interval>& pool, const std::vector<double>& shadow, long M,
                             double budget) {
  std::vector<Candidate> cands;
  const double h = M > 0 ? kTwoPi / static_cast<double>(M) : 0.0;
  for (const Interval& I : pool) {
    Candidate c{I, 0.0};
    for (long m = 0; m < M; ++m) {
      const double u = grid_x(m, M);
      if (u >= I.lo - h && u <= I.hi + h) c.score += shadow[static_cast<std::size_t>(m)];
    }
    cands.push_back(c);
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    const double ra = a.score / std::max(a.I.length(), 1e-300), rb = b.score / std::max(b.I.length(), 1e-300);
    if (ra != rb) return ra > rb;
    return a.I.lo < b.I.lo;
  });
  std::vector<Interval> out;
  double left = budget;
  for (const Candidate& c : cands) {
    if (left <= 0.0) break;
    if (c.score <= 0.0) continue;
    if (c.I.length() <= left) {
      out.push_back(c.I);
      left -= c.I.length();
    } else {
      // Partial: a window of the remaining length around the price peak.
      long best_m = -1;
      double best_v = -1.0;
      for (long m = 0; m < M; ++m) {
        const double u = grid_x(m, M);
        if (u >= c.I.lo && u <= c.I.hi && shadow[static_cast<std::size_t>(m)] > best_v) {
          best_v = shadow[static_cast<std::size_t>(m)];
          best_m = m;
        }
      }
      const double centre = best_m >= 0 ? grid_x(best_m, M) : c.I.center();
      double lo = std::max(c.I.lo, centre - left / 2.0);
      double hi = std::min(c.I.hi, lo + left);
      lo = std::max(c.I.lo, hi - left);
      out.emplace_back(lo, hi);
      left = 0.0;
    }
  }
  std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return out;
}

}  // namespace

MinimaxSolution best_measure_relaxed(const PeriodicFunction& f, int n, const PointSet& y, double eps,
                                     const MinimaxOptions& opts) {
  ConstraintSpec::measure_relaxed(y, eps).validate();
  MinimaxSolution free = best_unconstrained(f, n, opts);
  free.violation = violation_measure(free.poly, y).measure;
  free.violation_outside = free.violation;
  free.spec = "measure_relaxed";
  if (free.violation <= eps) return free;

  MinimaxSolution best = best_comonotone(f, n, y, opts);
  best.spec = "measure_relaxed";
  if (eps <= 0.0) return best;

  const double budget = eps - 4.0 * opts.cert_tol - 1e-12;
  std::vector<Interval> pool;
  add_intervals(pool, violation_measure(free.poly, y).intervals);
  const long M = best.constraint_grid;
  std::vector<double> shadow = best.sign_duals;
  const WarmStart warm{free.basis, free.approx_grid, 0, 0};
  std::vector<Interval> previous;
  for (int round = 0; round < opts.greedy_rounds && budget > 0.0; ++round) {
    const std::vector<Interval> chosen = select(pool, shadow, M, budget);
    if (chosen.empty()) break;
    bool same = chosen.size() == previous.size();
    for (std::size_t i = 0; same && i < chosen.size(); ++i) {
      same = chosen[i].lo == previous[i].lo && chosen[i].hi == previous[i].hi;
    }
    if (same) break;
    previous = chosen;

    Request rq;
    rq.f = &f;
    rq.n = n;
    rq.y = &y;
    rq.excluded = chosen;
    rq.spec = "measure_relaxed";
    rq.warm = &warm;
    MinimaxOptions o = opts;
    o.constraint_grid = static_cast<int>(M);
    const MinimaxSolution cand = solve_request(rq, o);
    if (cand.violation <= eps && cand.status != SolutionStatus::Uncertified &&
        cand.delta_certified < best.delta_certified) {
      best = cand;
    }
    if (static_cast<long>(cand.sign_duals.size()) == M) {
      for (long m = 0; m < M; ++m) shadow[static_cast<std::size_t>(m)] += cand.sign_duals[static_cast<std::size_t>(m)];
    }
    add_intervals(pool, violation_measure(cand.poly, y).intervals);
  }
  return best;
}

MinimaxSolution solve(const MinimaxProblem& problem) {
  const ConstraintSpec& spec = problem.spec;
  spec.validate();
  switch (spec.kind) {
    case ConstraintSpec::Kind::None: return best_unconstrained(problem.f, problem.degree, problem.options);
    case ConstraintSpec::Kind::Comonotone: return best_comonotone(problem.f, problem.degree, *spec.y, problem.options);
    case ConstraintSpec::Kind::ComonotoneExcluding:
      return best_excluding(problem.f, problem.degree, *spec.y, spec.excluded, problem.options);
    case ConstraintSpec::Kind::MeasureRelaxed:
      return best_measure_relaxed(problem.f, problem.degree, *spec.y, spec.eps_budget, problem.options);
  }
  throw DomainError("unknown constraint kind");
}

double sup_error(const PeriodicFunction& f, const TrigPoly& p, const Interval& J, int points) {
  points = std::max(points, 16);
  const bool full = J.length() >= kTwoPi - 1e-12;
  auto err = [&](double x) { return std::abs(f(x) - p(x)); };
  std::vector<double> values(static_cast<std::size_t>(points));
  double step = 0.0;
  if (full && p.degree() > 0 && static_cast<std::size_t>(points) > 2 * static_cast<std::size_t>(p.degree())) {
    const std::vector<double> pv = fourier::evaluate_grid(p, static_cast<std::size_t>(points), -kPi);
    step = kTwoPi / points;
    for (int i = 0; i < points; ++i) {
      values[static_cast<std::size_t>(i)] = std::abs(f(-kPi + step * i) - pv[static_cast<std::size_t>(i)]);
    }
    // polish_grid_max expects the last sample at the right end.
    values.push_back(err(kPi));
  } else {
    step = J.length() / (points - 1);
    for (int i = 0; i < points; ++i) values[static_cast<std::size_t>(i)] = err(J.lo + step * i);
  }
  const double vmax = *std::max_element(values.begin(), values.end());
  double best = scan::polish_grid_max(err, J.lo, J.hi, values, 0.01 * vmax + 1e-300).value;
  for (double b : f.breakpoints) {
    if (J.contains(b)) best = std::max(best, err(b));
  }
  return best;
}

int equioscillation_count(const PeriodicFunction& f, const TrigPoly& p, double level, int grid, double rel_tol) {
  grid = std::max(grid, 16);
  auto e = [&](double x) { return f(x) - p(x); };
  std::vector<double> v(static_cast<std::size_t>(grid));
  const double h = kTwoPi / grid;
  for (int i = 0; i < grid; ++i) v[static_cast<std::size_t>(i)] = e(-kPi + h * i);
  std::vector<int> signs;
  for (int i = 0; i < grid; ++i) {
    const double a = std::abs(v[static_cast<std::size_t>((i + grid - 1) % grid)]);
    const double c = std::abs(v[static_cast<std::size_t>(i)]);
    const double b = std::abs(v[static_cast<std::size_t>((i + 1) % grid)]);
    if (c < a || c < b) continue;
    const double x0 = -kPi + h * i;
    const auto pk = scan::golden_max([&](double x) { return std::abs(e(x)); }, x0 - h, x0 + h);
    if (pk.value >= (1.0 - rel_tol) * level) {
      const int sg = e(pk.x) > 0.0 ? 1 : -1;
      signs.push_back(sg);
    }
  }
  if (signs.empty()) return 0;
  int runs = 1;
  for (std::size_t i = 1; i < signs.size(); ++i) {
    if (signs[i] != signs[i - 1]) ++runs;
  }
  if (runs > 1 && signs.front() == signs.back()) --runs;
  return runs;
}

std::vector<RatioRow> ratio_table(const std::function<PeriodicFunction(int)>& family, int k,
                                  const std::vector<int>& n_list,
                                  const std::function<ConstraintSpec(int)>& spec_for_n, const MinimaxOptions& opts,
                                  const ModulusOptions& mopts) {
  std::vector<RatioRow> rows;
  for (int n : n_list) {
    MinimaxProblem prob;
    prob.f = family(n);
    prob.degree = n;
    prob.spec = spec_for_n(n);
    prob.options = opts;
    const MinimaxSolution sol = solve(prob);
    const ModulusResult om = modulus(prob.f, k, kPi / n, mopts);
    RatioRow r;
    r.n = n;
    r.k = k;
    r.spec = prob.spec.name();
    r.e_lower = sol.delta_grid;
    r.e_upper = sol.delta_certified;
    r.omega_lower = om.lower;
    r.omega_upper = om.upper;
    r.ratio_lower = om.upper > 0.0 ? r.e_lower / om.upper : 0.0;
    r.ratio_upper = om.lower > 0.0 ? r.e_upper / om.lower : std::numeric_limits<double>::infinity();
    rows.push_back(r);
  }
  return rows;
}

std::string ratio_table_csv(const std::vector<RatioRow>& rows) {
  std::ostringstream os;
  os << "n,k,spec,E_lower,E_upper,omega_lower,omega_upper,ratio_lower,ratio_upper\n";
  char buf[512];
  for (const RatioRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.n, r.k, r.spec.c_str(),
                  r.e_lower, r.e_upper, r.omega_lower, r.omega_upper, r.ratio_lower, r.ratio_upper);
    os << buf;
  }
  return os.str();
}

void to_json(nlohmann::json& j, const RatioRow& r) {
  j = nlohmann::json{{"n", r.n},
                     {"k", r.k},
                     {"spec", r.spec},
                     {"E_lower", r.e_lower},
                     {"E_upper", r.e_upper},
                     {"omega_lower", r.omega_lower},
                     {"omega_upper", r.omega_upper},
                     {"ratio_lower", r.ratio_lower},
                     {"ratio_upper", std::isfinite(r.ratio_upper) ? nlohmann::json(r.ratio_upper) : nlohmann::json(nullptr)}};
}

void to_json(nlohmann::json& j, const MinimaxSolution& s) {
  nlohmann::json ex = nlohmann::json::array();
  for (const Interval& I : s.excluded) ex.push_back({I.lo, I.hi});
  j = nlohmann::json{{"spec", s.spec},
                     {"degree", s.degree},
                     {"delta_grid", s.delta_grid},
                     {"delta_certified", s.delta_certified},
                     {"violation", s.violation},
                     {"violation_outside", s.violation_outside},
                     {"status", to_string(s.status)},
                     {"approx_grid", s.approx_grid},
                     {"constraint_grid", s.constraint_grid},
                     {"lp_iterations", s.lp_iterations},
                     {"excluded", ex},
                     {"poly", s.poly}};
}

}  // namespace trigshape
