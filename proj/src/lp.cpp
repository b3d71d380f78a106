#include "trigshape/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "trigshape/errors.hpp"

namespace trigshape::lp {

void ColumnSource::reduced_costs(std::span<const double> pi, std::vector<double>& d) const {
  const int m = rows();
  const long n = cols();
  d.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> col(static_cast<std::size_t>(m));
  for (long j = 0; j < n; ++j) {
    column(j, col);
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += pi[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(i)];
    d[static_cast<std::size_t>(j)] = cost(j) - dot;
  }
}

void ColumnSource::multiply(std::span<const double> v, std::span<double> out) const {
  const int m = rows();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> col(static_cast<std::size_t>(m));
  for (long j = 0; j < cols(); ++j) {
    const double vj = v[static_cast<std::size_t>(j)];
    if (vj == 0.0 || !active(j)) continue;
    column(j, col);
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] += vj * col[static_cast<std::size_t>(i)];
  }
}

void ColumnSource::transpose_multiply(std::span<const double> y, std::span<double> out) const {
  const int m = rows();
  std::vector<double> col(static_cast<std::size_t>(m));
  for (long j = 0; j < cols(); ++j) {
    double dot = 0.0;
    if (active(j)) {
      column(j, col);
      for (int i = 0; i < m; ++i) dot += y[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(i)];
    }
    out[static_cast<std::size_t>(j)] = dot;
  }
}

void ColumnSource::weighted_gram(std::span<const double> w, std::vector<double>& out) const {
  const int m = rows();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> col(static_cast<std::size_t>(m));
  for (long j = 0; j < cols(); ++j) {
    const double wj = w[static_cast<std::size_t>(j)];
    if (wj == 0.0 || !active(j)) continue;
    column(j, col);
    const Eigen::Map<const Eigen::VectorXd> a(col.data(), m);
    G.selfadjointView<Eigen::Lower>().rankUpdate(a, wj);
  }
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  out.assign(G.data(), G.data() + static_cast<std::ptrdiff_t>(m) * m);
}

DenseColumns::DenseColumns(int rows, long cols, std::vector<double> a_colmajor, std::vector<double> cost)
    : rows_(rows), cols_(cols), a_(std::move(a_colmajor)), cost_(std::move(cost)) {
  if (rows_ < 1 || cols_ < 0 || a_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_) ||
      cost_.size() != static_cast<std::size_t>(cols_)) {
    throw DomainError("DenseColumns: dimension mismatch");
  }
}

void DenseColumns::column(long j, std::span<double> out) const {
  const auto off = static_cast<std::size_t>(j) * static_cast<std::size_t>(rows_);
  std::copy_n(a_.begin() + static_cast<std::ptrdiff_t>(off), rows_, out.begin());
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kGrowthLimit = 1e8;
constexpr double kRelativePivot = 1e-9;

// Original columns 0..n-1 followed by one artificial column per row,
// sign(b_i) e_i, so that the all-artificial basis is feasible.
class Engine {
 public:
  Engine(const ColumnSource& src, std::span<const double> b, const Options& opts)
      : src_(src), m_(src.rows()), n_(src.cols()), opts_(opts) {
    b_ = Eigen::Map<const Eigen::VectorXd>(b.data(), m_);
    art_sign_.resize(m_);
    for (int i = 0; i < m_; ++i) art_sign_[i] = b_[i] < 0.0 ? -1.0 : 1.0;
    is_basic_.assign(static_cast<std::size_t>(n_ + m_), 0);
    cmax_ = 0.0;
    for (long j = 0; j < n_; ++j) cmax_ = std::max(cmax_, std::abs(src_.cost(j)));
    reinvert_every_ = opts.reinvert_every > 0 ? opts.reinvert_every : std::max<long>(64, m_);
    col_.resize(static_cast<std::size_t>(m_));
  }

  bool try_warm(const std::vector<long>& basis) {
    if (static_cast<int>(basis.size()) != m_) return false;
    std::vector<long> sorted = basis;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (long j : basis) {
      if (j < 0 || j >= n_ || !src_.active(j)) return false;
    }
    set_head(basis);
    try {
      reinvert();
    } catch (const NumericalFailure&) {
      return false;
    }
    const double tol = opts_.feasibility_tol * std::max(1.0, b_.cwiseAbs().maxCoeff());
    for (int i = 0; i < m_; ++i) {
      if (xB_[i] < -tol) return false;
      if (xB_[i] < 0.0) xB_[i] = 0.0;
    }
    return true;
  }

  void cold_start() {
    std::vector<long> head(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) head[static_cast<std::size_t>(i)] = n_ + i;
    set_head(head);
    Binv_ = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) Binv_(i, i) = art_sign_[i];
    xB_ = b_.cwiseAbs();
    since_reinvert_ = 0;
  }

  Status run_phase(bool phase1) {
    phase1_ = phase1;
    Eigen::VectorXd cB(m_);
    std::vector<double> d;
    int degenerate_run = 0;
    // Columns whose pivot column had no usable entry; a true unbounded ray
    // is reported only after repeated rejections.
    std::vector<long> rejected;
    const double ctol = opts_.optimality_tol * std::max(1.0, phase1 ? 1.0 : cmax_);
    auto dj_of = [&](long j) {
      if (j >= n_) return cost(j) - pi_[j - n_] * art_sign_[j - n_];
      return phase1 ? -pi_dot(j, d) : d[static_cast<std::size_t>(j)];
    };
    while (true) {
      if (iterations_ >= opts_.max_iterations) return Status::IterationLimit;
      for (int i = 0; i < m_; ++i) cB[i] = cost(head_[static_cast<std::size_t>(i)]);
      pi_ = Binv_.transpose() * cB;
      src_.reduced_costs(std::span<const double>(pi_.data(), static_cast<std::size_t>(m_)), d);
      const bool bland = degenerate_run >= opts_.bland_after;

      long q = -1;
      double best = 0.0;
      const long total = phase1 ? n_ + m_ : n_;
      for (long j = 0; j < total; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] || !active(j)) continue;
        const double dj = dj_of(j);
        if (!(dj > ctol)) continue;
        if (!rejected.empty() && std::find(rejected.begin(), rejected.end(), j) != rejected.end()) continue;
        if (bland) {
          q = j;
          break;
        }
        if (dj > best) {
          best = dj;
          q = j;
        }
      }
      if (q < 0) return Status::Optimal;

      column(q, col_);
      Eigen::VectorXd alpha = Binv_ * Eigen::Map<const Eigen::VectorXd>(col_.data(), m_);
      if (since_reinvert_ > 0 && alpha.cwiseAbs().maxCoeff() > kGrowthLimit) {
        // Large entries signal an inaccurate inverse; rebuild and retry.
        reinvert();
        continue;
      }
      const int r = ratio_test(alpha, bland);
      if (r < 0) {
        const bool ray = (alpha.array() <= 0.0).all() && alpha.minCoeff() < -opts_.pivot_tol;
        if (ray || rejected.size() >= 64) return Status::Unbounded;
        rejected.push_back(q);
        continue;
      }
      const double theta = std::max(0.0, xB_[r]) / alpha[r];
      pivot(q, r, alpha, theta);
      if (theta <= 1e-14) {
        ++degenerate_run;
        ++degenerate_;
      } else {
        degenerate_run = 0;
        rejected.clear();
      }
      if (since_reinvert_ >= reinvert_every_) reinvert();
    }
  }

  // Exact minimum ratio. Among (near) ties the largest pivot wins, or the
  // smallest column index under Bland's rule. Pivots far below the largest
  // entry of the column are refused.
  int ratio_test(const Eigen::VectorXd& alpha, bool bland) const {
    const double amax = alpha.cwiseAbs().maxCoeff();
    const double ptol = std::max(opts_.pivot_tol, kRelativePivot * amax);
    double theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      if (alpha[i] > ptol) theta = std::min(theta, std::max(0.0, xB_[i]) / alpha[i]);
    }
    int r = -1;
    const double cut = theta + 1e-12 * std::max(1.0, theta);
    for (int i = 0; i < m_; ++i) {
      if (alpha[i] <= ptol || std::max(0.0, xB_[i]) / alpha[i] > cut) continue;
      if (r < 0) {
        r = i;
      } else if (bland) {
        if (head_[static_cast<std::size_t>(i)] < head_[static_cast<std::size_t>(r)]) r = i;
      } else if (alpha[i] > alpha[r] ||
                 (alpha[i] == alpha[r] && head_[static_cast<std::size_t>(i)] < head_[static_cast<std::size_t>(r)])) {
        r = i;
      }
    }
    return r;
  }

  // Pivot zero-level artificial columns out of the basis where possible.
  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (head_[static_cast<std::size_t>(r)] < n_) continue;
      const Eigen::RowVectorXd row = Binv_.row(r);
      for (long j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] || !src_.active(j)) continue;
        column(j, col_);
        const double a = row.dot(Eigen::Map<const Eigen::VectorXd>(col_.data(), m_));
        if (std::abs(a) > 1e-7) {
          const Eigen::VectorXd alpha = Binv_ * Eigen::Map<const Eigen::VectorXd>(col_.data(), m_);
          pivot(j, r, alpha, 0.0);
          break;
        }
      }
    }
  }

  double phase1_objective() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (head_[static_cast<std::size_t>(i)] >= n_) s += xB_[i];
    }
    return s;
  }

  Result result(Status st) {
    Result res;
    res.status = st;
    res.basis = head_;
    res.x_basic.assign(xB_.data(), xB_.data() + m_);
    // Multipliers for the phase-two costs.
    phase1_ = false;
    Eigen::VectorXd cB(m_);
    for (int i = 0; i < m_; ++i) cB[i] = cost(head_[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd pi = Binv_.transpose() * cB;
    res.pi.assign(pi.data(), pi.data() + m_);
    res.objective = cB.dot(xB_);
    res.iterations = iterations_;
    res.degenerate_pivots = degenerate_;
    res.reinversions = reinversions_;
    return res;
  }

  // Fresh B^{-1} before the final optimality check.
  void refresh() {
    if (since_reinvert_ > 0) reinvert();
  }

  double b_scale() const { return std::max(1.0, b_.cwiseAbs().maxCoeff()); }

 private:
  double cost(long j) const {
    if (j >= n_) return phase1_ ? -1.0 : 0.0;
    return phase1_ ? 0.0 : src_.cost(j);
  }
  bool active(long j) const {
    if (j >= n_) return phase1_;
    return src_.active(j);
  }
  // Phase one: original columns have zero cost, so d_j = -pi . a_j which is
  // recovered from the phase-two reduced costs d_j = c_j - pi . a_j.
  double pi_dot(long j, const std::vector<double>& d) const {
    return src_.cost(j) - d[static_cast<std::size_t>(j)];
  }
  void column(long j, std::vector<double>& out) const {
    if (j < n_) {
      src_.column(j, out);
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    const auto i = static_cast<std::size_t>(j - n_);
    out[i] = art_sign_[static_cast<Eigen::Index>(i)];
  }
  void set_head(const std::vector<long>& head) {
    for (long j : head_) is_basic_[static_cast<std::size_t>(j)] = 0;
    head_ = head;
    for (long j : head_) is_basic_[static_cast<std::size_t>(j)] = 1;
  }
  void pivot(long q, int r, const Eigen::VectorXd& alpha, double theta) {
    xB_ -= theta * alpha;
    xB_[r] = theta;
    for (int i = 0; i < m_; ++i) {
      if (xB_[i] < 0.0) xB_[i] = 0.0;
    }
    // Eta update as one rank-one correction (column-major friendly).
    const Eigen::RowVectorXd pr = Binv_.row(r) / alpha[r];
    Binv_.noalias() -= alpha * pr;
    Binv_.row(r) = pr;
    is_basic_[static_cast<std::size_t>(head_[static_cast<std::size_t>(r)])] = 0;
    head_[static_cast<std::size_t>(r)] = q;
    is_basic_[static_cast<std::size_t>(q)] = 1;
    ++iterations_;
    ++since_reinvert_;
  }
  void reinvert() {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) {
      column(head_[static_cast<std::size_t>(i)], col_);
      B.col(i) = Eigen::Map<const Eigen::VectorXd>(col_.data(), m_);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const double rc = lu.rcond();
    if (!(rc > 1e-15)) {
      std::ostringstream os;
      os << "simplex basis is numerically singular (rcond " << rc << ", m " << m_ << ", iteration " << iterations_
         << ")";
      throw NumericalFailure(os.str());
    }
    Binv_ = lu.inverse();
    xB_ = Binv_ * b_;
    since_reinvert_ = 0;
    ++reinversions_;
  }

  const ColumnSource& src_;
  int m_;
  long n_;
  Options opts_;
  Eigen::VectorXd b_;
  Eigen::VectorXd art_sign_;
  std::vector<char> is_basic_;
  std::vector<long> head_;
  Eigen::MatrixXd Binv_;
  Eigen::VectorXd xB_;
  Eigen::VectorXd pi_;
  std::vector<double> col_;
  double cmax_ = 0.0;
  bool phase1_ = false;
  long reinvert_every_ = 64;
  long since_reinvert_ = 0;
  long iterations_ = 0;
  long degenerate_ = 0;
  long reinversions_ = 0;
};

}  // namespace

Result solve(const ColumnSource& src, std::span<const double> b, const Options& opts,
             const std::optional<std::vector<long>>& warm_basis) {
  if (static_cast<int>(b.size()) != src.rows()) throw DomainError("lp::solve: rhs size does not match rows");
  Engine eng(src, b, opts);
  const bool warm = warm_basis && eng.try_warm(*warm_basis);
  if (!warm) {
    eng.cold_start();
    const Status s1 = eng.run_phase(true);
    if (s1 == Status::IterationLimit) return eng.result(s1);
    if (eng.phase1_objective() > 1e-8 * eng.b_scale()) return eng.result(Status::Infeasible);
    eng.drive_out_artificials();
  }
  Status s2 = eng.run_phase(false);
  if (s2 == Status::Optimal) {
    eng.refresh();
    s2 = eng.run_phase(false);
  }
  return eng.result(s2);
}

namespace {

// Largest t keeping v + t dv >= 0 (infinity when dv >= 0).
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, const std::vector<char>& on) {
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (on[static_cast<std::size_t>(j)] && dv[j] < 0.0) t = std::min(t, -v[j] / dv[j]);
  }
  return t;
}

}  // namespace

Result solve_interior(const ColumnSource& src, std::span<const double> b, const InteriorOptions& opts) {
  const int m = src.rows();
  const long N = src.cols();
  if (static_cast<int>(b.size()) != m) throw DomainError("lp::solve_interior: rhs size does not match rows");
  std::vector<char> on(static_cast<std::size_t>(N));
  long n_on = 0;
  Eigen::VectorXd c(N);  // minimisation costs: -cost
  for (long j = 0; j < N; ++j) {
    on[static_cast<std::size_t>(j)] = src.active(j) ? 1 : 0;
    n_on += on[static_cast<std::size_t>(j)];
    c[j] = on[static_cast<std::size_t>(j)] ? -src.cost(j) : 0.0;
  }
  if (n_on == 0) throw DomainError("lp::solve_interior: no active columns");
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), m);
  std::vector<double> gram;

  auto A_times = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(m);
    src.multiply(std::span<const double>(v.data(), static_cast<std::size_t>(N)),
                 std::span<double>(out.data(), static_cast<std::size_t>(m)));
    return out;
  };
  auto At_times = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd out(N);
    src.transpose_multiply(std::span<const double>(y.data(), static_cast<std::size_t>(m)),
                           std::span<double>(out.data(), static_cast<std::size_t>(N)));
    return out;
  };
  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factor = [&](const Eigen::VectorXd& w) {
    src.weighted_gram(std::span<const double>(w.data(), static_cast<std::size_t>(N)), gram);
    Eigen::Map<Eigen::MatrixXd> G(gram.data(), m, m);
    llt.compute(G);
    if (llt.info() == Eigen::Success) return;
    double reg = 1e-16 * std::max(1e-300, G.diagonal().maxCoeff());
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd H = G;
      H.diagonal().array() += reg;
      llt.compute(H);
      if (llt.info() == Eigen::Success) return;
      reg *= 100.0;
    }
    throw NumericalFailure("interior point: normal matrix is not positive definite");
  };
  auto mask = [&](Eigen::VectorXd& v) {
    for (long j = 0; j < N; ++j) {
      if (!on[static_cast<std::size_t>(j)]) v[j] = 0.0;
    }
  };

  // Mehrotra's starting point.
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(N);
  for (long j = 0; j < N; ++j) ones[j] = on[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
  factor(ones);
  Eigen::VectorXd y = llt.solve(A_times(c));
  Eigen::VectorXd z = At_times(llt.solve(bv));
  Eigen::VectorXd s = c - At_times(y);
  mask(s);
  double zmin = 0.0, smin = 0.0;
  for (long j = 0; j < N; ++j) {
    if (!on[static_cast<std::size_t>(j)]) continue;
    zmin = std::min(zmin, z[j]);
    smin = std::min(smin, s[j]);
  }
  const double dz0 = std::max(-1.5 * zmin, 0.0), ds0 = std::max(-1.5 * smin, 0.0);
  for (long j = 0; j < N; ++j) {
    if (!on[static_cast<std::size_t>(j)]) continue;
    z[j] += dz0;
    s[j] += ds0;
  }
  {
    const double zs = z.dot(s);
    const double dz1 = 0.5 * zs / std::max(1e-300, s.sum()), ds1 = 0.5 * zs / std::max(1e-300, z.sum());
    for (long j = 0; j < N; ++j) {
      if (!on[static_cast<std::size_t>(j)]) {
        z[j] = 0.0;
        s[j] = 1.0;
        continue;
      }
      z[j] = std::max(z[j] + dz1, 1e-12);
      s[j] = std::max(s[j] + ds1, 1e-12);
    }
  }

  Result res;
  res.status = Status::IterationLimit;
  const double bnorm = 1.0 + bv.lpNorm<Eigen::Infinity>();
  const double cnorm = 1.0 + c.lpNorm<Eigen::Infinity>();
  const auto n_d = static_cast<double>(n_on);
  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;
  Eigen::VectorXd best_z = z, best_y = y;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd rp = bv - A_times(z);
    Eigen::VectorXd rd = c - At_times(y) - s;
    mask(rd);
    const double pobj = c.dot(z), dobj = bv.dot(y);
    const double mu = z.dot(s) / n_d;
    res.iterations = it;
    // The gap is measured against the objective itself (small optimal
    // values are the normal case for minimax errors).
    const double gap_scale = std::max({std::abs(pobj), std::abs(dobj), 1e-10 * cnorm});
    const double merit = std::max({rp.lpNorm<Eigen::Infinity>() / bnorm, rd.lpNorm<Eigen::Infinity>() / cnorm,
                                   std::abs(pobj - dobj) / gap_scale});
    if (merit < best_merit) {
      stall = 0;
      best_merit = merit;
      best_z = z;
      best_y = y;
    } else {
      ++stall;
    }
    if (merit <= opts.tol) break;
    // Near the end the normal equations are too ill-conditioned to make
    // further progress; keep the best iterate.
    if (best_merit <= opts.accept_tol && (stall >= 4 || merit > 1e3 * best_merit)) break;
    Eigen::VectorXd D(N);
    for (long j = 0; j < N; ++j) D[j] = on[static_cast<std::size_t>(j)] ? z[j] / s[j] : 0.0;
    factor(D);
    // Conjugate gradients on A D A^T with the Cholesky factor as
    // preconditioner; late iterations need it once the factor is perturbed.
    auto normal_solve = [&](const Eigen::VectorXd& r0) {
      Eigen::VectorXd x = llt.solve(r0);
      const double target = 1e-14 * std::max(1e-300, r0.lpNorm<Eigen::Infinity>());
      auto apply = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd w = At_times(v);
        for (long j = 0; j < N; ++j) w[j] = on[static_cast<std::size_t>(j)] ? D[j] * w[j] : 0.0;
        return A_times(w);
      };
      Eigen::VectorXd r = r0 - apply(x);
      if (r.lpNorm<Eigen::Infinity>() <= target) return x;
      Eigen::VectorXd zr = llt.solve(r);
      Eigen::VectorXd p = zr;
      double rz = r.dot(zr);
      for (int k = 0; k < 50 && rz > 0.0; ++k) {
        const Eigen::VectorXd q = apply(p);
        const double pq = p.dot(q);
        if (!(pq > 0.0)) break;
        const double alpha = rz / pq;
        x += alpha * p;
        r -= alpha * q;
        if (r.lpNorm<Eigen::Infinity>() <= target) break;
        zr = llt.solve(r);
        const double rz_new = r.dot(zr);
        p = zr + (rz_new / rz) * p;
        rz = rz_new;
      }
      return x;
    };
    // Solve for a complementarity target rc (S dz + Z ds = rc).
    auto direction = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dz, Eigen::VectorXd& dy, Eigen::VectorXd& ds) {
      Eigen::VectorXd t(N);
      for (long j = 0; j < N; ++j) t[j] = on[static_cast<std::size_t>(j)] ? D[j] * rd[j] - rc[j] / s[j] : 0.0;
      dy = normal_solve(rp + A_times(t));
      ds = rd - At_times(dy);
      mask(ds);
      dz.resize(N);
      for (long j = 0; j < N; ++j) dz[j] = on[static_cast<std::size_t>(j)] ? rc[j] / s[j] - D[j] * ds[j] : 0.0;
      // Refine A dz = rp; shifting dy by e and dz by D A^T e leaves the
      // dual and complementarity equations intact.
      double last = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 10; ++k) {
        const Eigen::VectorXd r = rp - A_times(dz);
        const double rn = r.lpNorm<Eigen::Infinity>();
        if (rn >= 0.5 * last || rn <= 1e-15 * bnorm) break;
        last = rn;
        const Eigen::VectorXd e = llt.solve(r);
        Eigen::VectorXd ate = At_times(e);
        mask(ate);
        dy += e;
        ds -= ate;
        dz += (D.array() * ate.array()).matrix();
      }
    };
    Eigen::VectorXd rc = -(z.array() * s.array()).matrix();
    mask(rc);
    Eigen::VectorXd dz, dy, ds;
    direction(rc, dz, dy, ds);
    const double ap = std::min(1.0, max_step(z, dz, on)), ad = std::min(1.0, max_step(s, ds, on));
    const double mu_aff = (z + ap * dz).dot(s + ad * ds) / n_d;
    const double sigma = std::pow(std::max(0.0, mu_aff) / std::max(mu, 1e-300), 3.0);
    for (long j = 0; j < N; ++j) {
      if (on[static_cast<std::size_t>(j)]) rc[j] += -dz[j] * ds[j] + sigma * mu;
    }
    direction(rc, dz, dy, ds);
    const double tp = std::min(1.0, opts.step * max_step(z, dz, on));
    const double td = std::min(1.0, opts.step * max_step(s, ds, on));
    if (tp < 1e-12 && td < 1e-12) break;
    z += tp * dz;
    y += td * dy;
    s += td * ds;
  }
  if (best_merit <= opts.accept_tol) res.status = Status::Optimal;
  res.x.assign(best_z.data(), best_z.data() + N);
  res.pi.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) res.pi[static_cast<std::size_t>(i)] = -best_y[i];
  res.objective = -c.dot(best_z);
  return res;
}

InequalityResult solve_lp(std::span<const double> c, int m, std::span<const double> a_rowmajor,
                          std::span<const double> b, const Options& opts) {
  const auto nv = static_cast<int>(c.size());
  if (m < 0 || a_rowmajor.size() != static_cast<std::size_t>(m) * c.size() ||
      b.size() != static_cast<std::size_t>(m)) {
    throw DomainError("solve_lp: dimension mismatch");
  }
  if (nv == 0) throw DomainError("solve_lp: no variables");
  // Dual: maximize -b^T y  s.t.  A^T y = -c,  y >= 0.  Column k is row k of A.
  std::vector<double> cols(a_rowmajor.begin(), a_rowmajor.end());
  std::vector<double> cost(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) cost[static_cast<std::size_t>(k)] = -b[static_cast<std::size_t>(k)];
  DenseColumns src(nv, m, std::move(cols), std::move(cost));
  std::vector<double> rhs(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) rhs[i] = -c[i];
  const Result r = solve(src, rhs, opts);
  if (r.status == Status::Infeasible) throw NumericalFailure("solve_lp: primal unbounded (dual infeasible)");
  if (r.status == Status::Unbounded) throw NumericalFailure("solve_lp: primal infeasible (dual unbounded)");
  if (r.status != Status::Optimal) throw NumericalFailure("solve_lp: iteration limit reached");
  InequalityResult out;
  out.x.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out.x[i] = -r.pi[i];
  out.objective = r.objective;
  out.iterations = r.iterations;
  return out;
}

}  // namespace trigshape::lp
