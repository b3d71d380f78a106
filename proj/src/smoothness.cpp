#include "trigshape/smoothness.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "trigshape/errors.hpp"

namespace trigshape {

PeriodicFunction from_trig_poly(TrigPoly p) {
  PeriodicFunction f;
  f.frequency_hint = p.degree();
  f.eval = [p = std::move(p)](double x) { return p(x); };
  return f;
}

namespace {

std::vector<double> binomial_weights(int k) {
  std::vector<double> w(static_cast<std::size_t>(k) + 1);
  double c = 1.0;
  for (int i = 0; i <= k; ++i) {
    w[static_cast<std::size_t>(i)] = ((k - i) % 2 == 0 ? 1.0 : -1.0) * c;
    c = c * (k - i) / (i + 1);
  }
  return w;
}

double diff_with(const PeriodicFunction& f, const std::vector<double>& w, double h, double x) {
  const int k = static_cast<int>(w.size()) - 1;
  const double start = x - 0.5 * k * h;
  double sum = 0.0;
  for (int i = 0; i <= k; ++i) sum += w[static_cast<std::size_t>(i)] * f.eval(start + i * h);
  return sum;
}

double wrap(double x) {
  x = std::fmod(x + kPi, kTwoPi);
  if (x < 0) x += kTwoPi;
  return x - kPi;
}

struct Candidate {
  double value;
  int row;
  double h;
  double x;
};

constexpr int kPerRow = 3;

template <bool Parallel>
ModulusResult modulus_impl(const PeriodicFunction& f, int k, double t, const ModulusOptions& opts) {
  if (k < 1) throw DomainError("modulus: k must be >= 1");
  if (!(t > 0.0 && t <= kPi * (1.0 + 1e-15))) throw DomainError("modulus: t must lie in (0, pi]");
  t = std::min(t, kPi);
  const auto w = binomial_weights(k);
  const int res_h = std::max(opts.res, 2);
  const int res_x = std::max(res_h, static_cast<int>(std::ceil(16.0 * f.frequency_hint)));
  const double dx = kTwoPi / res_x;
  const bool augment = opts.augment_breakpoints && !f.breakpoints.empty();

  std::vector<std::array<Candidate, kPerRow>> rows(static_cast<std::size_t>(res_h));
#pragma omp parallel for schedule(dynamic, 4) if (Parallel)
  for (int i = 1; i <= res_h; ++i) {
    const double h = i == res_h ? t : t * i / res_h;
    std::array<Candidate, kPerRow> top;
    top.fill(Candidate{-1.0, i, h, 0.0});
    auto offer = [&](double x, double v) {
      if (v <= top[kPerRow - 1].value) return;
      // Keep distinct locations: replace a near-duplicate if better.
      for (auto& c : top) {
        if (c.value >= 0.0 && std::abs(c.x - x) < 2.0 * dx) {
          if (v > c.value) {
            c.value = v;
            c.x = x;
            std::sort(top.begin(), top.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
          }
          return;
        }
      }
      top[kPerRow - 1] = Candidate{v, i, h, x};
      std::sort(top.begin(), top.end(), [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    };
    for (int m = 0; m < res_x; ++m) {
      const double x = -kPi + dx * m;
      offer(x, std::abs(diff_with(f, w, h, x)));
    }
    if (augment) {
      // Every x placing one of the k+1 stencil nodes exactly on a breakpoint.
      for (double beta : f.breakpoints) {
        for (int m = 0; m <= k; ++m) {
          const double x = wrap(beta + 0.5 * k * h - m * h);
          offer(x, std::abs(diff_with(f, w, h, x)));
        }
      }
    }
    rows[static_cast<std::size_t>(i - 1)] = top;
  }

  std::vector<Candidate> all;
  for (const auto& r : rows) {
    for (const auto& c : r) {
      if (c.value >= 0.0) all.push_back(c);
    }
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.row != b.row) return a.row < b.row;
    return a.x < b.x;
  });
  if (all.size() > static_cast<std::size_t>(opts.candidates)) all.resize(static_cast<std::size_t>(opts.candidates));

  ModulusResult best;
  best.lower = all.empty() ? 0.0 : all.front().value;
  if (!all.empty()) {
    best.h = all.front().h;
    best.x = all.front().x;
  }
  double gap = 0.0;
  std::vector<ModulusResult> refined(all.size());
#pragma omp parallel for schedule(dynamic, 1) if (Parallel)
  for (std::size_t ci = 0; ci < all.size(); ++ci) {
    double h0 = all[ci].h;
    double x0 = all[ci].x;
    double v0 = all[ci].value;
    double rh = t / res_h;
    double rx = dx;
    double last_gain = 0.0;
    for (int round = 0; round < opts.zoom_rounds; ++round) {
      double bh = h0, bx = x0, bv = v0;
      for (int a = -5; a <= 5; ++a) {
        const double h = std::clamp(h0 + rh * a / 5.0, t * 1e-12, t);
        for (int c = -5; c <= 5; ++c) {
          const double x = x0 + rx * c / 5.0;
          const double v = std::abs(diff_with(f, w, h, x));
          if (v > bv) {
            bv = v;
            bh = h;
            bx = x;
          }
        }
      }
      last_gain = bv - v0;
      h0 = bh;
      x0 = bx;
      v0 = bv;
      rh /= 5.0;
      rx /= 5.0;
    }
    refined[ci] = ModulusResult{v0, 2.0 * last_gain, v0 + 2.0 * last_gain, h0, wrap(x0)};
  }
  for (const auto& r : refined) {
    if (r.lower > best.lower) {
      best.lower = r.lower;
      best.h = r.h;
      best.x = r.x;
    }
    gap = std::max(gap, r.gap);
  }
  best.gap = gap;
  best.upper = best.lower + gap;
  return best;
}

}  // namespace

double sym_diff(const PeriodicFunction& f, int k, double h, double x) {
  if (k < 1) throw DomainError("sym_diff: k must be >= 1");
  if (h < 0.0) throw DomainError("sym_diff: h must be >= 0");
  return diff_with(f, binomial_weights(k), h, x);
}

ModulusResult modulus(const PeriodicFunction& f, int k, double t, const ModulusOptions& opts) {
  return modulus_impl<true>(f, k, t, opts);
}

ModulusResult modulus_serial(const PeriodicFunction& f, int k, double t, const ModulusOptions& opts) {
  return modulus_impl<false>(f, k, t, opts);
}

}  // namespace trigshape
