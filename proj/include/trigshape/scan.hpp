#pragma once

// Grid-scan-and-polish maximisation used by the sup norms, the certified
// approximation errors and the descent-set computations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace trigshape::scan {

struct Peak {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum of `f` on [a, b].
template <class F>
Peak golden_max(F&& f, double a, double b, double tol = 1e-14, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  Peak best = fc >= fd ? Peak{c, fc} : Peak{d, fd};
  return best;
}

/// Maximum of `f` over [lo, hi] from `values` sampled at the `n` equispaced
/// points lo + i (hi - lo) / (n - 1). Every grid local maximum within
/// `keep_fraction` of the grid maximum (in absolute terms, `slack`) is
/// polished by golden section on its two neighbouring cells.
template <class F>
Peak polish_grid_max(F&& f, double lo, double hi, const std::vector<double>& values,
                     double slack) {
  const std::size_t n = values.size();
  if (n == 0) return {lo, f(lo)};
  if (n == 1) return {lo, values[0]};
  const double step = (hi - lo) / static_cast<double>(n - 1);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] > values[arg]) arg = i;
  }
  Peak best{lo + step * static_cast<double>(arg), values[arg]};
  const double threshold = values[arg] - slack;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] < threshold) continue;
    const bool left_ok = i == 0 || values[i] >= values[i - 1];
    const bool right_ok = i + 1 == n || values[i] >= values[i + 1];
    if (!left_ok || !right_ok) continue;
    const double a = i == 0 ? lo : lo + step * static_cast<double>(i - 1);
    const double b = i + 1 == n ? hi : lo + step * static_cast<double>(i + 1);
    Peak p = golden_max(f, a, b);
    if (p.value > best.value) best = p;
  }
  return best;
}

/// Samples `f` at n equispaced points (endpoints included) and polishes.
template <class F>
Peak scan_max(F&& f, double lo, double hi, std::size_t n, double rel_slack = 0.2) {
  if (n < 2) n = 2;
  std::vector<double> values(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) values[i] = f(lo + step * static_cast<double>(i));
  const double vmax = *std::max_element(values.begin(), values.end());
  const double vmin = *std::min_element(values.begin(), values.end());
  const double slack = rel_slack * std::max(std::abs(vmax), vmax - vmin) + 1e-300;
  return polish_grid_max(f, lo, hi, values, slack);
}

}  // namespace trigshape::scan
