#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "trigshape/trig_poly.hpp"

namespace trigshape {

/// A 2 pi-periodic callable together with what is known about its kinks.
struct PeriodicFunction {
  std::function<double(double)> eval;
  /// Sorted points of [-pi, pi] where the function or a low derivative is
  /// not smooth. Used to augment sampling grids.
  std::vector<double> breakpoints;
  std::optional<int> smoothness_hint;
  /// Highest local frequency, if known (e.g. the degree for a polynomial).
  /// Sets the x-resolution of grid scans.
  double frequency_hint = 0.0;

  double operator()(double x) const { return eval(x); }
};

PeriodicFunction from_trig_poly(TrigPoly p);

/// sum_{i=0..k} (-1)^{k-i} C(k,i) f(x - k h / 2 + i h).
double sym_diff(const PeriodicFunction& f, int k, double h, double x);

struct ModulusOptions {
  /// Points per axis of the (h, x) scan. The x-axis is widened to
  /// 16 * frequency_hint when that is larger.
  int res = 512;
  /// Grid maxima refined by local zooming.
  int candidates = 8;
  int zoom_rounds = 10;
  bool augment_breakpoints = true;
};

struct ModulusResult {
  /// Largest |sym_diff| actually attained: a certified lower bound.
  double lower = 0.0;
  /// Refinement-convergence estimate of the distance to the true supremum.
  double gap = 0.0;
  double upper = 0.0;
  double h = 0.0;
  double x = 0.0;
};

/// omega_k(f, t) = sup_{0 < h <= t} sup_x |sym_diff(f, k, h, x)|.
ModulusResult modulus(const PeriodicFunction& f, int k, double t, const ModulusOptions& opts = {});
/// Same algorithm without OpenMP; reference for tests and benchmarks.
ModulusResult modulus_serial(const PeriodicFunction& f, int k, double t,
                             const ModulusOptions& opts = {});

}  // namespace trigshape
