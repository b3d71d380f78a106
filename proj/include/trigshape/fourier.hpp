#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trigshape/trig_poly.hpp"

namespace trigshape::fourier {

// Values of p at x0 + 2*pi*k/n, k = 0..n-1.
//
// evaluate_grid picks the FFT path whenever n > 2 deg p and falls back to
// the parallel direct sum otherwise. The serial variant is the reference
// implementation the others are tested against.
std::vector<double> evaluate_grid(const TrigPoly& p, std::size_t n, double x0 = 0.0);
std::vector<double> evaluate_grid_fft(const TrigPoly& p, std::size_t n, double x0 = 0.0);
std::vector<double> evaluate_grid_parallel(const TrigPoly& p, std::size_t n, double x0 = 0.0);
std::vector<double> evaluate_grid_serial(const TrigPoly& p, std::size_t n, double x0 = 0.0);

/// Degree-`degree` trigonometric interpolant of samples taken at
/// x0 + 2*pi*k/N. Requires N >= 2 degree + 1.
TrigPoly interpolate(std::span<const double> samples, int degree, double x0 = 0.0);

}  // namespace trigshape::fourier
