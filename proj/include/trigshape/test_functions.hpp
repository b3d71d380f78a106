#pragma once

#include <memory>
#include <optional>
#include <string>

#include "trigshape/construction.hpp"
#include "trigshape/smoothness.hpp"

namespace trigshape {

/// Comonotone C^1 test function for the equidistant points Y*_s:
///   f'(x) = Pi(x, Y*) (1 + c (cos 2sx)_+),   f(0) = 0.
/// f'' jumps where cos 2sx changes sign, so omega_2(f, t) and omega_4(f, t)
/// both decay like t^2. Represented exactly as a piecewise trigonometric
/// antiderivative.
PiecewiseTrig spline_derivative(int s, double c = 2.0);
PeriodicFunction spline_test_function(int s, double c = 2.0);

/// A function named on the command line or in a config file:
///   cos:<k>            cos kx
///   const:<c>          the constant c
///   trigpoly:<file>    TrigPoly JSON
///   fnb:<s>,<n>,<b>    f_{n,b} on Y*_s
///   spline:<s>         spline_test_function(s)
///   counterexample:<file>  CounterexampleFunction JSON
struct FunctionRef {
  std::string text;
  PeriodicFunction f;
  std::optional<TrigPoly> poly;
  std::shared_ptr<const CounterexampleFunction> counterexample;
};

FunctionRef parse_function_ref(const std::string& text);

}  // namespace trigshape
