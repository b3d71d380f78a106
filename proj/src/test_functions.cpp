#include "trigshape/test_functions.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "trigshape/errors.hpp"
#include "trigshape/partition.hpp"

namespace trigshape {

PiecewiseTrig spline_derivative(int s, double c) {
  if (s < 1) throw DomainError("spline_derivative: s must be positive");
  if (!(c >= 0.0)) throw DomainError("spline_derivative: c must be nonnegative");
  const TrigPoly pi = pi_as_trigpoly(make_equidistant(s)).chopped(1e-13);
  const TrigPoly boosted = multiply(pi, TrigPoly::cosine(2 * s, c).plus_constant(1.0)).chopped(1e-13);
  // cos 2sx changes sign at (2k + 1) pi / (4s).
  std::vector<double> bp{-kPi};
  for (int k = -2 * s; k < 2 * s; ++k) {
    const double z = (2.0 * k + 1.0) * kPi / (4.0 * s);
    if (z > -kPi && z < kPi) bp.push_back(z);
  }
  bp.push_back(kPi);
  std::vector<PiecewiseTrig::Piece> pieces;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double mid = 0.5 * (bp[i] + bp[i + 1]);
    pieces.push_back({std::cos(2.0 * s * mid) > 0.0 ? 1 : 0, 1.0});
  }
  return PiecewiseTrig(std::move(bp), std::move(pieces), {pi, boosted});
}

PeriodicFunction spline_test_function(int s, double c) {
  auto g = std::make_shared<const PiecewiseTrig>(spline_derivative(s, c));
  PeriodicFunction f;
  f.eval = [g](double x) { return g->integral_from_zero(x); };
  f.breakpoints.assign(g->breakpoints().begin(), g->breakpoints().end());
  f.smoothness_hint = 1;
  f.frequency_hint = 3.0 * s;
  return f;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<double> parse_numbers(const std::string& body, std::size_t count, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("bad number '" + item + "' in function reference '" + text + "'");
    }
  }
  if (out.size() != count) throw DomainError("function reference '" + text + "' expects " + std::to_string(count) + " values");
  return out;
}

int as_int(double v, const std::string& text) {
  if (v != std::floor(v)) throw DomainError("function reference '" + text + "' expects an integer");
  return static_cast<int>(v);
}

}  // namespace

FunctionRef parse_function_ref(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("function reference '" + text + "' has no ':'");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  FunctionRef ref;
  ref.text = text;
  if (kind == "cos") {
    ref.poly = TrigPoly::cosine(as_int(parse_numbers(body, 1, text)[0], text));
  } else if (kind == "const") {
    ref.poly = TrigPoly::constant(parse_numbers(body, 1, text)[0]);
  } else if (kind == "trigpoly") {
    TrigPoly p;
    from_json(nlohmann::json::parse(read_file(body)), p);
    ref.poly = p;
  } else if (kind == "fnb" || kind == "counterexample") {
    if (kind == "fnb") {
      const auto v = parse_numbers(body, 3, text);
      const TruncationParams p = TruncationParams::from_n(as_int(v[0], text), as_int(v[1], text), v[2]);
      ref.counterexample = std::make_shared<const CounterexampleFunction>(build_f(p, make_equidistant(p.s)));
    } else {
      ref.counterexample = std::make_shared<const CounterexampleFunction>(
          counterexample_from_json(nlohmann::json::parse(read_file(body))));
    }
    ref.f = ref.counterexample->as_function();
    return ref;
  } else if (kind == "spline") {
    ref.f = spline_test_function(as_int(parse_numbers(body, 1, text)[0], text));
    return ref;
  } else {
    throw DomainError("unknown function kind '" + kind + "'");
  }
  ref.f = from_trig_poly(*ref.poly);
  return ref;
}

}  // namespace trigshape
