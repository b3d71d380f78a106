#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trigshape/construction.hpp"
#include "trigshape/errors.hpp"
#include "trigshape/minimax.hpp"
#include "trigshape/partition.hpp"
#include "trigshape/sequence.hpp"
#include "trigshape/smoothness.hpp"
#include "trigshape/test_functions.hpp"
#include "trigshape/verify.hpp"
#include "trigshape/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trigshape;

namespace {

enum Exit { kOk = 0, kUsage = 1, kComputation = 2, kFails = 3 };

// Malformed configuration, reported with exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Keys of `file` replace those of `cfg`; unknown keys are rejected.
void apply_config(json& cfg, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json file;
  try {
    in >> file;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!file.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [k, v] : file.items()) {
    if (!cfg.contains(k)) throw UsageError("unknown config key '" + k + "'");
    cfg[k] = v;
  }
}

template <class T>
T field(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json metadata(const std::string& command, const json& cfg) {
  return {{"command", command}, {"version", kVersion}, {"config", cfg}};
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

// Numbers or multiples of pi: "0.1", "pi", "pi/8", "3pi/4".
double parse_angle(const std::string& text) {
  const auto p = text.find("pi");
  try {
    if (p == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const double coef = p == 0 ? 1.0 : std::stod(text.substr(0, p));
    double den = 1.0;
    const std::string rest = text.substr(p + 2);
    if (!rest.empty()) {
      if (rest[0] != '/') throw std::invalid_argument(text);
      den = std::stod(rest.substr(1));
    }
    return coef * kPi / den;
  } catch (const std::exception&) {
    throw UsageError("cannot read angle '" + text + "'");
  }
}

EpsSequence eps_from(const json& e) {
  if (e.is_string()) return EpsSequence::preset(e.get<std::string>());
  if (e.is_array()) return EpsSequence::inline_list(e.get<std::vector<double>>());
  throw UsageError("eps must be a preset name or a list of numbers");
}

// ---- commands ------------------------------------------------------------

int cmd_pi(const json& cfg, const fs::path& out) {
  const int s = field<int>(cfg, "s");
  if (s < 1) throw UsageError("s must be positive");
  const verify::CheckResult r = verify::run_check("eq_2_1", json{{"s", s}}, verify::default_calibration());
  json doc = metadata("pi", cfg);
  doc["result"] = r;
  std::cout << "s = " << s << "\n"
            << std::setprecision(17) << "||Pi||      = " << r.details["norm"].get<double>() << "  (exact "
            << r.details["norm_exact"].get<double>() << ")\n"
            << "min_I0 |Pi| = " << r.details["min_I0"].get<double>() << "  (exact "
            << r.details["min_I0_exact"].get<double>() << ")\n"
            << "closed form max error = " << r.details["closed_form_max_error"].get<double>() << "\n"
            << "verdict: " << verify::to_string(r.verdict) << "\n";
  if (!out.empty()) write_json(out / "pi.json", doc);
  return r.verdict == verify::Verdict::Holds ? kOk : kFails;
}

int cmd_construct(const json& cfg, const fs::path& out) {
  const int s = field<int>(cfg, "s");
  const int n = field<int>(cfg, "n");
  double b = field<double>(cfg, "b");
  if (b <= 0.0) {
    if (cfg.at("eps").is_null()) throw UsageError("give b or eps");
    b = b_of(eps_from(cfg.at("eps")), n);
  }
  const TruncationParams p = TruncationParams::from_n(s, n, b);
  const CounterexampleFunction cf = build_f(p, make_equidistant(s));
  double residual = 0.0;
  for (const MjSolution& m : cf.mj_table()) residual = std::max(residual, m.residual);
  int type2 = 0;
  for (const IntervalClass& c : cf.classes()) type2 += c.kind == IntervalKind::TypeII ? 1 : 0;
  const json summary = {{"s", s},
                        {"n", n},
                        {"b", b},
                        {"nu", p.nu},
                        {"intervals", cf.classes().size()},
                        {"type_II", type2},
                        {"max_mj_residual", residual},
                        {"period_residual", cf.period_residual()},
                        {"t_degree", cf.t().degree()}};
  std::cout << summary.dump(2) << "\n";
  if (!out.empty()) {
    json doc = metadata("construct", cfg);
    doc["summary"] = summary;
    doc["function"] = cf;
    write_json(out / "counterexample.json", doc);
  }
  return kOk;
}

int cmd_omega(const json& cfg, const fs::path& out) {
  const FunctionRef f = parse_function_ref(field<std::string>(cfg, "f"));
  const int k = field<int>(cfg, "k");
  const auto ts = field<std::vector<std::string>>(cfg, "t");
  if (ts.empty()) throw UsageError("t list is empty");
  std::ostringstream csv;
  csv << "t,k,omega_lower,omega_upper,gap\n" << std::setprecision(17);
  for (const std::string& text : ts) {
    const double t = parse_angle(text);
    const ModulusResult m = modulus(f.f, k, t);
    csv << t << "," << k << "," << m.lower << "," << m.upper << "," << m.gap << "\n";
  }
  std::cout << csv.str();
  if (!out.empty()) {
    write_file(out / "omega.csv", csv.str());
    write_json(out / "omega.meta.json", metadata("omega", cfg));
  }
  return kOk;
}

ConstraintSpec spec_from(const std::string& name, int s, double eps) {
  if (name == "none") return ConstraintSpec::none();
  if (s < 1) throw UsageError("constrained problems need s >= 1");
  if (name == "comonotone") return ConstraintSpec::comonotone(make_equidistant(s));
  if (name == "relaxed") return ConstraintSpec::measure_relaxed(make_equidistant(s), eps);
  throw UsageError("spec must be none, comonotone or relaxed");
}

int cmd_approx(const json& cfg, const fs::path& out) {
  MinimaxProblem prob;
  prob.f = parse_function_ref(field<std::string>(cfg, "f")).f;
  prob.degree = field<int>(cfg, "n");
  prob.spec = spec_from(field<std::string>(cfg, "spec"), field<int>(cfg, "s"), field<double>(cfg, "eps"));
  prob.options.refinements = field<int>(cfg, "refinements");
  const MinimaxSolution sol = solve(prob);
  json result = sol;
  result.erase("basis");
  result.erase("sign_duals");
  std::cout << std::setprecision(10) << "delta_grid " << sol.delta_grid << "\ndelta_certified " << sol.delta_certified
            << "\nviolation " << sol.violation << "\nstatus " << to_string(sol.status) << "\n";
  if (!out.empty()) {
    json doc = metadata("approx", cfg);
    doc["solution"] = result;
    write_json(out / "approx.json", doc);
  }
  return kOk;
}

int cmd_verify(const json& cfg, const fs::path& out) {
  const verify::Calibration cal = cfg.at("calibration").get<std::string>().empty()
                                      ? verify::default_calibration()
                                      : verify::load_calibration(cfg.at("calibration").get<std::string>());
  std::vector<verify::CheckResult> results;
  json resolved = cfg;
  const std::string single = field<std::string>(cfg, "check");
  if (!single.empty()) {
    if (!verify::is_check(single)) throw UsageError("unknown check id '" + single + "'");
    results.push_back(verify::run_check(single, cfg.at("params"), cal));
  } else {
    const verify::MatrixConfig m = verify::matrix_from_json(cfg.at("matrix"));
    resolved["matrix"] = m;
    results = verify::run_matrix(m, cal);
  }
  const verify::Tally t = verify::tally(results);
  const std::string md = verify::ledger_markdown(results);
  std::cout << md;
  if (!out.empty()) {
    write_json(out / "ledger.json", verify::ledger_json(results));
    write_file(out / "ledger.md", md);
    json run = metadata("verify", resolved);
    run["calibration"] = cal;
    run["tally"] = {{"Holds", t.holds},
                    {"Vacuous", t.vacuous},
                    {"Fails", t.fails},
                    {"ReportOnly", t.report_only},
                    {"Skipped", t.skipped}};
    run["timestamp"] = timestamp();
    write_json(out / "run.json", run);
  }
  const std::string fit = field<std::string>(cfg, "fit_calibration");
  if (!fit.empty()) write_json(fit, json(verify::fit_calibration(results)));
  return t.fails > 0 ? kFails : kOk;
}

int cmd_ratio(const json& cfg, const fs::path& out) {
  const int s = field<int>(cfg, "s");
  const int k = field<int>(cfg, "k");
  const auto n_list = field<std::vector<int>>(cfg, "n_list");
  if (n_list.empty()) throw UsageError("n list is empty");
  for (int n : n_list) {
    if (n < 1) throw UsageError("n list entries must be positive");
  }
  const std::string spec = field<std::string>(cfg, "spec");
  const std::string fref = field<std::string>(cfg, "f");
  const EpsSequence eps = eps_from(cfg.at("eps"));
  const PointSet y = make_equidistant(s);
  std::function<PeriodicFunction(int)> family;
  if (fref.empty()) {
    // f_{n, b_n} with b_n from the eps sequence.
    family = [&](int n) {
      return build_f(TruncationParams::from_n(s, n, b_of(eps, n)), y).as_function();
    };
  } else {
    const PeriodicFunction f = parse_function_ref(fref).f;
    family = [f](int) { return f; };
  }
  auto spec_for = [&](int n) { return spec_from(spec, s, eps(static_cast<double>(n))); };
  const std::vector<RatioRow> rows = ratio_table(family, k, n_list, spec_for);
  const std::string csv = ratio_table_csv(rows);
  std::cout << csv;
  if (!out.empty()) {
    write_file(out / "ratio.csv", csv);
    write_json(out / "ratio.meta.json", metadata("ratio", cfg));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape-preserving trigonometric approximation: counterexample construction and checks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  app.add_option("--config", config_path, "JSON file whose keys override the command options");
  app.add_option("--out", out_dir, "Output directory (nothing is written when empty)");

  int s = 2, n = 100, k = 4, refinements = 0;
  double b = 0.0, eps_value = 0.0;
  std::string eps_name, fref, spec = "none", check, params = "{}", matrix_path, calibration, fit_path;
  std::vector<std::string> ts;
  std::vector<int> n_list;

  auto* pi = app.add_subcommand("pi", "Pi(x, Y*) norms against their closed forms");
  pi->add_option("--s", s, "Half the number of points")->capture_default_str();

  auto* construct = app.add_subcommand("construct", "Build f_{n,b} on Y*_s");
  construct->add_option("--s", s)->capture_default_str();
  construct->add_option("--n", n)->capture_default_str();
  construct->add_option("--b", b, "Truncation parameter in (0, 1/2)");
  construct->add_option("--eps", eps_name, "Take b = b_n from this eps preset");

  auto* omega = app.add_subcommand("omega", "Modulus of smoothness table");
  omega->add_option("--f", fref, "Function reference (cos:<k>, fnb:<s>,<n>,<b>, spline:<s>, ...)");
  omega->add_option("--k", k)->capture_default_str();
  omega->add_option("--t", ts, "Steps, e.g. pi/8 0.1")->delimiter(',');

  auto* approx = app.add_subcommand("approx", "Best uniform approximation");
  approx->add_option("--f", fref);
  approx->add_option("--n", n)->capture_default_str();
  approx->add_option("--spec", spec, "none | comonotone | relaxed")->capture_default_str();
  approx->add_option("--s", s)->capture_default_str();
  approx->add_option("--eps", eps_value, "Measure budget of the relaxed problem");
  approx->add_option("--refinements", refinements)->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Run checks and write the ledger");
  ver->add_option("--check", check, "Run a single check");
  ver->add_option("--params", params, "JSON parameters of the single check")->capture_default_str();
  ver->add_option("--matrix", matrix_path, "JSON matrix config (default matrix when absent)");
  ver->add_option("--calibration", calibration, "Calibrated constants (JSON)");
  ver->add_option("--fit-calibration", fit_path, "Write constants fitted from this run to a JSON file");

  auto* ratio = app.add_subcommand("ratio", "E / omega_k ratio table");
  ratio->add_option("--s", s)->capture_default_str();
  ratio->add_option("--k", k)->capture_default_str();
  ratio->add_option("--n-list", n_list)->delimiter(',');
  ratio->add_option("--eps", eps_name, "eps preset")->capture_default_str();
  ratio->add_option("--spec", spec)->capture_default_str();
  ratio->add_option("--f", fref, "Fixed function instead of f_{n,b_n}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const fs::path out = out_dir;
  try {
    json cfg;
    std::function<int(const json&, const fs::path&)> run;
    if (pi->parsed()) {
      cfg = {{"s", s}};
      run = cmd_pi;
    } else if (construct->parsed()) {
      cfg = {{"s", s}, {"n", n}, {"b", b}, {"eps", eps_name.empty() ? json(nullptr) : json(eps_name)}};
      run = cmd_construct;
    } else if (omega->parsed()) {
      cfg = {{"f", fref}, {"k", k}, {"t", ts}};
      run = cmd_omega;
    } else if (approx->parsed()) {
      cfg = {{"f", fref}, {"n", n}, {"spec", spec}, {"s", s}, {"eps", eps_value}, {"refinements", refinements}};
      run = cmd_approx;
    } else if (ver->parsed()) {
      json p;
      try {
        p = json::parse(params);
      } catch (const json::exception& e) {
        throw UsageError(std::string("--params: ") + e.what());
      }
      json m = verify::MatrixConfig{};
      if (!matrix_path.empty()) {
        std::ifstream in(matrix_path);
        if (!in) throw UsageError("cannot open matrix file '" + matrix_path + "'");
        m = json::parse(in);
      }
      cfg = {{"check", check}, {"params", p}, {"matrix", m}, {"calibration", calibration}, {"fit_calibration", fit_path}};
      run = cmd_verify;
    } else {
      if (n_list.empty()) n_list = {100, 200, 400};
      cfg = {{"s", s}, {"k", k}, {"n_list", n_list}, {"eps", eps_name.empty() ? "zero" : eps_name},
             {"spec", spec}, {"f", fref}};
      run = cmd_ratio;
    }
    apply_config(cfg, config_path);
    return run(cfg, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConstructionInfeasible& e) {
    json failing = e.failing_intervals();
    std::cerr << "construction infeasible: " << e.what() << "\nfailing j: " << failing.dump() << "\n";
    return kComputation;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return kComputation;
  }
}
