#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace trigshape::verify {

/// Absolute slack allowed on a margin before a bound counts as failed.
inline constexpr double kAssertTol = 1e-9;

/// Skipped: the parameters fall outside the construction preconditions
/// (nu <= 10 s), so there is nothing to check.
enum class Verdict { Holds, Vacuous, Fails, ReportOnly, Skipped };

std::string to_string(Verdict v);

struct CheckResult {
  std::string check_id;
  nlohmann::json params;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Signed slack, positive when the inequality holds (rhs - lhs for upper
  /// bounds, lhs - rhs for lower bounds, minus the error for identities).
  /// For calibration checks: the fitted constant.
  double margin = 0.0;
  Verdict verdict = Verdict::ReportOnly;
  std::string notes;
  /// Per-check diagnostics (failing intervals, fitted constants, ...).
  nlohmann::json details = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const CheckResult& r);

/// Constants the estimates leave unspecified, fitted on the default matrix.
struct Calibration {
  double c3 = 0.0;
  double c6 = 0.0;
  double c7 = 0.0;
  double c8 = 0.0;
  /// C_4 = max{C_6, 1/C_7, C_1} per s (C_1 = 80 pi (4 s + 2)).
  std::map<int, double> c4;
  std::string source = "built-in";

  double c4_for(int s) const;
  /// C_9 = 3 C_4 + 8 pi.
  double c9_for(int s) const;
};

Calibration default_calibration();
Calibration load_calibration(const std::string& path);
void to_json(nlohmann::json& j, const Calibration& c);
Calibration calibration_from_json(const nlohmann::json& j);

/// Constants fitted from eq_2_14 (C3, largest), eq_2_18 (C7, smallest) and
/// lemma_2_2 (C8, largest) results; C6 = 6 pi and C4 per s seen.
Calibration fit_calibration(const std::vector<CheckResult>& results);

/// Every check id, in catalog order.
const std::vector<std::string>& catalog();
bool is_check(const std::string& id);

/// Runs one check. Parameters by check:
///   eq_2_1                       s
///   eq_2_2 .. eq_2_13, eq_2_18   s, b and n or nu
///   eq_2_14                      s, b, n
///   lemma_2_1                    s, b, n; method "comonotone" | "relaxed";
///                                eps (relaxed budget, default b^{5/4});
///                                e_measure (synthetic |E|, skips the solve)
///   eq_2_24, lemma_2_2, lemma_2_3  s, eps (preset id or list), sigma
///   theorem_1                    s, eps, n_list, k
/// Throws DomainError for unknown ids or malformed parameters.
CheckResult run_check(const std::string& id, const nlohmann::json& params, const Calibration& cal);

/// Parameter matrix for a ledger run.
struct MatrixConfig {
  std::vector<int> s{2, 4};
  std::vector<double> b{0.05, 0.1, 0.2};
  std::vector<int> n{100, 200, 400};
  std::vector<std::string> eps{"zero", "inv_log", "inv_quarter_power"};
  /// Restrict to these ids (empty: the whole catalog).
  std::vector<std::string> checks;
  /// Sequence steps examined by eq_2_24, lemma_2_2 and lemma_2_3.
  std::vector<int> sigma{1};
  /// Degrees of the theorem_1 ratio table.
  std::vector<int> ratio_n{100, 200, 400};
};

void to_json(nlohmann::json& j, const MatrixConfig& m);
MatrixConfig matrix_from_json(const nlohmann::json& j);

/// (check id, params) jobs of a matrix in a fixed order.
std::vector<std::pair<std::string, nlohmann::json>> expand(const MatrixConfig& m);

/// Runs every job, in parallel when OpenMP threads are available. The
/// output order is the job order, independent of scheduling.
std::vector<CheckResult> run_matrix(const MatrixConfig& m, const Calibration& cal);

struct Tally {
  int holds = 0;
  int vacuous = 0;
  int fails = 0;
  int report_only = 0;
  int skipped = 0;
};

Tally tally(const std::vector<CheckResult>& results);

nlohmann::json ledger_json(const std::vector<CheckResult>& results);
std::string ledger_markdown(const std::vector<CheckResult>& results);

}  // namespace trigshape::verify
