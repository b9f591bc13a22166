#ifndef SINGINT_STUDY_HPP
#define SINGINT_STUDY_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "singint/problems.hpp"
#include "singint/solver.hpp"
#include "singint/tableau.hpp"

namespace singint {

struct StudyConfig {
  std::string problem = "sinh";
  double sigma = 0.8;
  double a = 1.0;
  std::vector<std::string> methods;
  std::vector<nlohmann::json> custom_tableaus;  // referenced by name
  std::uint64_t master_seed = 1;
  int n_paths = 2000;
  int finest_level = 9;
  std::vector<int> levels;         // coarse levels for the mean-square study
  std::vector<double> weak_steps;  // step sizes for the weak study
  int weak_order = 2;
  // functional g for the weak study: component index, or -1 for g == 1
  int weak_functional = 0;
  // reference E g(X(T)); NaN means "compute by quadrature from the exact map"
  double weak_reference = std::numeric_limits<double>::quiet_NaN();
  double error_floor = 1e-14;
  int workers = 1;  // 0 = hardware concurrency
  StageSolveConfig solve;
};

void to_json(nlohmann::json& j, const StudyConfig& cfg);
void from_json(const nlohmann::json& j, StudyConfig& cfg);

struct ReportRow {
  std::string method;
  int stages = 0;
  double h = 0.0;
  int level = -1;
  double rms = 0.0;     // root-mean-square error
  double mae = 0.0;     // mean absolute error
  double stderr_v = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct MethodFit {
  std::string method;
  int p_d = 0;          // deterministic order from the tree checker
  int p_sde = 0;        // floor(p_d/2)
  double p_num = 0.0;   // fitted slope
  bool enough_data = false;
};

struct ConvergenceReport {
  std::string kind;  // "mean_square" or "weak"
  StudyConfig config;
  std::vector<ReportRow> rows;
  std::vector<MethodFit> fits;
  double weak_reference = std::numeric_limits<double>::quiet_NaN();
};

/// Least-squares slope of log(error) vs log(h) over rows with error above
/// the floor; nullopt when fewer than two rows remain.
std::optional<double> fit_order(
    const std::vector<std::pair<double, double>>& h_and_error,
    double error_floor);

/// Pathwise-coupled mean-square error study: one Brownian path per index
/// (derived from the master seed) underlies every method and level; the
/// reference is the exact solution at (T, W(T)), or the same method at the
/// finest level when no exact solution exists.
ConvergenceReport mean_square_study(const StudyConfig& cfg);

/// Weak error study with moment-matched increments. When the problem has an
/// exact map, each sample is coupled with the exact flow of its discrete
/// driving path and the coupling's discrete mean is computed exactly, so the
/// estimator variance follows the coupling rather than Var g(X(T)).
ConvergenceReport weak_study(const StudyConfig& cfg);

std::string report_csv(const ConvergenceReport& report);
nlohmann::ordered_json report_json(const ConvergenceReport& report);

struct DriftSeries {
  std::string method;
  std::vector<std::string> invariant_names;
  std::vector<double> times;
  // drifts[i][k] = invariant_i(Y at times[k]) - invariant_i(x0)
  std::vector<std::vector<double>> drifts;
  std::vector<double> max_abs_drift;  // over every step, per invariant
  bool truncated = false;
  std::string failure_reason;
  std::size_t steps_completed = 0;
};

/// One trajectory per method on a shared Gaussian increment sequence;
/// records invariant drift every `record_stride` steps.
std::vector<DriftSeries> invariant_drift_study(
    const SdeProblem& problem, const std::vector<ButcherTableau>& methods,
    double h, double horizon, std::uint64_t seed, const StageSolveConfig& cfg,
    int record_stride = 1);

std::string drift_csv(const std::vector<DriftSeries>& series);

/// Resolves a method name against builtins and the study's custom tableaus.
ButcherTableau resolve_method(const StudyConfig& cfg, const std::string& name);

}  // namespace singint

#endif
