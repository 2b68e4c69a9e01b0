#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lom/asymptotics.hpp"

namespace lom {

inline constexpr int kSchemaVersion = 1;

/// Bad user input; the CLI maps it to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string surface = "s12";
  std::string mu = "a1=1,a2=1";
  std::string nu = "beta=1";
  double s_start = 0.1;
  double s_stop = 1e-5;
  int per_decade = 5;
  std::uint64_t seed = 42;
  std::string out;
  double tol_scale = 1.0;
  int samples = 1000;
};

/// Applies a flat key = value file (TOML subset: comments, quoted strings,
/// numbers) on top of `base`. Unknown keys are usage errors.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

MinimaProblem problem_from_config(const RunConfig& cfg);
std::vector<double> grid_from_config(const RunConfig& cfg);

/// Columns: s, l_<pants>..., t_<pants>..., F_s, grad_norm, l_<other curves>...,
/// eq1_max, eq2_max. Numbers use 17 significant digits.
std::vector<std::string> csv_columns(const SurfaceModel& surface);
std::string trajectory_csv(const Trajectory& traj);
/// Rebuilds s and coordinates from a trajectory CSV (other columns ignored).
Trajectory read_trajectory_csv(const std::string& text, const MinimaProblem& problem);

nlohmann::json to_json(const LimitReport& r);
nlohmann::json to_json(const OrderFit& f);
nlohmann::json to_json(const ResidualSeries& r);
nlohmann::json to_json(const MinimumPoint& p);

/// Non-pants registry curves: beta, d1, d2 on s12; b on s11.
std::vector<CurveId> default_probes(const SurfaceModel& surface);

/// Limit report, order fits and residual series for a trajectory. Analysis
/// errors are recorded as strings, not thrown.
nlohmann::json analyse_trajectory(const Trajectory& traj);
nlohmann::json trace_summary(const RunConfig& cfg, const Trajectory& traj);

/// Perpendicular table for cmd pants; cusp entries are marked.
std::string pants_table(double l1, double l2, double l3);

struct OracleCheck {
  int samples = 0;
  std::vector<CurveId> curves;
  std::vector<double> max_rel_error;
  double worst = 0.0;
};

/// Closed forms against matrix traces on seeded s12 samples
/// (lengths in [0.1, 3], twists in [-2, 2]).
OracleCheck oracle_check(int n, std::uint64_t seed);

/// Traces mu = a1 + eps a2 against beta for eps in {1, 0.1, 0.01, 0} in parallel.
nlohmann::json simplex_demo(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Acceptance suite.

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<", ">", "in", "true"
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  nlohmann::json detail;
  bool pass() const;
  std::string line() const;
};

/// Runs criteria 1-10. tol_scale multiplies every tolerance (0 makes the
/// numeric checks fail, as a negative control).
std::vector<CriterionResult> run_acceptance(double tol_scale = 1.0, std::uint64_t seed = 42);
nlohmann::json verify_json(const std::vector<CriterionResult>& results, double tol_scale, std::uint64_t seed);

}  // namespace lom
