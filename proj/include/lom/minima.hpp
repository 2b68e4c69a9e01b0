#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lom/surfaces.hpp"

namespace lom {

struct MinimaProblem {
  const SurfaceModel* surface = nullptr;
  WeightedMulticurve mu;
  WeightedMulticurve nu;
  bool fill_asserted = false;

  MinimaProblem() = default;
  MinimaProblem(const SurfaceModel& s, WeightedMulticurve mu_, WeightedMulticurve nu_, bool fills = false);

  /// mu must live on pants curves with positive weights; nu must be a valid multicurve.
  void validate() const;
};

struct MinimizerOptions {
  double tolerance = 1e-10;  // on ||grad|| relative to max(1, F_s)
  int max_iterations = 500;
  double armijo = 1e-4;
  double min_length = 1e-12;
  double max_length = 1e3;
  double max_twist = 1e3;
  int polish_steps = 8;
};

struct MinimumPoint {
  double s = 0.0;
  FNCoords coords;
  double value = 0.0;
  double grad_norm = 0.0;
  std::vector<double> eq1_residuals;
  std::vector<double> eq2_residuals;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::string note;
};

/// Gradient over (lengths..., twists...).
double eval_Fs(const MinimaProblem& p, double s, const FNCoords& c);
std::vector<double> grad_Fs(const MinimaProblem& p, double s, const FNCoords& c);

/// Damped Newton in (log l, t) with Armijo backtracking.
MinimumPoint minimize_Fs(const MinimaProblem& p, double s, const FNCoords& init,
                         const MinimizerOptions& options = {});

struct Residuals {
  std::vector<double> eq1;  // dl_nu/dt_i for pants curves in the support of mu
  std::vector<double> eq2;  // (1/a_i) dl_nu/dl_i - (1/a_j) dl_nu/dl_j over support pairs
};

Residuals criticality_residuals(const MinimaProblem& p, const FNCoords& c);

/// s_k = start * 10^(-k / per_decade) down to stop inclusive.
std::vector<double> geometric_grid(double start, double stop, int per_decade);

struct Trajectory {
  MinimaProblem problem;
  std::vector<double> grid;
  std::vector<MinimumPoint> points;
  bool partial = false;
  std::optional<MinimumPoint> divergence;  // the failing sample, when partial
};

/// Sequential warm-started minimisation; stops at the first divergence.
Trajectory trace_line(const MinimaProblem& p, const std::vector<double>& s_grid, const FNCoords& init,
                      const MinimizerOptions& options = {});

/// Lengths 1, twists 0.
FNCoords default_start(const SurfaceModel& surface);

double max_abs(const std::vector<double>& v);

}  // namespace lom
