#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lom/minima.hpp"

namespace lom {

/// 2 * sum_j i(a_j, gamma) * log(1 / l_{a_j}).
double collar_length_estimate(const SurfaceModel& surface, const CurveId& gamma, const FNCoords& c);

/// Estimate of the length of the dual of a pants curve alpha:
///   one adjacent pants:  2 i(alpha, delta) log(1/l_alpha) + l_omega / 2
///   two adjacent pants:  2 i(alpha, delta) log(1/l_alpha) + l_|omega| + l_|omega'|
/// where l_|omega| is the longest other boundary of a pants (cusps count 0).
double dual_length_estimate(const SurfaceModel& surface, const CurveId& pants_curve, const FNCoords& c);

struct LimitReport {
  double s = 0.0;
  std::vector<CurveId> probes;
  std::vector<double> probe_lengths;
  std::vector<std::vector<double>> length_ratios;  // [i][j] = l_i / l_j
  std::vector<CurveId> pants_curves;
  std::vector<double> inferred_weights;            // max = 1
  double residual = 0.0;                            // ||M w - L|| / ||L||
  bool barycentre = false;
  std::string verdict;
};

class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nonnegative least squares, min ||A x - b|| with x >= 0 (Lawson-Hanson).
std::vector<double> nnls(const std::vector<std::vector<double>>& a, const std::vector<double>& b);

/// Fits l_gamma ~ c * sum_i a'_i i(alpha_i, gamma) over the probes.
/// Weights within [1 - band, 1 + band] of each other count as the barycentre.
LimitReport infer_limit(const SurfaceModel& surface, const std::vector<CurveId>& probes,
                        const std::vector<double>& lengths, double band = 0.1);

/// infer_limit at the smallest s of the trajectory.
LimitReport projective_limit(const Trajectory& traj, const std::vector<CurveId>& probes, double band = 0.1);

struct OrderFit {
  std::string quantity;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t samples = 0;
};

using Extractor = std::function<double(const MinimumPoint&)>;

/// "s", "l_<curve>" or "l_<curve>/l_<curve>".
Extractor quantity_extractor(const SurfaceModel& surface, const std::string& name);

/// Least-squares fit of log(quantity) against log(s). Window defaults to the
/// smallest two decades present; at least five samples are required.
OrderFit growth_order_fit(const Trajectory& traj, const std::string& quantity, double window_lo = 0.0,
                          double window_hi = 0.0);
OrderFit growth_order_fit(const Trajectory& traj, const std::string& name, const Extractor& quantity,
                          double window_lo = 0.0, double window_hi = 0.0);

struct ResidualSeries {
  CurveId curve;
  std::vector<double> s;
  std::vector<double> residual;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double sup_abs = 0.0;    // over the window
  double variation = 0.0;  // max - min over the window
  double trend = 0.0;      // |residual| / log(1/s) at the smallest s
};

/// residual(s) = l_gamma(m_s) - collar_length_estimate. Window defaults to
/// the whole trajectory.
ResidualSeries residual_analysis(const Trajectory& traj, const CurveId& gamma, double window_lo = 0.0,
                                 double window_hi = 0.0);

}  // namespace lom
