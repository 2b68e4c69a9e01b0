#include "lom/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace lom {

namespace {

double boundary_length(const SurfaceModel& surface, const CurveId& c, const FNCoords& x) {
  return c == kCusp ? 0.0 : surface.length(c, x);
}

bool in_window(double s, double lo, double hi) {
  const double slack = 1e-9;
  return s >= lo * (1 - slack) && s <= hi * (1 + slack);
}

std::string weight_text(double w) { return fmt::format("{:.3g}", w); }

}  // namespace

double collar_length_estimate(const SurfaceModel& surface, const CurveId& gamma, const FNCoords& c) {
  surface.index_of(gamma);
  double total = 0.0;
  for (std::size_t j = 0; j < surface.pants_curves.size(); ++j) {
    const int i = surface.intersection_of(surface.pants_curves[j], gamma);
    if (i != 0) total += 2.0 * i * std::log(1.0 / c.lengths[j]);
  }
  return total;
}

double dual_length_estimate(const SurfaceModel& surface, const CurveId& pants_curve, const FNCoords& c) {
  const int p = surface.pants_index(pants_curve);
  if (p < 0) throw UnknownCurveError("'" + pants_curve + "' is not a pants curve of " + surface.name);
  const auto idx = static_cast<std::size_t>(p);
  const double base = 2.0 * surface.dual_of[idx].count * std::log(1.0 / c.lengths[idx]);
  const auto& adjacent = surface.pants_adjacency[idx];
  auto longest = [&](const std::vector<CurveId>& others) {
    double m = 0.0;
    for (const CurveId& o : others) m = std::max(m, boundary_length(surface, o, c));
    return m;
  };
  if (adjacent.size() == 1) return base + 0.5 * longest(adjacent[0]);
  double extra = 0.0;
  for (const auto& others : adjacent) extra += longest(others);
  return base + extra;
}

// ---------------------------------------------------------------------------

std::vector<double> nnls(const std::vector<std::vector<double>>& a_rows, const std::vector<double>& b_vec) {
  const auto m = static_cast<Eigen::Index>(a_rows.size());
  if (m == 0 || static_cast<Eigen::Index>(b_vec.size()) != m) throw std::invalid_argument("nnls: size mismatch");
  const auto n = static_cast<Eigen::Index>(a_rows[0].size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(a_rows[static_cast<std::size_t>(i)].size()) != n) {
      throw std::invalid_argument("nnls: ragged matrix");
    }
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = a_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    b[i] = b_vec[static_cast<std::size_t>(i)];
  }
  const double tol = 1e-12 * std::max(1.0, a.norm()) * std::max(1.0, b.norm());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j) if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    Eigen::MatrixXd ap(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < cols.size(); ++k) z[cols[k]] = zp[static_cast<Eigen::Index>(k)];
    return z;
  };

  for (int outer = 0; outer < 3 * n + 3; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > tol && (best < 0 || w[j] > w[best])) best = j;
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * n + 3; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return {x.data(), x.data() + n};
}

LimitReport infer_limit(const SurfaceModel& surface, const std::vector<CurveId>& probes,
                        const std::vector<double>& lengths, double band) {
  if (probes.empty() || probes.size() != lengths.size()) {
    throw std::invalid_argument("infer_limit: one length per probe required");
  }
  const std::size_t n = surface.pants_curves.size();
  std::vector<std::vector<double>> m(probes.size(), std::vector<double>(n));
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < probes.size(); ++g) {
    for (std::size_t i = 0; i < n; ++i) {
      m[g][i] = surface.intersection_of(surface.pants_curves[i], probes[g]);
      dense(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(i)) = m[g][i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dense.col(static_cast<Eigen::Index>(i)).isZero()) {
      throw IllConditionedError("probe set misses pants curve " + surface.pants_curves[i]);
    }
  }
  if (dense.colPivHouseholderQr().rank() < static_cast<Eigen::Index>(n)) {
    throw IllConditionedError("probe intersection matrix is rank deficient");
  }
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("infer_limit: lengths must be finite and > 0");
  }

  LimitReport r;
  r.probes = probes;
  r.probe_lengths = lengths;
  r.pants_curves = surface.pants_curves;
  r.length_ratios.assign(probes.size(), std::vector<double>(probes.size()));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = 0; j < probes.size(); ++j) r.length_ratios[i][j] = lengths[i] / lengths[j];
  }

  const std::vector<double> w = nnls(m, lengths);
  double fit = 0.0, total = 0.0;
  for (std::size_t g = 0; g < probes.size(); ++g) {
    double pred = 0.0;
    for (std::size_t i = 0; i < n; ++i) pred += m[g][i] * w[i];
    fit += (pred - lengths[g]) * (pred - lengths[g]);
    total += lengths[g] * lengths[g];
  }
  r.residual = std::sqrt(fit / total);
  const double top = *std::max_element(w.begin(), w.end());
  if (!(top > 0.0)) throw IllConditionedError("all inferred weights vanish");
  for (double x : w) r.inferred_weights.push_back(x / top);

  r.barycentre = std::all_of(r.inferred_weights.begin(), r.inferred_weights.end(),
                             [&](double x) { return x >= 1.0 - band && x <= 1.0 + band; });
  std::string terms;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = r.inferred_weights[i];
    if (x <= 0.0) continue;
    if (!terms.empty()) terms += " + ";
    terms += (std::fabs(x - 1.0) < 5e-4 ? "" : weight_text(x) + "*") + surface.pants_curves[i];
  }
  std::string bary;
  for (const auto& c : surface.pants_curves) bary += (bary.empty() ? "" : " + ") + c;
  r.verdict = r.barycentre ? "barycentre [" + bary + "]" : "[" + terms + "], not the barycentre [" + bary + "]";
  return r;
}

LimitReport projective_limit(const Trajectory& traj, const std::vector<CurveId>& probes, double band) {
  if (traj.points.empty() || traj.problem.surface == nullptr) throw std::invalid_argument("projective_limit: empty trajectory");
  const MinimumPoint& last = traj.points.back();
  std::vector<double> lengths;
  for (const auto& c : probes) lengths.push_back(traj.problem.surface->length(c, last.coords));
  LimitReport r = infer_limit(*traj.problem.surface, probes, lengths, band);
  r.s = last.s;
  return r;
}

// ---------------------------------------------------------------------------

Extractor quantity_extractor(const SurfaceModel& surface, const std::string& name) {
  if (name == "s") return [](const MinimumPoint& p) { return p.s; };
  auto curve_of = [&](const std::string& token) {
    if (token.rfind("l_", 0) != 0) throw std::invalid_argument("unknown quantity '" + name + "'");
    const CurveId c = token.substr(2);
    surface.index_of(c);
    return c;
  };
  const SurfaceModel* sp = &surface;
  const auto slash = name.find('/');
  if (slash == std::string::npos) {
    const CurveId c = curve_of(name);
    return [sp, c](const MinimumPoint& p) { return sp->length(c, p.coords); };
  }
  const CurveId num = curve_of(name.substr(0, slash)), den = curve_of(name.substr(slash + 1));
  return [sp, num, den](const MinimumPoint& p) { return sp->length(num, p.coords) / sp->length(den, p.coords); };
}

OrderFit growth_order_fit(const Trajectory& traj, const std::string& quantity, double window_lo, double window_hi) {
  if (traj.points.empty() || traj.problem.surface == nullptr) {
    throw std::invalid_argument("growth_order_fit: empty trajectory");
  }
  return growth_order_fit(traj, quantity, quantity_extractor(*traj.problem.surface, quantity), window_lo, window_hi);
}

OrderFit growth_order_fit(const Trajectory& traj, const std::string& name, const Extractor& quantity,
                          double window_lo, double window_hi) {
  if (traj.points.empty()) throw std::invalid_argument("growth_order_fit: empty trajectory");
  double smin = traj.points.front().s, smax = smin;
  for (const auto& p : traj.points) {
    smin = std::min(smin, p.s);
    smax = std::max(smax, p.s);
  }
  if (window_lo <= 0.0) window_lo = smin;
  if (window_hi <= 0.0) window_hi = std::min(smax, 100.0 * smin);
  if (window_lo > window_hi) throw std::invalid_argument("growth_order_fit: empty window");

  std::vector<double> xs, ys;
  for (const auto& p : traj.points) {
    if (!in_window(p.s, window_lo, window_hi)) continue;
    const double q = quantity(p);
    if (!(q > 0.0) || !std::isfinite(q)) throw std::domain_error("growth_order_fit: quantity must be positive");
    xs.push_back(std::log(p.s));
    ys.push_back(std::log(q));
  }
  if (xs.size() < 5) throw std::invalid_argument("growth_order_fit: fewer than 5 samples in the window");

  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("growth_order_fit: degenerate window");
  OrderFit f;
  f.quantity = name;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // A constant quantity is fitted exactly by slope 0.
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.window_lo = window_lo;
  f.window_hi = window_hi;
  f.samples = xs.size();
  return f;
}

ResidualSeries residual_analysis(const Trajectory& traj, const CurveId& gamma, double window_lo, double window_hi) {
  if (traj.problem.surface == nullptr) throw std::invalid_argument("residual_analysis: trajectory has no surface");
  const SurfaceModel& surface = *traj.problem.surface;
  surface.index_of(gamma);
  ResidualSeries r;
  r.curve = gamma;
  if (traj.points.empty()) return r;
  double smin = traj.points.front().s, smax = smin;
  for (const auto& p : traj.points) {
    smin = std::min(smin, p.s);
    smax = std::max(smax, p.s);
    r.s.push_back(p.s);
    r.residual.push_back(surface.length(gamma, p.coords) - collar_length_estimate(surface, gamma, p.coords));
  }
  r.window_lo = window_lo > 0.0 ? window_lo : smin;
  r.window_hi = window_hi > 0.0 ? window_hi : smax;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  std::size_t at_min = 0;
  double s_at_min = 2.0;
  for (std::size_t k = 0; k < r.s.size(); ++k) {
    if (!in_window(r.s[k], r.window_lo, r.window_hi)) continue;
    const double v = r.residual[k];
    lo = any ? std::min(lo, v) : v;
    hi = any ? std::max(hi, v) : v;
    any = true;
    r.sup_abs = std::max(r.sup_abs, std::fabs(v));
    if (r.s[k] < s_at_min) {
      s_at_min = r.s[k];
      at_min = k;
    }
  }
  r.variation = any ? hi - lo : 0.0;
  if (any) r.trend = std::fabs(r.residual[at_min]) / std::log(1.0 / r.s[at_min]);
  return r;
}

}  // namespace lom
