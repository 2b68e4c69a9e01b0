#include "lom/minima.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace lom {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

void check_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error(fmt::format("s = {} outside (0, 1)", s));
}

// Optimisation variables: (log l_1..n, t_1..n).
FNCoords to_coords(const Vec& x) {
  const auto n = static_cast<std::size_t>(x.size() / 2);
  FNCoords c;
  c.lengths.resize(n);
  c.twists.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    c.lengths[k] = std::exp(x[static_cast<Eigen::Index>(k)]);
    c.twists[k] = x[static_cast<Eigen::Index>(n + k)];
  }
  return c;
}

Vec to_vars(const FNCoords& c) {
  const std::size_t n = c.size();
  Vec x(static_cast<Eigen::Index>(2 * n));
  for (std::size_t k = 0; k < n; ++k) {
    x[static_cast<Eigen::Index>(k)] = std::log(c.lengths[k]);
    x[static_cast<Eigen::Index>(n + k)] = c.twists[k];
  }
  return x;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class Objective {
 public:
  Objective(const MinimaProblem& p, double s, const MinimizerOptions& o) : p_(p), s_(s), o_(o) {}

  bool in_box(const Vec& x) const {
    const auto n = x.size() / 2;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(x[k] >= std::log(o_.min_length) && x[k] <= std::log(o_.max_length))) return false;
      if (!(std::fabs(x[n + k]) <= o_.max_twist)) return false;
    }
    return true;
  }

  double value(const Vec& x) const { return eval_Fs(p_, s_, to_coords(x)); }

  // Gradient in (l, t) and its pullback to (log l, t).
  Vec gradient(const Vec& x, std::vector<double>* raw = nullptr) const {
    const FNCoords c = to_coords(x);
    std::vector<double> g = grad_Fs(p_, s_, c);
    Vec out(x.size());
    const auto n = x.size() / 2;
    for (Eigen::Index k = 0; k < n; ++k) {
      out[k] = g[static_cast<std::size_t>(k)] * c.lengths[static_cast<std::size_t>(k)];
      out[n + k] = g[static_cast<std::size_t>(n + k)];
    }
    if (raw) *raw = std::move(g);
    return out;
  }

  Mat hessian(const Vec& x) const {
    const auto m = x.size();
    Mat h(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double step = 1e-5 * std::max(1.0, std::fabs(x[k]));
      Vec up = x, down = x;
      up[k] += step;
      down[k] -= step;
      h.col(k) = (gradient(up) - gradient(down)) / (2 * step);
    }
    return 0.5 * (h + h.transpose());
  }

 private:
  const MinimaProblem& p_;
  double s_;
  const MinimizerOptions& o_;
};

// Newton direction, shifted to positive definite when needed.
Vec newton_direction(const Mat& h, const Vec& g) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const Vec& lam = eig.eigenvalues();
  const double top = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double floor = 1e-10 * top;
  Vec shifted = lam;
  if (lam.minCoeff() <= floor) shifted.array() += floor - lam.minCoeff() + 1e-6 * top;
  const Mat& v = eig.eigenvectors();
  return -(v * ((v.transpose() * g).array() / shifted.array()).matrix());
}

// Newton step measured in (l, t) rather than (log l, t).
double step_in_lt(const Vec& x, const Vec& p) {
  const auto n = x.size() / 2;
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double dl = std::exp(x[k]) * std::expm1(p[k]);
    s += dl * dl + p[n + k] * p[n + k];
  }
  return std::sqrt(s);
}

}  // namespace

MinimaProblem::MinimaProblem(const SurfaceModel& s, WeightedMulticurve mu_, WeightedMulticurve nu_, bool fills)
    : surface(&s), mu(std::move(mu_)), nu(std::move(nu_)), fill_asserted(fills) {
  validate();
}

void MinimaProblem::validate() const {
  if (!surface) throw std::invalid_argument("problem has no surface");
  mu.validate(*surface);
  nu.validate(*surface);
  for (const auto& [curve, w] : mu.weights) {
    if (surface->pants_index(curve) < 0) {
      throw std::invalid_argument("mu must be supported on pants curves; '" + curve + "' is not one");
    }
  }
}

double eval_Fs(const MinimaProblem& p, double s, const FNCoords& c) {
  check_s(s);
  double lmu = 0.0, lnu = 0.0;
  for (const auto& [curve, a] : p.mu.weights) lmu += a * p.surface->length(curve, c);
  for (const auto& [curve, b] : p.nu.weights) lnu += b * p.surface->length(curve, c);
  return (1.0 - s) * lmu + s * lnu;
}

std::vector<double> grad_Fs(const MinimaProblem& p, double s, const FNCoords& c) {
  check_s(s);
  std::vector<double> g(2 * c.size(), 0.0);
  for (const auto& [curve, a] : p.mu.weights) {
    g[static_cast<std::size_t>(p.surface->pants_index(curve))] += (1.0 - s) * a;
  }
  for (const auto& [curve, b] : p.nu.weights) {
    const std::vector<double> gl = p.surface->length_gradient(curve, c);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += s * b * gl[k];
  }
  return g;
}

Residuals criticality_residuals(const MinimaProblem& p, const FNCoords& c) {
  const std::size_t n = c.size();
  std::vector<double> dnu(2 * n, 0.0);
  for (const auto& [curve, b] : p.nu.weights) {
    const std::vector<double> gl = p.surface->length_gradient(curve, c);
    for (std::size_t k = 0; k < dnu.size(); ++k) dnu[k] += b * gl[k];
  }
  std::vector<std::pair<std::size_t, double>> support;
  for (const auto& [curve, a] : p.mu.weights) {
    support.emplace_back(static_cast<std::size_t>(p.surface->pants_index(curve)), a);
  }
  std::sort(support.begin(), support.end());
  Residuals r;
  for (const auto& [i, a] : support) r.eq1.push_back(dnu[n + i]);
  for (std::size_t u = 0; u < support.size(); ++u) {
    for (std::size_t v = u + 1; v < support.size(); ++v) {
      const auto [i, ai] = support[u];
      const auto [j, aj] = support[v];
      r.eq2.push_back(dnu[i] / ai - dnu[j] / aj);
    }
  }
  return r;
}

MinimumPoint minimize_Fs(const MinimaProblem& p, double s, const FNCoords& init, const MinimizerOptions& options) {
  check_s(s);
  init.validate();
  if (init.size() != p.surface->pants_curves.size()) {
    throw std::invalid_argument("initial coordinates do not match the surface");
  }
  const Objective f(p, s, options);
  Vec x = to_vars(init);

  MinimumPoint out;
  out.s = s;
  auto finish = [&](const Vec& at) {
    out.coords = to_coords(at);
    out.value = eval_Fs(p, s, out.coords);
    out.grad_norm = norm(grad_Fs(p, s, out.coords));
    const Residuals r = criticality_residuals(p, out.coords);
    out.eq1_residuals = r.eq1;
    out.eq2_residuals = r.eq2;
    return out;
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    const double fx = f.value(x);
    std::vector<double> raw;
    const Vec g = f.gradient(x, &raw);
    const double gn = norm(raw);
    Vec dir = newton_direction(f.hessian(x), g);

    if (gn < options.tolerance * std::max(1.0, std::fabs(fx))) {
      if (step_in_lt(x, dir) >= 0.5) {
        // Small gradient but a long Newton step: follow the ray and see
        // whether F keeps decreasing all the way out of the box.
        double prev = fx;
        bool monotone = true;
        Vec probe = x;
        for (int k = 0; k < 80; ++k) {
          probe = x + std::ldexp(1.0, k) * dir;
          if (!f.in_box(probe)) break;
          const double fp = f.value(probe);
          if (fp > prev + 1e-14 * std::fabs(prev)) {
            monotone = false;
            break;
          }
          prev = fp;
        }
        if (monotone) {
          out.diverged = true;
          out.note = "F non-increasing along a ray leaving the coordinate box";
          return finish(probe);
        }
      }
      // Polish: full Newton steps while they keep shrinking the gradient.
      double best = gn;
      for (int k = 0; k < options.polish_steps; ++k) {
        const Vec trial = x + dir;
        if (!f.in_box(trial)) break;
        std::vector<double> graw;
        const Vec gt = f.gradient(trial, &graw);
        const double gtn = norm(graw);
        if (!(gtn < best)) break;
        x = trial;
        best = gtn;
        dir = newton_direction(f.hessian(x), gt);
      }
      out.converged = true;
      return finish(x);
    }

    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      dir = -g;
      slope = -g.squaredNorm();
    }
    const double cap = dir.cwiseAbs().maxCoeff();
    if (cap > 2.0) {
      dir *= 2.0 / cap;
      slope *= 2.0 / cap;
    }

    double alpha = 1.0;
    bool accepted = false;
    Vec next;
    if (-slope < 1e-13 * std::max(1.0, std::fabs(fx))) {
      // The predicted decrease is below the round-off of F, so Armijo cannot
      // tell steps apart; take the longest step that shrinks the gradient.
      for (; alpha > 1e-6 && !accepted; alpha *= 0.5) {
        next = x + alpha * dir;
        std::vector<double> graw;
        if (!f.in_box(next)) continue;
        f.gradient(next, &graw);
        accepted = norm(graw) < gn;
      }
      if (!accepted) {
        out.note = "line search stalled";
        return finish(x);
      }
      x = next;
      continue;
    }
    while (alpha > 1e-12) {
      next = x + alpha * dir;
      if (f.in_box(next) && f.value(next) <= fx + options.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      if (!f.in_box(next) && alpha == 1.0 && f.value(next) < fx) {
        out.diverged = true;
        out.note = "iterate left the coordinate box";
        return finish(next);
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Round-off floor: accept the full step if it still improves the gradient.
      next = x + dir;
      std::vector<double> graw;
      if (f.in_box(next)) f.gradient(next, &graw);
      if (graw.empty() || !(norm(graw) < gn)) {
        out.note = "line search stalled";
        return finish(x);
      }
    }
    x = next;
  }
  out.iterations = options.max_iterations;
  out.note = "iteration cap reached";
  return finish(x);
}

std::vector<double> geometric_grid(double start, double stop, int per_decade) {
  if (!(start > 0.0 && start < 1.0) || !(stop > 0.0 && stop < 1.0)) {
    throw std::invalid_argument("grid endpoints must lie in (0, 1)");
  }
  if (per_decade < 1) throw std::invalid_argument("points per decade must be >= 1");
  if (stop > start) throw std::invalid_argument("grid must decrease: s-stop > s-start");
  const double decades = std::log10(start / stop);
  const auto count = static_cast<int>(std::floor(decades * per_decade + 1e-9));
  const double top = std::log10(start);
  std::vector<double> grid;
  for (int k = 0; k <= count; ++k) grid.push_back(std::pow(10.0, top - static_cast<double>(k) / per_decade));
  grid.front() = start;
  return grid;
}

Trajectory trace_line(const MinimaProblem& p, const std::vector<double>& s_grid, const FNCoords& init,
                      const MinimizerOptions& options) {
  if (s_grid.empty()) throw std::invalid_argument("empty s grid");
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    check_s(s_grid[k]);
    if (k > 0 && !(s_grid[k] < s_grid[k - 1])) throw std::invalid_argument("s grid must be strictly decreasing");
  }
  Trajectory traj;
  traj.problem = p;
  traj.grid = s_grid;
  FNCoords start = init;
  for (double s : s_grid) {
    MinimumPoint pt = minimize_Fs(p, s, start, options);
    if (pt.diverged) {
      traj.partial = true;
      traj.divergence = pt;
      break;
    }
    if (!pt.converged) traj.partial = true;
    start = pt.coords;
    traj.points.push_back(std::move(pt));
  }
  return traj;
}

FNCoords default_start(const SurfaceModel& surface) {
  const std::size_t n = surface.pants_curves.size();
  return FNCoords(std::vector<double>(n, 1.0), std::vector<double>(n, 0.0));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace lom
