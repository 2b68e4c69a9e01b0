#include "doctest.h"

#include <cmath>
#include <random>

#include "lom/minima.hpp"

using namespace lom;
using doctest::Approx;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); }

MinimaProblem s12_problem(const char* mu) {
  return MinimaProblem(surface_s12(), parse_multicurve(mu), parse_multicurve("beta"), true);
}

// Symmetric slice l1 = l2 = L, t = 0: cosh(l_beta/2) = (1 + cosh^2(L/2)) / sinh^2(L/2).
double symmetric_F(double s, double L) {
  const double c = std::cosh(L / 2), sh = std::sinh(L / 2);
  return (1 - s) * 2 * L + s * 2 * std::acosh((1 + c * c) / (sh * sh));
}

double symmetric_minimum_by_bisection(double s) {
  auto slope = [s](double L) {
    const double h = 1e-7 * L;
    return (symmetric_F(s, L + h) - symmetric_F(s, L - h)) / (2 * h);
  };
  double lo = 0.01, hi = 20.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("F_s value at (2,2,0,0)") {
  const auto p = s12_problem("a1=1,a2=1");
  CHECK(eval_Fs(p, 0.5, s12_coords(2, 2, 0, 0)) == Approx(3.54387366581060945).epsilon(1e-14));
}

TEST_CASE("s outside (0,1) is rejected") {
  const auto p = s12_problem("a1=1,a2=1");
  const FNCoords c = s12_coords(1, 1, 0, 0);
  CHECK_THROWS_AS(eval_Fs(p, 0.0, c), std::domain_error);
  CHECK_THROWS_AS(eval_Fs(p, 1.0, c), std::domain_error);
  CHECK_THROWS_AS(grad_Fs(p, -0.1, c), std::domain_error);
  CHECK_THROWS_AS(minimize_Fs(p, 1.5, c), std::domain_error);
}

TEST_CASE("problem validation") {
  CHECK_THROWS(MinimaProblem(surface_s12(), parse_multicurve("beta=1"), parse_multicurve("beta=1")));
  CHECK_THROWS(MinimaProblem(surface_s12(), parse_multicurve("a1=1"), parse_multicurve("zz=1")));
  CHECK_THROWS(MinimaProblem(surface_s12(), parse_multicurve("a1=-1"), parse_multicurve("beta=1")));
}

TEST_CASE("doubling mu doubles the (1-s) part") {
  const auto p1 = s12_problem("a1=1,a2=1");
  const auto p2 = s12_problem("a1=2,a2=2");
  const FNCoords c = s12_coords(0.7, 1.3, 0.2, -0.4);
  const double s = 0.3;
  const double nu_part = s * surface_s12().length("beta", c);
  CHECK(eval_Fs(p2, s, c) - nu_part == Approx(2 * (eval_Fs(p1, s, c) - nu_part)).epsilon(1e-14));
}

TEST_CASE("gradient of F_s matches finite differences") {
  std::mt19937_64 rng(7);
  const auto p = s12_problem("a1=1,a2=2");
  for (int n = 0; n < 100; ++n) {
    const FNCoords c = s12_coords(uniform(rng, 0.1, 3), uniform(rng, 0.1, 3), uniform(rng, -2, 2), uniform(rng, -2, 2));
    const double s = uniform(rng, 0.05, 0.95);
    const auto g = grad_Fs(p, s, c);
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      FNCoords up = c, down = c;
      const double h = 1e-6;
      (k < 2 ? up.lengths[k] : up.twists[k - 2]) += h;
      (k < 2 ? down.lengths[k] : down.twists[k - 2]) -= h;
      const double fd = (eval_Fs(p, s, up) - eval_Fs(p, s, down)) / (2 * h);
      err = std::max(err, std::fabs(fd - g[k]));
      scale = std::max(scale, std::fabs(g[k]));
    }
    CHECK(err / scale < 1e-6);
  }
}

TEST_CASE("twist components vanish at zero twist") {
  const auto p = s12_problem("a1=1,a2=1");
  for (double l : {0.01, 0.5, 2.0, 7.0}) {
    const auto g = grad_Fs(p, 0.4, s12_coords(l, 1.3 * l, 0, 0));
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);
  }
}

TEST_CASE("symmetric minimum at s = 1/2") {
  const auto p = s12_problem("a1=1,a2=1");
  const MinimumPoint m = minimize_Fs(p, 0.5, s12_coords(1.0, 3.0, 0.5, -0.5));
  REQUIRE(m.converged);
  const double oracle = symmetric_minimum_by_bisection(0.5);
  CHECK(oracle == Approx(1.76274717403908605).epsilon(1e-8));
  CHECK(m.coords.lengths[0] == Approx(1.76274717403908605).epsilon(1e-10));
  CHECK(m.coords.lengths[1] == Approx(1.76274717403908605).epsilon(1e-10));
  CHECK(std::fabs(m.coords.twists[0]) < 1e-10);
  CHECK(std::fabs(m.coords.twists[1]) < 1e-10);
  CHECK(m.grad_norm < 1e-10 * std::max(1.0, m.value));
}

TEST_CASE("symmetric minimum agrees with the one-dimensional oracle for other s") {
  const auto p = s12_problem("a1=1,a2=1");
  for (double s : {0.05, 0.2, 0.8}) {
    const MinimumPoint m = minimize_Fs(p, s, s12_coords(1, 1, 0, 0));
    REQUIRE(m.converged);
    CHECK(m.coords.lengths[0] == Approx(symmetric_minimum_by_bisection(s)).epsilon(1e-7));
  }
}

TEST_CASE("weights fix the sinh ratio of the minimum") {
  const auto p = s12_problem("a1=1,a2=2");
  for (double s : {0.5, 0.1, 1e-3}) {
    const MinimumPoint m = minimize_Fs(p, s, default_start(surface_s12()));
    REQUIRE(m.converged);
    const double ratio = std::sinh(m.coords.lengths[1] / 2) / std::sinh(m.coords.lengths[0] / 2);
    CHECK(std::fabs(ratio - 0.5) < 1e-6);
    CHECK(max_abs(m.eq1_residuals) < 1e-8);
    CHECK(max_abs(m.eq2_residuals) < 1e-8);
  }
}

TEST_CASE("random initialisations reach the same minimum") {
  std::mt19937_64 rng(11);
  const auto p = s12_problem("a1=1,a2=1");
  const MinimumPoint ref = minimize_Fs(p, 0.3, default_start(surface_s12()));
  REQUIRE(ref.converged);
  for (int n = 0; n < 10; ++n) {
    const FNCoords init = s12_coords(uniform(rng, 0.3, 3), uniform(rng, 0.3, 3), uniform(rng, -1.5, 1.5),
                                     uniform(rng, -1.5, 1.5));
    const MinimumPoint m = minimize_Fs(p, 0.3, init);
    REQUIRE(m.converged);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::fabs(m.coords.lengths[i] - ref.coords.lengths[i]) < 1e-8);
      CHECK(std::fabs(m.coords.twists[i] - ref.coords.twists[i]) < 1e-8);
    }
  }
}

TEST_CASE("minimum is not beaten by random probes") {
  std::mt19937_64 rng(5);
  const auto p = s12_problem("a1=1,a2=2");
  const double s = 0.2;
  const MinimumPoint m = minimize_Fs(p, s, default_start(surface_s12()));
  REQUIRE(m.converged);
  for (int n = 0; n < 200; ++n) {
    const FNCoords c = s12_coords(uniform(rng, 0.05, 5), uniform(rng, 0.05, 5), uniform(rng, -3, 3), uniform(rng, -3, 3));
    CHECK(m.value <= eval_Fs(p, s, c) + 1e-12);
  }
}

TEST_CASE("criticality residuals detect a non-critical point") {
  const auto p = s12_problem("a1=1,a2=1");
  const Residuals r = criticality_residuals(p, s12_coords(2, 2, 1, 0));
  CHECK(max_abs(r.eq1) > 1e-3);
  const Residuals sym = criticality_residuals(p, s12_coords(2, 2, 0, 0));
  CHECK(max_abs(sym.eq1) == 0.0);
  CHECK(max_abs(sym.eq2) < 1e-14);
}

TEST_CASE("geometric grid") {
  const auto g = geometric_grid(0.1, 1e-5, 5);
  REQUIRE(g.size() == 21);
  CHECK(g.front() == 0.1);
  CHECK(g.back() == Approx(1e-5).epsilon(1e-14));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] / g[k - 1] == Approx(std::pow(10.0, -0.2)).epsilon(1e-12));
  CHECK_THROWS(geometric_grid(1e-5, 0.1, 5));
  CHECK_THROWS(geometric_grid(0.1, 1e-5, 0));
  CHECK_THROWS(geometric_grid(1.5, 1e-5, 5));
  CHECK_THROWS(geometric_grid(0.1, 0.0, 5));
}

TEST_CASE("trajectory along a1 + a2 stays symmetric and pinches linearly") {
  const auto p = s12_problem("a1=1,a2=1");
  const Trajectory t = trace_line(p, geometric_grid(0.1, 1e-4, 4), default_start(surface_s12()));
  REQUIRE_FALSE(t.partial);
  REQUIRE(t.points.size() == t.grid.size());
  for (const auto& m : t.points) {
    CHECK(m.coords.lengths[0] == Approx(m.coords.lengths[1]).epsilon(1e-9));
    CHECK(max_abs(m.coords.twists) < 1e-8);
    CHECK(m.coords.lengths[0] / m.s < 10.0);
    CHECK(m.coords.lengths[0] / m.s > 0.1);
  }
}

TEST_CASE("mu = a1 alone does not fill with beta and the trace stops") {
  const MinimaProblem p(surface_s12(), parse_multicurve("a1=1"), parse_multicurve("beta"));
  const Trajectory t = trace_line(p, geometric_grid(0.1, 1e-3, 3), default_start(surface_s12()));
  CHECK(t.partial);
  REQUIRE(t.divergence.has_value());
  CHECK(t.divergence->diverged);
  CHECK_FALSE(t.divergence->note.empty());
  CHECK(t.points.size() < t.grid.size());
}
