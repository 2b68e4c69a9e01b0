#include "doctest.h"

#include <cmath>

#include "lom/asymptotics.hpp"

using namespace lom;
using doctest::Approx;

namespace {

// Hand-built trajectory with l1 = c1 * s^p1, l2 = c2 * s^p2, zero twists.
Trajectory synthetic(double c1, double p1, double c2, double p2) {
  Trajectory t;
  t.problem = MinimaProblem(surface_s12(), parse_multicurve("a1=1,a2=1"), parse_multicurve("beta"));
  t.grid = geometric_grid(0.1, 1e-5, 5);
  for (double s : t.grid) {
    MinimumPoint m;
    m.s = s;
    m.coords = s12_coords(c1 * std::pow(s, p1), c2 * std::pow(s, p2), 0, 0);
    m.converged = true;
    t.points.push_back(m);
  }
  return t;
}

}  // namespace

TEST_CASE("collar estimates at l = 1e-3") {
  const SurfaceModel& m = surface_s12();
  const FNCoords c = s12_coords(1e-3, 1e-3, 0, 0);
  CHECK(collar_length_estimate(m, "beta", c) == Approx(27.631021115928547).epsilon(1e-14));
  CHECK(collar_length_estimate(m, "d2", c) == Approx(27.631021115928547).epsilon(1e-14));
  CHECK(collar_length_estimate(m, "a1", c) == 0.0);
  CHECK_THROWS_AS(collar_length_estimate(m, "zz", c), UnknownCurveError);
}

TEST_CASE("dual estimate on the symmetric family") {
  const SurfaceModel& m = surface_s12();
  for (double e : {1e-2, 1e-4}) {
    const FNCoords c = s12_coords(e, e, 0, 0);
    CHECK(dual_length_estimate(m, "a1", c) == Approx(4 * std::log(1 / e) + 2 * e).epsilon(1e-14));
  }
  CHECK_THROWS(dual_length_estimate(m, "beta", s12_coords(1, 1, 0, 0)));
}

TEST_CASE("dual estimate on the one-holed torus") {
  const SurfaceModel& m = surface_s11();
  const FNCoords c({1e-3}, {0.0});
  CHECK(dual_length_estimate(m, "a", c) == Approx(2 * std::log(1e3)).epsilon(1e-14));
}

TEST_CASE("collar residuals converge to constants") {
  const SurfaceModel& m = surface_s12();
  const FNCoords c = s12_coords(1e-7, 1e-7, 0, 0);
  CHECK(m.length("beta", c) - collar_length_estimate(m, "beta", c) == Approx(2 * std::log(16.0)).epsilon(1e-5));
  CHECK(m.length("d1", c) - collar_length_estimate(m, "d1", c) == Approx(4 * std::log(8.0)).epsilon(1e-5));
}

TEST_CASE("nnls") {
  {
    const auto x = nnls({{1, 0}, {0, 1}}, {1, -1});
    CHECK(x[0] == Approx(1));
    CHECK(x[1] == 0.0);
  }
  {
    const auto x = nnls({{1, 0}, {1, 1}, {0, 1}}, {2, 3, 1});
    CHECK(x[0] == Approx(2));
    CHECK(x[1] == Approx(1));
  }
  {
    // Unconstrained optimum has a negative component; constrained optimum sits on the boundary.
    const auto x = nnls({{1, 1}, {1, 2}}, {1, 0});
    CHECK(x[1] == 0.0);
    CHECK(x[0] == Approx(0.5));
  }
  CHECK_THROWS(nnls({{1, 0}, {1}}, {1, 1}));
}

TEST_CASE("limit inference from synthetic lengths") {
  const SurfaceModel& m = surface_s12();
  const LimitReport equal = infer_limit(m, {"d1", "d2"}, {40.0, 40.0});
  CHECK(equal.barycentre);
  CHECK(equal.inferred_weights[0] == Approx(1));
  CHECK(equal.inferred_weights[1] == Approx(1));
  CHECK(equal.residual < 1e-12);
  CHECK(equal.verdict.find("barycentre") == 0);

  const LimitReport skew = infer_limit(m, {"d1", "d2"}, {40.0, 20.0});
  CHECK_FALSE(skew.barycentre);
  CHECK(skew.inferred_weights[0] / skew.inferred_weights[1] == Approx(2));
  CHECK(skew.length_ratios[0][1] == Approx(2));
  CHECK(skew.verdict.find("not the barycentre") != std::string::npos);

  const LimitReport all = infer_limit(m, {"beta", "d1", "d2"}, {40.0, 40.0, 40.0});
  CHECK(all.barycentre);
  CHECK(all.residual < 1e-12);
  const LimitReport off = infer_limit(m, {"beta", "d1", "d2"}, {60.0, 40.0, 40.0});
  CHECK(off.residual > 0.05);
}

TEST_CASE("limit inference rejects probe sets that cannot see every pants curve") {
  const SurfaceModel& m = surface_s12();
  CHECK_THROWS_AS(infer_limit(m, {"d1"}, {10.0}), IllConditionedError);
  CHECK_THROWS_AS(infer_limit(m, {"beta"}, {10.0}), IllConditionedError);
  CHECK_THROWS_AS(infer_limit(m, {"d1", "d2"}, {10.0}), std::invalid_argument);
  CHECK_THROWS_AS(infer_limit(m, {"d1", "d2"}, {10.0, -1.0}), std::invalid_argument);
}

TEST_CASE("order fit recovers a planted power law") {
  const Trajectory t = synthetic(3.0, 1.0, 0.5, 2.0);
  const OrderFit f1 = growth_order_fit(t, "l_a1");
  CHECK(f1.slope == Approx(1).epsilon(1e-12));
  CHECK(f1.intercept == Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(f1.r2 == Approx(1).epsilon(1e-12));
  CHECK(f1.samples == 11);
  CHECK(f1.window_lo == Approx(1e-5));
  CHECK(f1.window_hi == Approx(1e-3));
  CHECK(growth_order_fit(t, "l_a2").slope == Approx(2).epsilon(1e-12));
  CHECK(growth_order_fit(t, "l_a1/l_a2").slope == Approx(-1).epsilon(1e-12));
  CHECK(growth_order_fit(t, "s").slope == Approx(1).epsilon(1e-12));
  CHECK(growth_order_fit(t, "l_a1", 1e-3, 1e-1).samples == 11);
}

TEST_CASE("order fit input errors") {
  const Trajectory t = synthetic(3.0, 1.0, 0.5, 2.0);
  CHECK_THROWS(growth_order_fit(t, "l_zz"));
  CHECK_THROWS(growth_order_fit(t, "x_a1"));
  CHECK_THROWS(growth_order_fit(t, "l_a1", 1e-5, 2e-5));
  CHECK_THROWS(growth_order_fit(Trajectory{}, "l_a1"));
}

TEST_CASE("collar residual series") {
  const Trajectory t = synthetic(2.0, 1.0, 2.0, 1.0);
  const ResidualSeries r = residual_analysis(t, "beta");
  REQUIRE(r.s.size() == t.points.size());
  for (std::size_t k = 0; k < r.s.size(); ++k) {
    const FNCoords& c = t.points[k].coords;
    const double direct = surface_s12().length("beta", c) - 2 * std::log(1 / c.lengths[0]) - 2 * std::log(1 / c.lengths[1]);
    CHECK(r.residual[k] == Approx(direct).epsilon(1e-12));
  }
  CHECK(r.residual.back() == Approx(2 * std::log(16.0)).epsilon(1e-4));
  CHECK(r.trend == Approx(std::fabs(r.residual.back()) / std::log(1e5)).epsilon(1e-12));
  CHECK(r.variation >= 0.0);
  const ResidualSeries w = residual_analysis(t, "beta", 1e-5, 1e-2);
  CHECK(w.window_lo == 1e-5);
  CHECK(w.window_hi == 1e-2);
  CHECK(w.variation <= r.variation);
  CHECK(w.trend == Approx(r.trend));
}
