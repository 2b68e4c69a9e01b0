#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "lom/hyp_core.hpp"

using namespace lom;
using doctest::Approx;

TEST_CASE("acosh_stable: exact points and the log branch") {
  CHECK(acosh_stable(1.0) == 0.0);
  CHECK(acosh_stable(std::cosh(2.0)) == Approx(2.0).epsilon(1e-15));
  // mpmath, 30 digits: acosh(1e12)
  CHECK(acosh_stable(1e12) == Approx(28.3241682964884935).epsilon(1e-15));
  CHECK_THROWS_AS(acosh_stable(0.999), std::domain_error);
  CHECK_THROWS_AS(acosh_stable(std::nan("")), std::domain_error);
}

TEST_CASE("acosh_stable: branches agree at the switch and stay monotone") {
  const double below = std::nextafter(1e8, 0.0);
  const double above = std::nextafter(1e8, 2e8);
  CHECK(acosh_stable(below) <= acosh_stable(above));
  CHECK(acosh_stable(above) == Approx(std::acosh(above)).epsilon(1e-15));
  double prev = 0.0;
  for (double x = 1.0; x < 1e300; x *= 3.7) {
    const double v = acosh_stable(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("acosh_stable inverts cosh") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 2000; ++n) {
    const double x = std::exp(std::log(1e-6) + (std::log(700.0) - std::log(1e-6)) * unit_uniform(rng()));
    const double back = acosh_stable(std::cosh(x));
    // cosh(x) - 1 carries an absolute rounding error of one ulp of 1, which
    // bounds what any arccosh can recover for small x.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() / (x * x);
    CHECK(std::fabs(back - x) / x <= std::max(1e-12, floor));
  }
}

TEST_CASE("acosh_from_log matches acosh_stable") {
  for (double lx : {0.0, 0.3, 5.0, 18.0, 18.5, 40.0, 600.0, 1e4}) {
    const double direct = lx < 700 ? acosh_stable(std::exp(lx)) : lx + std::numbers::ln2;
    CHECK(acosh_from_log(lx) == Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("log_sinh and log_cosh") {
  for (double x : {1e-8, 0.5, 3.0, 19.9, 20.1, 50.0}) {
    CHECK(log_sinh(x) == Approx(std::log(std::sinh(x))).epsilon(1e-14));
    CHECK(log_cosh(x) == Approx(std::log(std::cosh(x))).epsilon(1e-14));
  }
  CHECK(log_cosh(0.0) == 0.0);
  CHECK(log_sinh(1000.0) == Approx(1000.0 - std::numbers::ln2).epsilon(1e-15));
  CHECK_THROWS(log_sinh(0.0));
}

TEST_CASE("length_from_trace") {
  const double e = std::numbers::e;
  CHECK(length_from_trace(e + 1.0 / e) == Approx(2.0).epsilon(1e-14));
  CHECK(length_from_trace(-(e + 1.0 / e)) == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(length_from_trace(2.0), NonHyperbolicError);
  CHECK_THROWS_AS(length_from_trace(-1.0), NonHyperbolicError);
}

TEST_CASE("hdistance examples") {
  CHECK(hdistance({0, 1}, {0, 1}) == 0.0);
  CHECK(hdistance({0, 1}, {0, std::numbers::e}) == Approx(1.0).epsilon(1e-15));
  // mpmath: acosh(1.5)
  CHECK(hdistance({0, 1}, {1, 1}) == Approx(0.962423650119206895).epsilon(1e-15));
  CHECK_THROWS_AS(HPoint(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("hdistance is isometry invariant, symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(11);
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); };
  for (int n = 0; n < 500; ++n) {
    const HPoint p(u(-3, 3), u(0.1, 4)), q(u(-3, 3), u(0.1, 4)), r(u(-3, 3), u(0.1, 4));
    const Isometry g = rotation_about_i(u(-3, 3)) * axis_translation(u(-2, 2)) * rotation_about_i(u(-3, 3));
    const double d = hdistance(p, q);
    CHECK(hdistance(apply(g, p), apply(g, q)) == Approx(d).epsilon(1e-12));
    CHECK(hdistance(q, p) == d);
    CHECK(hdistance(p, r) <= hdistance(p, q) + hdistance(q, r) + 1e-12);
  }
}

TEST_CASE("rotation_about_i is counter-clockwise and fixes i") {
  const Isometry k = rotation_about_i(std::numbers::pi / 2);
  const auto fixed = k.apply({0.0, 1.0});
  CHECK(std::abs(fixed - std::complex<double>(0.0, 1.0)) < 1e-15);
  // The upward tangent at i turns to point left (towards negative x).
  const auto above = k.apply({0.0, 1.0 + 1e-7});
  CHECK(above.real() < 0.0);
}

TEST_CASE("axis_of and geodesic_distance") {
  const Mat2<double> g = axis_translation(1.3);
  CHECK_THROWS(axis_of(g));  // endpoint at infinity
  const Mat2<double> k = rotation_about_i(0.4);
  const Mat2<double> h = k * g * k.inverse();
  const IdealGeodesic axis = axis_of(h);
  // The conjugated axis passes through i.
  const double centre = 0.5 * (axis.end1 + axis.end2), radius = 0.5 * (axis.end2 - axis.end1);
  CHECK(std::hypot(centre, 1.0) == Approx(radius).epsilon(1e-14));
  // Two geodesics orthogonal to the imaginary axis at heights 1 and e^2.
  CHECK(geodesic_distance({-1.0, 1.0}, {-std::exp(2.0), std::exp(2.0)}) == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS(geodesic_distance({-1.0, 1.0}, {0.0, 2.0}));
}

TEST_CASE("broken arc: single horizontal") {
  const BrokenArc arc = build_broken_arc(BrokenArcSpec::zigzag({0, 0}, {2}));
  CHECK(arc.endpoint_distance() == Approx(2.0).epsilon(1e-14));
  CHECK(arc.total_length == 2.0);
  CHECK(arc.segments.size() == 3);
}

TEST_CASE("broken arc: Z-shaped r = 1 against quadrilateral trigonometry") {
  // Endpoints on the two perpendiculars at the ends of H, on opposite sides:
  // cosh D = cosh s1 cosh s2 cosh d + sinh s1 sinh s2.
  const double s = 2.0, d = 2.0;
  const BrokenArc arc = build_broken_arc(BrokenArcSpec::zigzag({s, s}, {d}));
  const double expected = std::acosh(std::cosh(s) * std::cosh(s) * std::cosh(d) + std::sinh(s) * std::sinh(s));
  CHECK(arc.endpoint_distance() == Approx(expected).epsilon(1e-13));
  const DeficitSample sample = measure_deficit(BrokenArcSpec::zigzag({s, s}, {d}));
  CHECK(sample.deficit > 0.0);
  CHECK(sample.deficit < 2.0);
}

TEST_CASE("broken arc: r = 2 deficit at most twice the r = 1 deficit") {
  const double two = measure_deficit(BrokenArcSpec::zigzag({1, 1, 1}, {3, 3})).deficit;
  const double one = measure_deficit(BrokenArcSpec::zigzag({1, 1}, {3})).deficit;
  CHECK(two >= 0.0);
  CHECK(two <= 2.0 * one);
}

TEST_CASE("broken arc input validation") {
  CHECK_THROWS(build_broken_arc(BrokenArcSpec::zigzag({1}, {2})));
  CHECK_THROWS(build_broken_arc(BrokenArcSpec::zigzag({-1, 1}, {2})));
  CHECK_THROWS(build_broken_arc(BrokenArcSpec::zigzag({1, 1}, {0})));
  BrokenArcSpec bad{{1, 1, 1}, {2, 2}, {Turn::left, Turn::right, Turn::left, Turn::left}};
  CHECK_NOTHROW(bad.validate());
  bad.turns = {Turn::left, Turn::right, Turn::right, Turn::left};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("deficit survey") {
  CHECK(deficit_survey(0, 1.0, 2, 1).empty());
  CHECK_THROWS(deficit_survey(10, 0.0, 2, 1));
  CHECK_THROWS(deficit_survey(10, 1.0, 0, 1));

  auto max_deficit = [](const std::vector<DeficitSample>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, x.deficit);
    return m;
  };
  const auto d1 = deficit_survey(1000, 1.0, 2, 42);
  const auto d3 = deficit_survey(1000, 3.0, 2, 42);
  for (const auto& x : d1) {
    CHECK(x.deficit >= -1e-9);
    CHECK(x.endpoint_distance <= x.total + 1e-9);
    CHECK(x.min_horizontal >= 1.0);
  }
  CHECK(std::isfinite(max_deficit(d1)));
  CHECK(max_deficit(d3) <= max_deficit(d1));
  // Same seed, same arcs.
  const auto again = deficit_survey(1000, 1.0, 2, 42);
  CHECK(again.back().deficit == d1.back().deficit);
}
