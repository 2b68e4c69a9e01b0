#include "doctest.h"

#include <cmath>
#include <random>

#include "lom/pants.hpp"

using namespace lom;
using doctest::Approx;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); }

}  // namespace

TEST_CASE("perpendiculars of the (1,1,1) pants") {
  const PantsLengths p(1, 1, 1);
  // mpmath, 30 digits
  CHECK(perp_between(p, 1, 2) == Approx(2.86869514161982188).epsilon(1e-14));
  CHECK(perp_between(p, 2, 1) == perp_between(p, 1, 2));
  CHECK(perp_self(p, 1, 2) == Approx(4.40295529486325701).epsilon(1e-14));
}

TEST_CASE("self perpendicular does not depend on the helper boundary") {
  const PantsLengths p(1, 2, 2);
  CHECK(perp_self(p, 1, 2) == Approx(perp_self(p, 1, 3)).epsilon(1e-13));
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const PantsLengths q(uniform(rng, 0.05, 4), uniform(rng, 0.05, 4), uniform(rng, 0.05, 4));
    CHECK(perp_self(q, 1, 2) == Approx(perp_self(q, 1, 3)).epsilon(1e-11));
    CHECK(perp_self(q, 2, 1) == Approx(perp_self(q, 2, 3)).epsilon(1e-11));
  }
}

TEST_CASE("pinched pants: perpendicular residual constants") {
  const double eps = 1e-4;
  const PantsLengths p(eps, eps, eps);
  // cosh d12 ~ 8 / eps^2, so d12 - 2 log(1/eps) -> log 16.
  CHECK(std::fabs(perp_between(p, 1, 2) - 2 * std::log(1 / eps) - std::log(16.0)) < 1e-3);
  // cosh(d11/2) ~ 4 / eps, so d11/2 - log(1/eps) -> log 8.
  for (double e : {1e-3, 1e-5, 1e-7, 1e-9}) {
    const PantsLengths q(e, e, e);
    CHECK(perp_self(q, 1, 2) / 2 - std::log(1 / e) == Approx(std::log(8.0)).epsilon(1e-5));
  }
}

TEST_CASE("log-domain branch continues the direct branch") {
  const double lo = std::nextafter(1e-4, 0.0), hi = 1e-4;
  const PantsLengths a(lo, lo, 0.5), b(hi, hi, 0.5);
  CHECK(perp_between(a, 1, 2) == Approx(perp_between(b, 1, 2)).epsilon(1e-12));
  CHECK(perp_self(a, 1, 2) == Approx(perp_self(b, 1, 2)).epsilon(1e-12));
  // Very long boundaries stay finite.
  const PantsLengths big(900, 800, 700);
  CHECK(std::isfinite(perp_between(big, 1, 2)));
  CHECK(perp_between(big, 1, 2) >= 0.0);
}

TEST_CASE("estimate residual stays bounded under pinching") {
  double lo = 1e300, hi = -1e300;
  for (double e = 1e-6; e <= 1e-1; e *= 3) {
    const double r = perp_between(PantsLengths(e, e, 1.0), 1, 2) - perp_estimate(e, e);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi - lo < 0.1);
  CHECK(perp_estimate(1, 1) == 0.0);
  CHECK(perp_estimate(1e-3, 1e-3) == Approx(13.815510557964274).epsilon(1e-15));
}

TEST_CASE("cusps reject perpendicular feet") {
  const PantsLengths p(0, 1, 1);
  CHECK_THROWS_AS(perp_between(p, 1, 2), CuspFootError);
  CHECK_THROWS_AS(perp_self(p, 2, 1), CuspFootError);
  CHECK_NOTHROW(perp_between(p, 2, 3));
  CHECK_THROWS_AS(perp_between(p, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(PantsLengths(-1, 1, 1), std::invalid_argument);
}

TEST_CASE("collar widths") {
  CHECK(collar_width(1.0) == 0.0);
  CHECK(collar_width(2.0) == 0.0);
  CHECK(collar_width(std::exp(-1.0)) == Approx(2.0).epsilon(1e-15));
  CHECK(collar_width(1e-4) == Approx(18.420680743952367).epsilon(1e-15));
}

TEST_CASE("perpendiculars are monotone in the boundary lengths") {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 300; ++n) {
    const double a = uniform(rng, 0.01, 5), b = uniform(rng, 0.01, 5), c = uniform(rng, 0.01, 5);
    const double base = perp_between(PantsLengths(a, b, c), 1, 2);
    CHECK(perp_between(PantsLengths(a * 1.01, b, c), 1, 2) < base);
    CHECK(perp_between(PantsLengths(a, b * 1.01, c), 1, 2) < base);
    CHECK(perp_between(PantsLengths(a, b, c * 1.01), 1, 2) > base);
  }
}

TEST_CASE("closed forms agree with the half-plane embedding") {
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 100; ++n) {
    const PantsLengths p(uniform(rng, 0.1, 3), uniform(rng, 0.1, 3), uniform(rng, 0.1, 3));
    const PantsEmbedding e = embed_pants(p);
    CHECK(static_cast<double>(e.b1.trace()) == Approx(2 * std::cosh(p.l1 / 2)).epsilon(1e-14));
    CHECK(static_cast<double>(e.b2.trace()) == Approx(2 * std::cosh(p.l2 / 2)).epsilon(1e-14));
    CHECK(static_cast<double>(e.b3.trace()) == Approx(-2 * std::cosh(p.l3 / 2)).epsilon(1e-14));
    for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      CHECK(embedded_perp_between(e, i, j) == Approx(perp_between(p, i, j)).epsilon(1e-9));
    }
    for (int i = 1; i <= 3; ++i) {
      const int j = i % 3 + 1;
      CHECK(embedded_perp_self(e, i) == Approx(perp_self(p, i, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("embedding with a cusp") {
  const PantsEmbedding e = embed_pants(PantsLengths(1, 1, 0));
  CHECK(std::fabs(static_cast<double>(e.b3.trace()) + 2.0) < 1e-15);
  CHECK(embedded_perp_between(e, 1, 2) == Approx(perp_between(PantsLengths(1, 1, 0), 1, 2)).epsilon(1e-12));
  CHECK_THROWS_AS(embed_pants(PantsLengths(0, 1, 1)), CuspFootError);
}
