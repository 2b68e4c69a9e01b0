#include "lom/pants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lom {

namespace {

constexpr double kSmallLength = 1e-4;
constexpr double kLargeLength = 50.0;

void check_pair(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw std::invalid_argument("pants boundary index must be 1, 2 or 3");
  if (i == j) throw std::invalid_argument("pants perpendicular: boundaries must differ");
}

void check_foot(const PantsLengths& p, int i) {
  if (p[i] == 0.0) {
    throw CuspFootError("pants boundary " + std::to_string(i) + " is a cusp; no perpendicular foot");
  }
}

// cosh d_ij both as a plain value (when representable without loss) and as a log.
struct PerpCosh {
  double value;      // NaN when only the log is reliable
  double log_value;
};

PerpCosh cosh_perp(const PantsLengths& p, int i, int j) {
  const int k = 6 - i - j;
  const double li = p[i] / 2, lj = p[j] / 2, lk = p[k] / 2;
  const double max_len = std::max({p[i], p[j], p[k]});
  const double min_len = std::min(p[i], p[j]);
  if (min_len >= kSmallLength && max_len <= kLargeLength) {
    const double si = std::sinh(li), sj = std::sinh(lj);
    const double value = std::cosh(lk) / (si * sj) + (std::cosh(li) / si) * (std::cosh(lj) / sj);
    return {value, std::log(value)};
  }
  // log of cosh(lk)/(si sj) + coth(li) coth(lj), as a log-sum-exp.
  const double a = log_cosh(lk) - log_sinh(li) - log_sinh(lj);
  const double b = (log_cosh(li) - log_sinh(li)) + (log_cosh(lj) - log_sinh(lj));
  const double hi = std::max(a, b), lo = std::min(a, b);
  return {std::numeric_limits<double>::quiet_NaN(), hi + std::log1p(std::exp(lo - hi))};
}

double log_sinh_from_cosh(const PerpCosh& x) {
  if (std::isfinite(x.value) && x.log_value < 10.0) {
    return std::log(std::sqrt((x.value - 1.0) * (x.value + 1.0)));
  }
  return x.log_value + 0.5 * std::log1p(-std::exp(-2.0 * x.log_value));
}

IdealGeodesic image(const Mat2<long double>& g, const IdealGeodesic& geo) {
  auto map = [&](double x) {
    const long double xl = x;
    return static_cast<double>((g.a * xl + g.b) / (g.c * xl + g.d));
  };
  const double u = map(geo.end1), v = map(geo.end2);
  return {std::min(u, v), std::max(u, v)};
}

// Boundary element conjugated by a fixed rotation about i, which moves the
// axis of b1 off the point at infinity.
Mat2<long double> boundary(const PantsEmbedding& e, int i) {
  static const Mat2<long double> k = rotation_about_i<long double>(0.7L);
  switch (i) {
    case 1: return k * e.b1 * k.inverse();
    case 2: return k * e.b2 * k.inverse();
    case 3: return k * e.b3 * k.inverse();
    default: throw std::invalid_argument("pants boundary index must be 1, 2 or 3");
  }
}

}  // namespace

PantsLengths::PantsLengths(double a, double b, double c) : l1(a), l2(b), l3(c) {
  for (double l : {a, b, c}) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("pants lengths must be finite and >= 0");
  }
}

double PantsLengths::operator[](int boundary) const {
  switch (boundary) {
    case 1: return l1;
    case 2: return l2;
    case 3: return l3;
    default: throw std::invalid_argument("pants boundary index must be 1, 2 or 3");
  }
}

double perp_between(const PantsLengths& p, int i, int j) {
  check_pair(i, j);
  check_foot(p, i);
  check_foot(p, j);
  const PerpCosh x = cosh_perp(p, i, j);
  if (std::isfinite(x.value)) return acosh_stable(x.value);
  return acosh_from_log(x.log_value);
}

double perp_self(const PantsLengths& p, int i, int j) {
  check_pair(i, j);
  check_foot(p, i);
  check_foot(p, j);
  const double log_arg = log_sinh_from_cosh(cosh_perp(p, i, j)) + log_sinh(p[j] / 2);
  return 2.0 * acosh_from_log(log_arg);
}

double perp_estimate(double li, double lj) {
  if (!(li > 0.0) || !(lj > 0.0)) throw std::invalid_argument("perp_estimate: lengths must be > 0");
  return -std::log(li) - std::log(lj);
}

double collar_width(double l) {
  if (!(l > 0.0)) throw std::invalid_argument("collar_width: length must be > 0");
  return l >= 1.0 ? 0.0 : -2.0 * std::log(l);
}

PantsEmbedding embed_pants(const PantsLengths& p) {
  if (p.l1 == 0.0 || p.l2 == 0.0) throw CuspFootError("embed_pants: boundaries 1 and 2 must be geodesics");
  using L = long double;
  const L h1 = L(p.l1) / 2, h2 = L(p.l2) / 2, h3 = L(p.l3) / 2;
  const L lambda = std::exp(h1);
  const L c2 = std::cosh(h2), c3 = std::cosh(h3);
  // tr(b2) = 2 c2 and tr(b1 b2) = -2 c3 fix the diagonal of b2.
  const L a = -(c3 + c2 / lambda) / std::sinh(h1);
  const L d = 2 * c2 - a;
  const L r = std::sqrt((std::exp(h2) - a) * (std::exp(-h2) - a));
  PantsEmbedding e;
  e.b1 = {lambda, 0, 0, 1 / lambda};
  e.b2 = {a, r, -r, d};
  e.b3 = (e.b1 * e.b2).inverse();
  return e;
}

double embedded_perp_between(const PantsEmbedding& e, int i, int j) {
  check_pair(i, j);
  return geodesic_distance(axis_of(boundary(e, i)), axis_of(boundary(e, j)));
}

double embedded_perp_self(const PantsEmbedding& e, int i) {
  // The arc from B_i back to itself runs around the next boundary, so its
  // lift joins the axis of b_i to that axis moved by the next boundary element.
  const int next = i % 3 + 1;
  const IdealGeodesic axis = axis_of(boundary(e, i));
  return geodesic_distance(axis, image(boundary(e, next), axis));
}

}  // namespace lom
