#include "lom/hyp_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace lom {

namespace {

constexpr double kLogBranchThreshold = 1e8;

// log((1 + sqrt(1 - 1/x^2)) / 2), i.e. arccosh(x) - log(2x), for large x.
double acosh_log_correction(double inv_x_sq) {
  const double root = std::sqrt(1.0 - inv_x_sq);
  return std::log1p(-inv_x_sq / (2.0 * (1.0 + root)));
}

}  // namespace

double acosh_stable(double x) {
  if (!(x >= 1.0)) {
    throw std::domain_error("acosh_stable: argument " + std::to_string(x) + " < 1");
  }
  if (x > kLogBranchThreshold) {
    return std::log(2.0 * x) + acosh_log_correction(1.0 / (x * x));
  }
  return std::acosh(x);
}

double acosh_from_log(double log_x) {
  if (log_x < std::log(kLogBranchThreshold)) return acosh_stable(std::exp(log_x));
  return log_x + std::numbers::ln2 + acosh_log_correction(std::exp(-2.0 * log_x));
}

double log_sinh(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_sinh: argument must be positive");
  if (x > 20.0) return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x));
}

double log_cosh(double x) {
  x = std::fabs(x);
  return x - std::numbers::ln2 + std::log1p(std::exp(-2.0 * x));
}

double length_from_trace(double trace) {
  const double half = std::fabs(trace) / 2.0;
  if (!(half > 1.0)) {
    throw NonHyperbolicError("trace " + std::to_string(trace) +
                             " is not hyperbolic (|tr| <= 2)");
  }
  return 2.0 * acosh_stable(half);
}

template <typename T>
Mat2<T> axis_translation(T t) {
  return {std::exp(t / 2), T{0}, T{0}, std::exp(-t / 2)};
}

template <typename T>
Mat2<T> rotation_about_i(T angle) {
  const T c = std::cos(angle / 2);
  const T s = std::sin(angle / 2);
  return {c, s, -s, c};
}

template Mat2<double> axis_translation<double>(double);
template Mat2<long double> axis_translation<long double>(long double);
template Mat2<double> rotation_about_i<double>(double);
template Mat2<long double> rotation_about_i<long double>(long double);

HPoint::HPoint(double x_, double y_) : x(x_), y(y_) {
  if (!(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("HPoint: require finite x and y > 0");
  }
}

double hdistance(const HPoint& p, const HPoint& q) {
  const double chord = std::hypot(p.x - q.x, p.y - q.y);
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.y * q.y)));
}

HPoint apply(const Isometry& g, const HPoint& p) {
  const auto w = g.apply(p.z());
  return HPoint(w.real(), w.imag());
}

template <typename T>
IdealGeodesic axis_of(const Mat2<T>& g) {
  using std::fabs;
  using std::sqrt;
  const T tr = g.trace();
  const T disc = tr * tr - T{4};
  if (!(disc > T{0})) throw NonHyperbolicError("axis_of: element is not hyperbolic");
  if (g.c == T{0}) throw std::domain_error("axis_of: axis has an endpoint at infinity");
  // c z^2 + (d - a) z - b = 0; pair the roots to avoid cancellation.
  const T p = g.a - g.d;
  const T root = sqrt(disc);
  const T q = p >= T{0} ? p + root : p - root;
  const T z1 = q / (T{2} * g.c);
  const T z2 = -T{2} * g.b / q;
  return {static_cast<double>(std::min(z1, z2)), static_cast<double>(std::max(z1, z2))};
}

template IdealGeodesic axis_of<double>(const Mat2<double>&);
template IdealGeodesic axis_of<long double>(const Mat2<long double>&);

double geodesic_distance(const IdealGeodesic& g, const IdealGeodesic& h) {
  using L = long double;
  const L p1 = g.end1, p2 = g.end2, q1 = h.end1, q2 = h.end2;
  const L ratio = ((q1 - p1) * (q2 - p2)) / ((q1 - p2) * (q2 - p1));
  if (!(ratio > 0)) throw std::domain_error("geodesic_distance: geodesics intersect");
  const L cosh_d = (1 + ratio) / std::fabs(1 - ratio);
  return acosh_stable(static_cast<double>(cosh_d));
}

// ---------------------------------------------------------------------------

BrokenArcSpec BrokenArcSpec::zigzag(std::vector<double> verticals,
                                    std::vector<double> horizontals) {
  BrokenArcSpec spec{std::move(verticals), std::move(horizontals), {}};
  for (std::size_t j = 0; j < 2 * spec.horizontal_lengths.size(); ++j) {
    spec.turns.push_back(j % 2 == 0 ? Turn::left : Turn::right);
  }
  return spec;
}

void BrokenArcSpec::validate() const {
  const std::size_t r = horizontal_lengths.size();
  if (vertical_lengths.size() != r + 1) {
    throw std::invalid_argument("broken arc: need exactly one more vertical than horizontal");
  }
  if (turns.size() != 2 * r) throw std::invalid_argument("broken arc: need 2r joint turns");
  for (double s : vertical_lengths) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("broken arc: vertical lengths must be >= 0");
    }
  }
  for (double d : horizontal_lengths) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("broken arc: horizontal lengths must be > 0");
    }
  }
  // H_i and H_{i+1} on opposite sides of V_{i+1}: the turn onto V_{i+1} and the
  // turn off it have opposite senses.
  for (std::size_t i = 1; i < r; ++i) {
    if (turns[2 * i] != opposite(turns[2 * i - 1])) {
      throw std::invalid_argument("broken arc: consecutive horizontals must lie in opposite half-planes");
    }
  }
}

BrokenArc build_broken_arc(const BrokenArcSpec& spec) {
  spec.validate();
  const double quarter = std::numbers::pi / 2.0;
  Isometry frame = Isometry::identity();
  BrokenArc arc;
  arc.start = HPoint(0.0, 1.0);
  HPoint here = arc.start;

  auto advance = [&](double length) {
    frame = frame * axis_translation(length);
    const HPoint next = apply(frame, HPoint(0.0, 1.0));
    arc.segments.emplace_back(here, next);
    arc.total_length += length;
    here = next;
  };
  auto turn = [&](Turn t) { frame = frame * rotation_about_i(static_cast<int>(t) * quarter); };

  const std::size_t r = spec.horizontal_count();
  for (std::size_t j = 0; j <= r; ++j) {
    advance(spec.vertical_lengths[j]);
    if (j == r) break;
    turn(spec.turns[2 * j]);
    advance(spec.horizontal_lengths[j]);
    turn(spec.turns[2 * j + 1]);
  }
  arc.end = here;
  return arc;
}

DeficitSample measure_deficit(const BrokenArcSpec& spec) {
  const BrokenArc arc = build_broken_arc(spec);
  DeficitSample out;
  out.total = arc.total_length;
  out.endpoint_distance = arc.endpoint_distance();
  out.deficit = out.total - out.endpoint_distance;
  out.min_horizontal = *std::min_element(spec.horizontal_lengths.begin(), spec.horizontal_lengths.end());
  return out;
}

double unit_uniform(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<DeficitSample> deficit_survey(std::size_t n_samples, double min_horizontal,
                                          std::size_t r, std::uint64_t seed) {
  if (!(min_horizontal > 0.0)) throw std::invalid_argument("deficit_survey: D must be > 0");
  if (r < 1) throw std::invalid_argument("deficit_survey: r must be >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); };
  auto coin = [&] { return (rng() >> 63) != 0 ? Turn::left : Turn::right; };

  std::vector<DeficitSample> out;
  out.reserve(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    BrokenArcSpec spec;
    for (std::size_t j = 0; j <= r; ++j) spec.vertical_lengths.push_back(uniform(0.0, 5.0));
    for (std::size_t j = 0; j < r; ++j) {
      spec.horizontal_lengths.push_back(uniform(min_horizontal, min_horizontal + 5.0));
    }
    for (std::size_t j = 0; j < r; ++j) {
      spec.turns.push_back(j == 0 ? coin() : opposite(spec.turns.back()));
      spec.turns.push_back(coin());
    }
    out.push_back(measure_deficit(spec));
  }
  return out;
}

}  // namespace lom
