#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lom {

/// Raised when a trace does not belong to a hyperbolic element (|tr| <= 2).
class NonHyperbolicError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// arccosh(x) for x >= 1. Above 1e8 the value is log(2x) plus an exact
/// log1p correction, so squaring never overflows.
double acosh_stable(double x);

/// arccosh(exp(log_x)) without forming exp(log_x).
double acosh_from_log(double log_x);

/// log(sinh(x)) and log(cosh(x)) for x > 0 (resp. any x), overflow-free.
double log_sinh(double x);
double log_cosh(double x);

/// Translation length 2 arccosh(|tr|/2) of an element of SL(2,R).
double length_from_trace(double trace);

/// 2x2 matrix acting on the upper half-plane by Moebius transformation.
template <typename T>
struct Mat2 {
  T a{1}, b{0}, c{0}, d{1};

  static constexpr Mat2 identity() { return {T{1}, T{0}, T{0}, T{1}}; }

  constexpr T trace() const { return a + d; }
  constexpr T det() const { return a * d - b * c; }
  /// Inverse assuming unit determinant.
  constexpr Mat2 inverse() const { return {d, -b, -c, a}; }

  template <typename U>
  constexpr Mat2<U> cast() const {
    return {static_cast<U>(a), static_cast<U>(b), static_cast<U>(c), static_cast<U>(d)};
  }

  std::complex<T> apply(std::complex<T> z) const { return (a * z + b) / (c * z + d); }

  /// Conjugation by the reflection z -> -conj(z).
  constexpr Mat2 mirrored() const { return {a, -b, -c, d}; }
};

template <typename T>
constexpr Mat2<T> operator*(const Mat2<T>& m, const Mat2<T>& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

using Isometry = Mat2<double>;

/// Translation by t along the imaginary axis (moves i to i e^t).
template <typename T = double>
Mat2<T> axis_translation(T t);

/// Counter-clockwise rotation by `angle` about the point i.
template <typename T = double>
Mat2<T> rotation_about_i(T angle);

/// Point of the upper half-plane; y > 0.
struct HPoint {
  double x = 0.0;
  double y = 1.0;

  HPoint() = default;
  HPoint(double x_, double y_);

  std::complex<double> z() const { return {x, y}; }
  bool operator==(const HPoint&) const = default;
};

double hdistance(const HPoint& p, const HPoint& q);
HPoint apply(const Isometry& g, const HPoint& p);

/// Complete geodesic given by its two (finite, distinct) ideal endpoints.
struct IdealGeodesic {
  double end1;
  double end2;
};

/// Axis of a hyperbolic element; both fixed points must be finite.
template <typename T>
IdealGeodesic axis_of(const Mat2<T>& g);

/// Distance between two disjoint complete geodesics, computed from the cross
/// ratio of their endpoints.
double geodesic_distance(const IdealGeodesic& g, const IdealGeodesic& h);

// ---------------------------------------------------------------------------
// Broken arcs: alternating vertical/horizontal geodesic segments meeting at
// right angles.

enum class Turn : int { left = 1, right = -1 };

inline Turn opposite(Turn t) { return t == Turn::left ? Turn::right : Turn::left; }

struct BrokenArcSpec {
  std::vector<double> vertical_lengths;    // s_1..s_{r+1}, >= 0
  std::vector<double> horizontal_lengths;  // d_1..d_r, > 0
  std::vector<Turn> turns;                 // one per joint, 2r entries

  std::size_t horizontal_count() const { return horizontal_lengths.size(); }

  /// Zig-zag turns (left, right, left, ...): every horizontal pair lies in
  /// opposite half-planes and each horizontal also crosses.
  static BrokenArcSpec zigzag(std::vector<double> verticals, std::vector<double> horizontals);

  /// Throws std::invalid_argument on a length mismatch, a negative vertical,
  /// a non-positive horizontal, or turns violating the opposite-half-plane rule.
  void validate() const;
};

struct BrokenArc {
  HPoint start;
  HPoint end;
  std::vector<std::pair<HPoint, HPoint>> segments;  // V1, H1, V2, ...

  double total_length = 0.0;
  double endpoint_distance() const { return hdistance(start, end); }
};

/// Walks the arc from (0,1) heading up, composing translations with
/// quarter-turn rotations.
BrokenArc build_broken_arc(const BrokenArcSpec& spec);

struct DeficitSample {
  double total = 0.0;
  double endpoint_distance = 0.0;
  double deficit = 0.0;
  double min_horizontal = 0.0;
};

DeficitSample measure_deficit(const BrokenArcSpec& spec);

/// Random broken arcs with r horizontals, vertical lengths uniform in [0,5],
/// horizontal lengths uniform in [D, D+5] and random admissible turns.
std::vector<DeficitSample> deficit_survey(std::size_t n_samples, double min_horizontal,
                                          std::size_t r, std::uint64_t seed);

/// Deterministic uniform double in [0,1) from a 64-bit engine output.
double unit_uniform(std::uint64_t bits);

}  // namespace lom
