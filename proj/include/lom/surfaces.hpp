#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lom/hyp_core.hpp"

namespace lom {

/// Curve name in a surface registry: "a1", "a2", "beta", "d1", "d2" on s12,
/// "a", "b" on s11.
using CurveId = std::string;

inline const CurveId kCusp = "cusp";

class UnknownCurveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The cosh(l/4) argument of a dual-length formula dropped below 1.
class FormulaDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fenchel-Nielsen coordinates, one (length, twist) pair per pants curve.
struct FNCoords {
  std::vector<double> lengths;
  std::vector<double> twists;

  FNCoords() = default;
  FNCoords(std::vector<double> l, std::vector<double> t);

  std::size_t size() const { return lengths.size(); }
  void validate() const;
};

/// Shorthand for the two-curve coordinates of s12.
FNCoords s12_coords(double l1, double l2, double t1, double t2);

struct DualInfo {
  CurveId curve;
  int count = 0;
};

class SurfaceModel;

/// Positive combination of pairwise disjoint registered curves.
struct WeightedMulticurve {
  std::map<CurveId, double> weights;

  /// Throws on unknown curves, non-positive weights or intersecting support.
  void validate(const SurfaceModel& surface) const;
};

/// Parses "a1=1,a2=2" (a bare name means weight 1).
WeightedMulticurve parse_multicurve(std::string_view text);
std::string format_multicurve(const WeightedMulticurve& m);

class SurfaceModel {
 public:
  std::string name;
  std::vector<CurveId> pants_curves;
  std::vector<CurveId> registry;
  std::vector<std::vector<int>> intersection;
  /// Per pants curve: one entry per adjacent pair of pants, listing the other
  /// boundaries of that pants (kCusp for a puncture).
  std::vector<std::vector<std::vector<CurveId>>> pants_adjacency;
  std::vector<DualInfo> dual_of;

  std::size_t index_of(const CurveId& c) const;
  bool has_curve(const CurveId& c) const;
  /// Index into pants_curves, or -1.
  int pants_index(const CurveId& c) const;
  int intersection_of(const CurveId& a, const CurveId& b) const;

  /// Length of a registered curve at the given coordinates.
  double length(const CurveId& c, const FNCoords& x) const;
  /// Gradient over (lengths..., twists...).
  std::vector<double> length_gradient(const CurveId& c, const FNCoords& x) const;

  /// Length via the matrix representation, whatever closed forms exist.
  double oracle_length(const CurveId& c, const FNCoords& x) const;
};

/// Registered surfaces by name: "s12" or "s11".
const SurfaceModel& surface_by_name(std::string_view name);
const SurfaceModel& surface_s12();
const SurfaceModel& surface_s11();

/// Sum over the support of m of weight * i(gamma, curve).
double intersection_number(const SurfaceModel& surface, const CurveId& gamma,
                           const WeightedMulticurve& m);

// ---------------------------------------------------------------------------
// Closed forms on s12. Gradients are ordered (l1, l2, t1, t2).

struct Grad4 {
  double l1 = 0.0, l2 = 0.0, t1 = 0.0, t2 = 0.0;
};

double length_beta_s12(const FNCoords& c);
Grad4 grad_length_beta_s12(const FNCoords& c);

/// which = 1 for d1 (crosses a1 twice), 2 for d2.
/// cosh(l/4) = sinh(l_other/2) sinh(d12) cosh(t_which/2), where d12 is the
/// a1-a2 perpendicular in either pants; at zero twist sinh(d12) = sinh(l_beta/2).
double length_dual_s12(const FNCoords& c, int which);
Grad4 grad_length_dual_s12(const FNCoords& c, int which);

// ---------------------------------------------------------------------------
// Matrix representations.

struct RepMatrices {
  /// Generators by single upper-case letter; lower case denotes the inverse.
  std::map<char, Mat2<long double>> generators;
  std::map<CurveId, std::string> words;
  std::vector<std::string> puncture_words;

  Mat2<long double> evaluate(std::string_view word) const;
  Mat2<long double> word_of(const CurveId& c) const;
};

/// Two copies of the (l1, l2, cusp) pants glued along a1 and a2 with twists
/// realised as axis translations.
RepMatrices build_rep_s12(const FNCoords& c);

/// Once-punctured torus: A has length l, B is the dual, [A,B] is parabolic.
RepMatrices build_rep_s11(double l, double t);

double oracle_length(const RepMatrices& rep, const CurveId& c);

}  // namespace lom
