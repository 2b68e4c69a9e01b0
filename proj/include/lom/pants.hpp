#pragma once

#include <array>
#include <stdexcept>

#include "lom/hyp_core.hpp"

namespace lom {

/// Raised when a perpendicular would end on a cusp (zero-length boundary).
class CuspFootError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Boundary lengths of a hyperbolic pair of pants; 0 encodes a cusp.
/// Boundaries are numbered 1, 2, 3.
struct PantsLengths {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;

  PantsLengths() = default;
  PantsLengths(double a, double b, double c);

  double operator[](int boundary) const;
};

/// Length d_ij of the common perpendicular between boundaries i != j:
/// cosh d_ij = (cosh(l_k/2) + cosh(l_i/2) cosh(l_j/2)) / (sinh(l_i/2) sinh(l_j/2)).
double perp_between(const PantsLengths& p, int i, int j);

/// Length d_ii of the perpendicular from boundary i to itself, via the
/// right-angled pentagon through boundary j: cosh(d_ii/2) = sinh(d_ij) sinh(l_j/2).
double perp_self(const PantsLengths& p, int i, int j);

/// First-order estimate log(1/l_i) + log(1/l_j).
double perp_estimate(double li, double lj);

/// Collar width 2 log(1/l); zero once l >= 1.
double collar_width(double l);

/// The pants group realised in SL(2,R): b1 has its axis on the imaginary axis,
/// b1 * b2 * b3 = identity, traces 2cosh(l1/2), 2cosh(l2/2), -2cosh(l3/2).
/// Boundary 3 may be a cusp. Built from trace conditions alone, so its
/// perpendiculars give an independent check of the closed forms.
struct PantsEmbedding {
  Mat2<long double> b1;
  Mat2<long double> b2;
  Mat2<long double> b3;
};

PantsEmbedding embed_pants(const PantsLengths& p);

/// Perpendicular lengths measured on the embedding as distances between
/// lifts of the boundary geodesics.
double embedded_perp_between(const PantsEmbedding& e, int i, int j);
double embedded_perp_self(const PantsEmbedding& e, int i);

}  // namespace lom
