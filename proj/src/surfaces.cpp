#include "lom/surfaces.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "lom/pants.hpp"

namespace lom {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// log(exp(a) + exp(b))
double log_add(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// sqrt(1 - exp(-2 y)) = sqrt(1 - 1/cosh^2) for y = log cosh > 0.
double tanh_from_log_cosh(double y) { return std::sqrt(-std::expm1(-2.0 * y)); }

void check_s12(const FNCoords& c) {
  c.validate();
  if (c.size() != 2) throw std::invalid_argument("s12 coordinates need two pants curves");
}

// Pieces shared by the beta closed form: X = cosh d12 and dX/dl_i.
struct Perp12 {
  double x;
  double dx_dl1;
  double dx_dl2;
};

Perp12 perp12(double l1, double l2) {
  const double h1 = l1 / 2, h2 = l2 / 2;
  const double s1 = std::sinh(h1), s2 = std::sinh(h2);
  const double coth1 = 1.0 / std::tanh(h1), coth2 = 1.0 / std::tanh(h2);
  Perp12 p;
  p.x = 1.0 / (s1 * s2) + coth1 * coth2;
  const double c2_over_s1 = std::cosh(h2) / s1, c1_over_s2 = std::cosh(h1) / s2;
  p.dx_dl1 = -0.5 * (coth1 + c2_over_s1) / (s1 * s2);
  p.dx_dl2 = -0.5 * (coth2 + c1_over_s2) / (s1 * s2);
  return p;
}

// log cosh(l_beta / 2), cosh(l_beta / 2) - 1 and the partials of the log.
struct CoshLog {
  double value;
  double excess;
  Grad4 grad;
};

CoshLog beta_log(const FNCoords& c) {
  check_s12(c);
  const double l1 = c.lengths[0], l2 = c.lengths[1];
  const double h1 = l1 / 2, h2 = l2 / 2;
  const double u1 = c.twists[0] / 2, u2 = c.twists[1] / 2;
  const Perp12 p = perp12(l1, l2);
  const double th1 = std::tanh(u1), th2 = std::tanh(u2);
  // cosh(l_beta/2) = cosh(u1) cosh(u2) (X + tanh(u1) tanh(u2)), and
  // X - 1 = 2 cosh^2((h1 - h2)/2) / (sinh h1 sinh h2) without cancellation.
  const double x_minus_1 = std::exp(kLn2 + 2 * log_cosh((h1 - h2) / 2) - log_sinh(h1) - log_sinh(h2));
  const double bracket = p.x + th1 * th2;
  CoshLog out;
  out.value = log_cosh(u1) + log_cosh(u2) + std::log1p(x_minus_1 + th1 * th2);
  out.excess = out.value < 0.5 ? std::expm1(out.value) : std::numeric_limits<double>::infinity();
  out.grad.l1 = p.dx_dl1 / bracket;
  out.grad.l2 = p.dx_dl2 / bracket;
  out.grad.t1 = 0.5 * th1 + 0.5 * (1.0 - th1 * th1) * th2 / bracket;
  out.grad.t2 = 0.5 * th2 + 0.5 * (1.0 - th2 * th2) * th1 / bracket;
  return out;
}

// arccosh(C) and C / sqrt(C^2 - 1) from log C, using C - 1 when C is near 1.
double acosh_of(const CoshLog& b) {
  if (b.value >= 0.5) return acosh_from_log(b.value);
  const double e = b.excess;
  return std::log1p(e + std::sqrt(e * (e + 2)));
}

double inv_tanh_of(const CoshLog& b) {
  if (b.value >= 0.5) return 1.0 / tanh_from_log_cosh(b.value);
  const double e = b.excess;
  if (!(e > 0.0)) return 0.0;  // degenerate: the curve has collapsed numerically
  return (1.0 + e) / std::sqrt(e * (e + 2));
}

// log cosh(l_delta / 4). With c_i = cosh(l_i/2), s_i = sinh(l_i/2) the
// argument simplifies to (c1 + c2) cosh(t_w/2) / s_w.
CoshLog dual_log(const FNCoords& c, int which) {
  check_s12(c);
  if (which != 1 && which != 2) throw std::invalid_argument("dual index must be 1 or 2");
  const int w = which - 1, o = 1 - w;
  const double hw = c.lengths[w] / 2, ho = c.lengths[o] / 2;
  const double tw = c.twists[w] / 2;
  CoshLog out;
  out.value = log_add(log_cosh(hw), log_cosh(ho)) - log_sinh(hw) + log_cosh(tw);
  out.excess = out.value < 0.5 ? std::expm1(out.value) : std::numeric_limits<double>::infinity();
  // s/(c1+c2) via exp of log differences, safe for long curves.
  const double log_sum = log_add(log_cosh(hw), log_cosh(ho));
  const double sw_ratio = std::exp(log_sinh(hw) - log_sum);
  const double so_ratio = std::exp(log_sinh(ho) - log_sum);
  const double d_lw = 0.5 * (sw_ratio - 1.0 / std::tanh(hw));
  const double d_lo = 0.5 * so_ratio;
  const double d_tw = 0.5 * std::tanh(tw);
  double* lgrad[2] = {&out.grad.l1, &out.grad.l2};
  double* tgrad[2] = {&out.grad.t1, &out.grad.t2};
  *lgrad[w] = d_lw;
  *lgrad[o] = d_lo;
  *tgrad[w] = d_tw;
  *tgrad[o] = 0.0;
  return out;
}

Grad4 scale(const Grad4& g, double k) { return {g.l1 * k, g.l2 * k, g.t1 * k, g.t2 * k}; }

std::vector<double> to_vector(const Grad4& g) { return {g.l1, g.l2, g.t1, g.t2}; }

using LMat = Mat2<long double>;

LMat translate(long double t) { return axis_translation<long double>(t); }
LMat rotate(long double a) { return rotation_about_i<long double>(a); }

// The (l1, l2, cusp) pants group together with the a1-a2 perpendicular length
// read off the embedding. b2 = [[a, r], [-r, d]] has fixed points x, 1/x on
// the positive axis, so the perpendicular to the imaginary axis runs along
// the unit circle and cosh d12 = (x + 1/x) / (1/x - x) = (d - a) / (2 sinh(l2/2)).
struct CuspedPants {
  LMat a1;
  LMat a2;
  long double d12;
};

CuspedPants cusped_pants(double l1, double l2) {
  const PantsEmbedding e = embed_pants(PantsLengths(l1, l2, 0.0));
  const long double ch = (e.b2.d - e.b2.a) / (2 * std::sinh(static_cast<long double>(l2) / 2));
  const long double d12 = std::log(ch + std::sqrt((ch - 1) * (ch + 1)));
  return {e.b1, e.b2, d12};
}

double fd_step(double v) { return 1e-6 * std::max(1.0, std::fabs(v)); }

SurfaceModel make_s12() {
  SurfaceModel m;
  m.name = "s12";
  m.pants_curves = {"a1", "a2"};
  m.registry = {"a1", "a2", "beta", "d1", "d2"};
  //            a1 a2 beta d1 d2
  m.intersection = {{0, 0, 1, 2, 0},
                    {0, 0, 1, 0, 2},
                    {1, 1, 0, 0, 0},
                    {2, 0, 0, 0, 4},
                    {0, 2, 0, 4, 0}};
  m.pants_adjacency = {{{"a2", kCusp}, {"a2", kCusp}}, {{"a1", kCusp}, {"a1", kCusp}}};
  m.dual_of = {{"d1", 2}, {"d2", 2}};
  return m;
}

SurfaceModel make_s11() {
  SurfaceModel m;
  m.name = "s11";
  m.pants_curves = {"a"};
  m.registry = {"a", "b"};
  m.intersection = {{0, 1}, {1, 0}};
  m.pants_adjacency = {{{kCusp}}};
  m.dual_of = {{"b", 1}};
  return m;
}

}  // namespace

FNCoords::FNCoords(std::vector<double> l, std::vector<double> t)
    : lengths(std::move(l)), twists(std::move(t)) {
  validate();
}

void FNCoords::validate() const {
  if (lengths.size() != twists.size()) {
    throw std::invalid_argument("FNCoords: one twist per length required");
  }
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("FNCoords: lengths must be finite and > 0");
  }
  for (double t : twists) {
    if (!std::isfinite(t)) throw std::invalid_argument("FNCoords: twists must be finite");
  }
}

FNCoords s12_coords(double l1, double l2, double t1, double t2) { return FNCoords({l1, l2}, {t1, t2}); }

// ---------------------------------------------------------------------------

void WeightedMulticurve::validate(const SurfaceModel& surface) const {
  if (weights.empty()) throw std::invalid_argument("multicurve: empty support");
  for (const auto& [curve, w] : weights) {
    if (!surface.has_curve(curve)) throw UnknownCurveError("unknown curve '" + curve + "' on " + surface.name);
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("multicurve: weights must be > 0");
  }
  for (auto i = weights.begin(); i != weights.end(); ++i) {
    for (auto j = std::next(i); j != weights.end(); ++j) {
      if (surface.intersection_of(i->first, j->first) != 0) {
        throw std::invalid_argument("multicurve: curves " + i->first + " and " + j->first + " intersect");
      }
    }
  }
}

WeightedMulticurve parse_multicurve(std::string_view text) {
  WeightedMulticurve m;
  std::stringstream ss{std::string(text)};
  std::string item;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const std::string name = trim(item.substr(0, eq));
    double w = 1.0;
    if (eq != std::string::npos) {
      const std::string value = trim(item.substr(eq + 1));
      std::size_t used = 0;
      try {
        w = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) throw std::invalid_argument("bad weight in '" + item + "'");
    }
    if (name.empty()) throw std::invalid_argument("missing curve name in '" + item + "'");
    if (m.weights.count(name)) throw std::invalid_argument("curve '" + name + "' listed twice");
    m.weights[name] = w;
  }
  if (m.weights.empty()) throw std::invalid_argument("empty multicurve");
  return m;
}

std::string format_multicurve(const WeightedMulticurve& m) {
  std::string out;
  for (const auto& [curve, w] : m.weights) {
    if (!out.empty()) out += ",";
    out += fmt::format("{}={}", curve, w);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t SurfaceModel::index_of(const CurveId& c) const {
  const auto it = std::find(registry.begin(), registry.end(), c);
  if (it == registry.end()) throw UnknownCurveError("unknown curve '" + c + "' on " + name);
  return static_cast<std::size_t>(it - registry.begin());
}

bool SurfaceModel::has_curve(const CurveId& c) const {
  return std::find(registry.begin(), registry.end(), c) != registry.end();
}

int SurfaceModel::pants_index(const CurveId& c) const {
  const auto it = std::find(pants_curves.begin(), pants_curves.end(), c);
  return it == pants_curves.end() ? -1 : static_cast<int>(it - pants_curves.begin());
}

int SurfaceModel::intersection_of(const CurveId& a, const CurveId& b) const {
  return intersection[index_of(a)][index_of(b)];
}

double SurfaceModel::length(const CurveId& c, const FNCoords& x) const {
  index_of(c);
  if (x.size() != pants_curves.size()) throw std::invalid_argument("coordinate count does not match " + name);
  const int p = pants_index(c);
  if (p >= 0) return x.lengths[static_cast<std::size_t>(p)];
  if (name == "s12") {
    if (c == "beta") return length_beta_s12(x);
    if (c == "d1") return length_dual_s12(x, 1);
    if (c == "d2") return length_dual_s12(x, 2);
  }
  return oracle_length(c, x);
}

std::vector<double> SurfaceModel::length_gradient(const CurveId& c, const FNCoords& x) const {
  index_of(c);
  const std::size_t n = pants_curves.size();
  if (x.size() != n) throw std::invalid_argument("coordinate count does not match " + name);
  const int p = pants_index(c);
  if (p >= 0) {
    std::vector<double> g(2 * n, 0.0);
    g[static_cast<std::size_t>(p)] = 1.0;
    return g;
  }
  if (name == "s12") {
    if (c == "beta") return to_vector(grad_length_beta_s12(x));
    if (c == "d1") return to_vector(grad_length_dual_s12(x, 1));
    if (c == "d2") return to_vector(grad_length_dual_s12(x, 2));
  }
  // No closed form: central differences of the oracle.
  std::vector<double> g(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    FNCoords up = x, down = x;
    double& vu = k < n ? up.lengths[k] : up.twists[k - n];
    double& vd = k < n ? down.lengths[k] : down.twists[k - n];
    const double base = vu;
    const double h = k < n ? std::min(fd_step(base), 0.5 * base) : fd_step(base);
    vu = base + h;
    vd = base - h;
    g[k] = (oracle_length(c, up) - oracle_length(c, down)) / (2 * h);
  }
  return g;
}

double SurfaceModel::oracle_length(const CurveId& c, const FNCoords& x) const {
  index_of(c);
  x.validate();
  if (name == "s12") return lom::oracle_length(build_rep_s12(x), c);
  if (name == "s11") return lom::oracle_length(build_rep_s11(x.lengths.at(0), x.twists.at(0)), c);
  throw std::logic_error("no representation for surface " + name);
}

const SurfaceModel& surface_s12() {
  static const SurfaceModel model = make_s12();
  return model;
}

const SurfaceModel& surface_s11() {
  static const SurfaceModel model = make_s11();
  return model;
}

const SurfaceModel& surface_by_name(std::string_view name) {
  if (name == "s12") return surface_s12();
  if (name == "s11") return surface_s11();
  throw std::invalid_argument("unknown surface '" + std::string(name) + "' (expected s12 or s11)");
}

double intersection_number(const SurfaceModel& surface, const CurveId& gamma, const WeightedMulticurve& m) {
  const std::size_t g = surface.index_of(gamma);
  double total = 0.0;
  for (const auto& [curve, w] : m.weights) total += w * surface.intersection[g][surface.index_of(curve)];
  return total;
}

// ---------------------------------------------------------------------------

double length_beta_s12(const FNCoords& c) { return 2.0 * acosh_of(beta_log(c)); }

Grad4 grad_length_beta_s12(const FNCoords& c) {
  const CoshLog b = beta_log(c);
  return scale(b.grad, 2.0 * inv_tanh_of(b));
}

double length_dual_s12(const FNCoords& c, int which) {
  const CoshLog d = dual_log(c, which);
  if (!(d.value >= 0.0)) {
    throw FormulaDomainError(fmt::format("dual length: cosh argument exp({}) < 1", d.value));
  }
  return 4.0 * acosh_of(d);
}

Grad4 grad_length_dual_s12(const FNCoords& c, int which) {
  const CoshLog d = dual_log(c, which);
  if (!(d.value >= 0.0)) throw FormulaDomainError("dual length gradient: cosh argument < 1");
  return scale(d.grad, 4.0 * inv_tanh_of(d));
}

// ---------------------------------------------------------------------------

Mat2<long double> RepMatrices::evaluate(std::string_view word) const {
  LMat m = LMat::identity();
  for (char ch : word) {
    const char key = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    const auto it = generators.find(key);
    if (it == generators.end()) throw std::invalid_argument(fmt::format("unknown generator '{}'", ch));
    m = m * (ch == key ? it->second : it->second.inverse());
  }
  return m;
}

Mat2<long double> RepMatrices::word_of(const CurveId& c) const {
  const auto it = words.find(c);
  if (it == words.end()) throw UnknownCurveError("no word for curve '" + c + "'");
  return evaluate(it->second);
}

RepMatrices build_rep_s12(const FNCoords& c) {
  check_s12(c);
  const CuspedPants p = cusped_pants(c.lengths[0], c.lengths[1]);
  const long double t1 = c.twists[0], t2 = c.twists[1];
  const long double pi = std::numbers::pi_v<long double>;
  // Frame at the a2 foot of the a1-a2 perpendicular in the first pants, and the
  // matching frame of the mirrored second pants after twisting along a1.
  const LMat frame = rotate(-pi / 2) * translate(p.d12);
  const LMat frame_mirror = translate(t1) * rotate(pi / 2) * translate(p.d12) * rotate(pi);
  const LMat glue = frame * frame_mirror.inverse();
  const LMat phi = frame * rotate(pi / 2);
  const LMat g = phi * translate(-t2) * phi.inverse() * glue;

  RepMatrices rep;
  rep.generators = {{'A', p.a1}, {'B', p.a2}, {'C', g}};
  rep.words = {{"a1", "A"}, {"a2", "B"}, {"beta", "C"}, {"d1", "BcbC"}, {"d2", "ACac"}};
  rep.puncture_words = {"AB", "AcBC"};
  return rep;
}

RepMatrices build_rep_s11(double l, double t) {
  if (!(l > 0.0) || !std::isfinite(l) || !std::isfinite(t)) {
    throw std::invalid_argument("build_rep_s11: need finite l > 0 and finite t");
  }
  const CuspedPants p = cusped_pants(l, l);
  const long double pi = std::numbers::pi_v<long double>;
  // B carries the a2 boundary onto a1 reversed, so A and B generate the torus.
  const LMat source = rotate(-pi / 2) * translate(p.d12) * rotate(pi);
  const LMat target = rotate(pi / 2);
  const LMat b = translate(static_cast<long double>(t)) * target * source.inverse();

  RepMatrices rep;
  rep.generators = {{'A', p.a1}, {'B', b}};
  rep.words = {{"a", "A"}, {"b", "B"}};
  rep.puncture_words = {"ABab"};
  return rep;
}

double oracle_length(const RepMatrices& rep, const CurveId& c) {
  const long double half = std::fabs(rep.word_of(c).trace()) / 2;
  if (!(half > 1.0L)) {
    throw NonHyperbolicError(fmt::format("word for '{}' has |trace| <= 2", c));
  }
  if (half > 1e8L) return length_from_trace(static_cast<double>(2 * half));
  return static_cast<double>(2 * std::log(half + std::sqrt((half - 1) * (half + 1))));
}

}  // namespace lom
