#include "lom/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "lom/pants.hpp"

namespace lom {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("config: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

std::string num17(double v) { return fmt::format("{:.17g}", v + 0.0); }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); }

// ---------------------------------------------------------------------------
// Checks

Check less(std::string name, double value, double bound, double k) {
  Check c{std::move(name), value, "<", 0.0, bound * k, false};
  c.pass = std::isfinite(value) && value < c.hi;
  return c;
}

Check within(std::string name, double value, double lo, double hi, double k) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo) * k;
  Check c{std::move(name), value, "in", mid - half, mid + half, false};
  c.pass = std::isfinite(value) && value >= c.lo && value <= c.hi;
  return c;
}

Check truth(std::string name, bool ok) {
  Check c{std::move(name), ok ? 1.0 : 0.0, "true", 0.0, 0.0, ok};
  return c;
}

json check_json(const Check& c) {
  json j = {{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"pass", c.pass}};
  if (c.relation == "<") j["threshold"] = c.hi;
  if (c.relation == "in") j["interval"] = {c.lo, c.hi};
  return j;
}

double sinh_ratio(const FNCoords& c) { return std::sinh(c.lengths[1] / 2) / std::sinh(c.lengths[0] / 2); }

Trajectory standard_trajectory(const std::string& mu) {
  const SurfaceModel& s = surface_s12();
  const MinimaProblem p(s, parse_multicurve(mu), parse_multicurve("beta"), true);
  return trace_line(p, geometric_grid(0.1, 1e-5, 5), default_start(s));
}

double gradient_error(const SurfaceModel& m, const CurveId& curve, const FNCoords& c) {
  const auto g = m.length_gradient(curve, c);
  double err = 0.0, size = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    FNCoords up = c, down = c;
    const double h = 1e-6;
    const std::size_t n = c.size();
    (k < n ? up.lengths[k] : up.twists[k - n]) += h;
    (k < n ? down.lengths[k] : down.twists[k - n]) -= h;
    const double fd = (m.length(curve, up) - m.length(curve, down)) / (2 * h);
    err = std::max(err, std::fabs(fd - g[k]));
    size = std::max(size, std::fabs(g[k]));
  }
  return err / size;
}

// Criterion-2 style reading of a trajectory's end point.
struct DualReading {
  double s = 0.0;
  double ratio = 0.0;     // l_d1 / l_d2
  double log_diff = 0.0;  // (l_d1 - l_d2) / 4
  LimitReport limit;
};

DualReading read_duals(const Trajectory& traj) {
  DualReading r;
  const MinimumPoint& last = traj.points.back();
  const SurfaceModel& m = *traj.problem.surface;
  const double d1 = m.length("d1", last.coords), d2 = m.length("d2", last.coords);
  r.s = last.s;
  r.ratio = d1 / d2;
  r.log_diff = (d1 - d2) / 4;
  r.limit = projective_limit(traj, {"d1", "d2"});
  return r;
}

std::string fmt_value(double v) { return fmt::format("{:.6g}", v); }

}  // namespace

// ---------------------------------------------------------------------------
// Config

RunConfig parse_config_text(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      if (ch == '#' && !quoted) break;
      body += ch;
    }
    body = trim(body);
    if (body.empty()) continue;
    if (body.front() == '[') throw UsageError(fmt::format("config line {}: tables are not supported", lineno));
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("config line {}: expected key = value", lineno));
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    if (key == "surface") cfg.surface = value;
    else if (key == "mu") cfg.mu = value;
    else if (key == "nu") cfg.nu = value;
    else if (key == "out") cfg.out = value;
    else if (key == "s_start" || key == "s-start") cfg.s_start = parse_number(key, value);
    else if (key == "s_stop" || key == "s-stop") cfg.s_stop = parse_number(key, value);
    else if (key == "per_decade" || key == "per-decade") cfg.per_decade = static_cast<int>(parse_number(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_number(key, value));
    else if (key == "tol_scale" || key == "tol-scale") cfg.tol_scale = parse_number(key, value);
    else if (key == "samples" || key == "n") cfg.samples = static_cast<int>(parse_number(key, value));
    else throw UsageError(fmt::format("config line {}: unknown key '{}'", lineno, key));
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

MinimaProblem problem_from_config(const RunConfig& cfg) {
  try {
    return MinimaProblem(surface_by_name(cfg.surface), parse_multicurve(cfg.mu), parse_multicurve(cfg.nu), false);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> grid_from_config(const RunConfig& cfg) {
  try {
    return geometric_grid(cfg.s_start, cfg.s_stop, cfg.per_decade);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

std::vector<CurveId> default_probes(const SurfaceModel& surface) {
  std::vector<CurveId> out;
  for (const auto& c : surface.registry) {
    if (surface.pants_index(c) < 0) out.push_back(c);
  }
  return out;
}

std::vector<std::string> csv_columns(const SurfaceModel& surface) {
  std::vector<std::string> cols = {"s"};
  for (const auto& c : surface.pants_curves) cols.push_back("l_" + c);
  for (const auto& c : surface.pants_curves) cols.push_back("t_" + c);
  cols.push_back("F_s");
  cols.push_back("grad_norm");
  for (const auto& c : default_probes(surface)) cols.push_back("l_" + c);
  cols.push_back("eq1_max");
  cols.push_back("eq2_max");
  return cols;
}

std::string trajectory_csv(const Trajectory& traj) {
  const SurfaceModel& m = *traj.problem.surface;
  std::string out;
  const auto cols = csv_columns(m);
  for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
  out += "\n";
  for (const auto& p : traj.points) {
    std::vector<double> row = {p.s};
    for (double l : p.coords.lengths) row.push_back(l);
    for (double t : p.coords.twists) row.push_back(t);
    row.push_back(p.value);
    row.push_back(p.grad_norm);
    for (const auto& c : default_probes(m)) row.push_back(m.length(c, p.coords));
    row.push_back(max_abs(p.eq1_residuals));
    row.push_back(max_abs(p.eq2_residuals));
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + num17(row[k]);
    out += "\n";
  }
  return out;
}

Trajectory read_trajectory_csv(const std::string& text, const MinimaProblem& problem) {
  const SurfaceModel& m = *problem.surface;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw UsageError("trajectory CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("trajectory CSV lacks column '" + name + "' for surface " + m.name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t s_col = column("s");
  std::vector<std::size_t> l_cols, t_cols;
  for (const auto& c : m.pants_curves) {
    l_cols.push_back(column("l_" + c));
    t_cols.push_back(column("t_" + c));
  }
  Trajectory traj;
  traj.problem = problem;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != header.size()) throw UsageError(fmt::format("trajectory CSV line {}: wrong cell count", lineno));
    MinimumPoint p;
    p.s = parse_number("s", cells[s_col]);
    for (std::size_t k = 0; k < l_cols.size(); ++k) {
      p.coords.lengths.push_back(parse_number("length", cells[l_cols[k]]));
      p.coords.twists.push_back(parse_number("twist", cells[t_cols[k]]));
    }
    try {
      p.coords.validate();
      p.value = eval_Fs(problem, p.s, p.coords);
      p.grad_norm = std::sqrt([&] {
        double acc = 0.0;
        for (double g : grad_Fs(problem, p.s, p.coords)) acc += g * g;
        return acc;
      }());
    } catch (const std::exception& e) {
      throw UsageError(fmt::format("trajectory CSV line {}: {}", lineno, e.what()));
    }
    const Residuals r = criticality_residuals(problem, p.coords);
    p.eq1_residuals = r.eq1;
    p.eq2_residuals = r.eq2;
    p.converged = true;
    traj.grid.push_back(p.s);
    traj.points.push_back(std::move(p));
  }
  if (traj.points.empty()) throw UsageError("trajectory CSV has no rows");
  return traj;
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const LimitReport& r) {
  return {{"s", r.s},
          {"probes", r.probes},
          {"probe_lengths", r.probe_lengths},
          {"length_ratios", r.length_ratios},
          {"pants_curves", r.pants_curves},
          {"inferred_weights", r.inferred_weights},
          {"residual", r.residual},
          {"barycentre", r.barycentre},
          {"verdict", r.verdict}};
}

json to_json(const OrderFit& f) {
  return {{"quantity", f.quantity}, {"slope", f.slope},         {"intercept", f.intercept}, {"r2", f.r2},
          {"window", {f.window_lo, f.window_hi}}, {"samples", f.samples}};
}

json to_json(const ResidualSeries& r) {
  return {{"curve", r.curve},         {"s", r.s},
          {"residual", r.residual},   {"window", {r.window_lo, r.window_hi}},
          {"sup_abs", r.sup_abs},     {"variation", r.variation},
          {"trend", r.trend}};
}

json to_json(const MinimumPoint& p) {
  return {{"s", p.s},
          {"lengths", p.coords.lengths},
          {"twists", p.coords.twists},
          {"value", p.value},
          {"grad_norm", p.grad_norm},
          {"iterations", p.iterations},
          {"converged", p.converged},
          {"diverged", p.diverged},
          {"note", p.note}};
}

json analyse_trajectory(const Trajectory& traj) {
  const SurfaceModel& m = *traj.problem.surface;
  json out;
  if (traj.points.empty()) {
    out["error"] = "no converged samples";
    return out;
  }
  auto guarded = [](auto&& fn) -> json {
    try {
      return fn();
    } catch (const std::exception& e) {
      return json{{"error", e.what()}};
    }
  };
  out["limit"] = guarded([&] { return to_json(projective_limit(traj, default_probes(m))); });
  std::vector<CurveId> duals;
  for (const auto& d : m.dual_of) duals.push_back(d.curve);
  out["limit_duals"] = guarded([&] { return to_json(projective_limit(traj, duals)); });

  json fits = json::array();
  std::vector<std::string> quantities;
  for (const auto& c : m.pants_curves) quantities.push_back("l_" + c);
  if (m.pants_curves.size() == 2) quantities.push_back("l_" + m.pants_curves[0] + "/l_" + m.pants_curves[1]);
  for (const auto& q : quantities) fits.push_back(guarded([&] { return to_json(growth_order_fit(traj, q)); }));
  out["fits"] = fits;

  json residuals = json::array();
  for (const auto& c : default_probes(m)) residuals.push_back(guarded([&] { return to_json(residual_analysis(traj, c)); }));
  out["residuals"] = residuals;

  double tmax = 0.0, e1 = 0.0, e2 = 0.0;
  for (const auto& p : traj.points) {
    tmax = std::max(tmax, max_abs(p.coords.twists));
    e1 = std::max(e1, max_abs(p.eq1_residuals));
    e2 = std::max(e2, max_abs(p.eq2_residuals));
  }
  out["max_abs_twist"] = tmax;
  out["max_eq1"] = e1;
  out["max_eq2"] = e2;
  return out;
}

json trace_summary(const RunConfig& cfg, const Trajectory& traj) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "trace";
  j["config"] = {{"surface", cfg.surface}, {"mu", cfg.mu},         {"nu", cfg.nu},
                 {"s_start", cfg.s_start}, {"s_stop", cfg.s_stop}, {"per_decade", cfg.per_decade},
                 {"seed", cfg.seed}};
  j["samples"] = traj.points.size();
  j["grid_size"] = traj.grid.size();
  j["partial"] = traj.partial;
  j["all_converged"] = std::all_of(traj.points.begin(), traj.points.end(), [](const auto& p) { return p.converged; });
  j["divergence"] = traj.divergence ? to_json(*traj.divergence) : json(nullptr);
  j["analysis"] = analyse_trajectory(traj);
  return j;
}

// ---------------------------------------------------------------------------
// Pants table and oracle check

std::string pants_table(double l1, double l2, double l3) {
  const PantsLengths p(l1, l2, l3);
  std::optional<PantsEmbedding> emb;
  try {
    emb = embed_pants(p);
  } catch (const std::exception&) {
  }
  std::string out = fmt::format("pants lengths l1={} l2={} l3={}\n", l1, l2, l3);
  out += fmt::format("{:<6}{:>22}{:>22}{:>22}{:>22}\n", "perp", "formula", "estimate", "residual", "embedding");
  auto cell = [](auto&& fn) -> std::string {
    try {
      return num17(fn());
    } catch (const CuspFootError&) {
      return "cusp";
    } catch (const std::exception&) {
      return "n/a";
    }
  };
  for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
    double value = 0.0;
    const std::string f = cell([&] { return value = perp_between(p, i, j); });
    const std::string est = cell([&] { return perp_estimate(p[i], p[j]); });
    const std::string res = f == "cusp" ? "cusp" : cell([&] { return value - perp_estimate(p[i], p[j]); });
    const std::string e = emb && f != "cusp" ? cell([&] { return embedded_perp_between(*emb, i, j); }) : (f == "cusp" ? "cusp" : "n/a");
    out += fmt::format("{:<6}{:>22}{:>22}{:>22}{:>22}\n", fmt::format("d{}{}", i, j), f, est, res, e);
  }
  for (int i = 1; i <= 3; ++i) {
    int j = i % 3 + 1;
    if (p[j] == 0.0) j = 6 - i - j;
    double value = 0.0;
    const std::string f = cell([&] { return value = perp_self(p, i, j); });
    const std::string est = cell([&] { return perp_estimate(p[i], p[i]); });
    const std::string res = f == "cusp" ? "cusp" : cell([&] { return value - perp_estimate(p[i], p[i]); });
    const int next = i % 3 + 1;
    const bool embeddable = emb && f != "cusp" && p[next] > 0.0;
    const std::string e = embeddable ? cell([&] { return embedded_perp_self(*emb, i); }) : (f == "cusp" ? "cusp" : "n/a");
    out += fmt::format("{:<6}{:>22}{:>22}{:>22}{:>22}\n", fmt::format("d{}{}", i, i), f, est, res, e);
  }
  return out;
}

OracleCheck oracle_check(int n, std::uint64_t seed) {
  if (n < 1) throw UsageError("oracle-check needs at least one sample");
  const SurfaceModel& m = surface_s12();
  OracleCheck r;
  r.samples = n;
  r.curves = {"beta", "d1", "d2"};
  r.max_rel_error.assign(r.curves.size(), 0.0);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n; ++k) {
    const double l1 = uniform(rng, 0.1, 3), l2 = uniform(rng, 0.1, 3);
    const double t1 = uniform(rng, -2, 2), t2 = uniform(rng, -2, 2);
    const FNCoords c = s12_coords(l1, l2, t1, t2);
    const RepMatrices rep = build_rep_s12(c);
    for (std::size_t i = 0; i < r.curves.size(); ++i) {
      const double closed = m.length(r.curves[i], c);
      const double err = std::fabs(oracle_length(rep, r.curves[i]) - closed) / closed;
      r.max_rel_error[i] = std::max(r.max_rel_error[i], err);
    }
  }
  r.worst = *std::max_element(r.max_rel_error.begin(), r.max_rel_error.end());
  return r;
}

// ---------------------------------------------------------------------------
// Simplex demo

json simplex_demo(const RunConfig& cfg) {
  if (cfg.surface != "s12") throw UsageError("simplex-demo runs on s12 only");
  const std::vector<double> grid = grid_from_config(cfg);
  const std::vector<double> epsilons = {1.0, 0.1, 0.01, 0.0};

  auto run = [&grid](double eps) {
    const SurfaceModel& s = surface_s12();
    const std::string mu = eps > 0.0 ? fmt::format("a1=1,a2={}", eps) : "a1=1";
    const MinimaProblem p(s, parse_multicurve(mu), parse_multicurve("beta"));
    const Trajectory traj = trace_line(p, grid, default_start(s));
    json j;
    j["epsilon"] = eps;
    j["mu"] = mu;
    j["samples"] = traj.points.size();
    j["partial"] = traj.partial;
    j["divergence"] = traj.divergence ? to_json(*traj.divergence) : json(nullptr);
    if (!traj.points.empty()) {
      const DualReading d = read_duals(traj);
      j["s_final"] = d.s;
      j["d1_over_d2"] = d.ratio;
      j["limit"] = to_json(d.limit);
      j["limit_all_probes"] = to_json(projective_limit(traj, default_probes(s)));
      const bool ratio_ok = d.ratio >= 0.95 && d.ratio <= 1.05;
      j["matches_barycentre"] = ratio_ok && d.limit.barycentre;
    } else {
      j["limit"] = nullptr;
      j["matches_barycentre"] = false;
    }
    return j;
  };

  std::vector<std::future<json>> jobs;
  for (double eps : epsilons) jobs.push_back(std::async(std::launch::async, run, eps));
  json runs = json::array();
  for (auto& f : jobs) runs.push_back(f.get());

  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = "simplex-demo";
  out["nu"] = "beta=1";
  out["grid"] = {{"s_start", cfg.s_start}, {"s_stop", cfg.s_stop}, {"per_decade", cfg.per_decade}};
  out["runs"] = runs;

  json positive = json::array();
  bool all_match = true;
  for (const auto& r : runs) {
    if (r["epsilon"].get<double>() > 0.0) {
      positive.push_back({{"epsilon", r["epsilon"]},
                          {"verdict", r["limit"].is_null() ? json("none") : r["limit"]["verdict"]},
                          {"matches_barycentre", r["matches_barycentre"]}});
      all_match = all_match && r["matches_barycentre"].get<bool>();
    }
  }
  const json& zero = runs.back();
  std::string zero_text;
  bool zero_differs = false;
  if (!zero["divergence"].is_null()) {
    zero_text = fmt::format("divergence at s={}: {}", zero["divergence"]["s"].get<double>(),
                            zero["divergence"]["note"].get<std::string>());
    zero_differs = true;
  } else {
    zero_text = zero["limit"]["verdict"].get<std::string>();
    zero_differs = !zero["matches_barycentre"].get<bool>();
  }
  out["discontinuity"] = {{"positive_epsilon", positive},
                          {"positive_epsilon_all_barycentre", all_match},
                          {"epsilon_zero", zero_text},
                          {"epsilon_zero_differs", zero_differs}};
  return out;
}

// ---------------------------------------------------------------------------
// Acceptance

bool CriterionResult::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string CriterionResult::line() const {
  std::string body;
  for (const auto& c : checks) {
    if (!body.empty()) body += "; ";
    if (c.relation == "<") body += fmt::format("{}={} < {}", c.name, fmt_value(c.value), fmt_value(c.hi));
    else if (c.relation == "in") body += fmt::format("{}={} in [{}, {}]", c.name, fmt_value(c.value), fmt_value(c.lo), fmt_value(c.hi));
    else body += fmt::format("{}={}", c.name, c.pass ? "yes" : "no");
    if (!c.pass) body += " (x)";
  }
  return fmt::format("criterion {:>2} {:<26} {}  {}", id, "[" + title + "]", pass() ? "PASS" : "FAIL", body);
}

std::vector<CriterionResult> run_acceptance(double k, std::uint64_t seed) {
  std::vector<CriterionResult> out;
  const SurfaceModel& m = surface_s12();
  const Trajectory main = standard_trajectory("a1=1,a2=2");
  const Trajectory sym = standard_trajectory("a1=1,a2=1");
  const bool main_complete = !main.partial && main.points.size() == main.grid.size();

  {  // 1
    CriterionResult c{1, "criticality", {}, {}};
    double tmax = 0, ratio = 0, e1 = 0, e2 = 0;
    for (const auto& p : main.points) {
      tmax = std::max(tmax, max_abs(p.coords.twists));
      ratio = std::max(ratio, std::fabs(sinh_ratio(p.coords) - 0.5));
      e1 = std::max(e1, max_abs(p.eq1_residuals));
      e2 = std::max(e2, max_abs(p.eq2_residuals));
    }
    c.checks = {truth("all_samples_converged", main_complete),
                less("max_abs_twist", tmax, 1e-8, k),
                less("max_sinh_ratio_error", ratio, 1e-6, k),
                less("max_eq1", e1, 1e-8, k),
                less("max_eq2", e2, 1e-8, k)};
    c.detail = {{"samples", main.points.size()}};
    out.push_back(c);
  }
  {  // 2
    CriterionResult c{2, "barycentre limit", {}, {}};
    if (main.points.empty()) {
      c.checks = {truth("trajectory_available", false)};
    } else {
      const DualReading d = read_duals(main);
      c.checks = {truth("evaluated_at_1e-5", std::fabs(d.s - 1e-5) < 1e-15),
                  within("d1_over_d2", d.ratio, 0.95, 1.05, k),
                  within("a1_weight", d.limit.inferred_weights[0], 0.9, 1.1, k),
                  within("a2_weight", d.limit.inferred_weights[1], 0.9, 1.1, k),
                  less("abs_quarter_diff_minus_log_half", std::fabs(d.log_diff - std::log(0.5)), 0.05, k)};
      c.detail = {{"limit", to_json(d.limit)}, {"quarter_diff", d.log_diff}};
    }
    out.push_back(c);
  }
  {  // 3
    CriterionResult c{3, "growth order", {}, {}};
    for (const auto& [tag, traj] : {std::pair<std::string, const Trajectory*>{"mu12", &main}, {"mu11", &sym}}) {
      try {
        const OrderFit f = growth_order_fit(*traj, "l_a1");
        const FNCoords& last = traj->points.back().coords;
        const double log_ratio = std::log(1 / last.lengths[0]) / std::log(1 / last.lengths[1]);
        c.checks.push_back(within(tag + "_slope_l_a1", f.slope, 0.95, 1.05, k));
        c.checks.push_back(less(tag + "_one_minus_r2", 1.0 - f.r2, 1e-3, k));
        c.checks.push_back(within(tag + "_log_ratio", log_ratio, 0.98, 1.02, k));
        c.detail[tag] = {{"fit", to_json(f)}, {"log_ratio", log_ratio}};
      } catch (const std::exception& e) {
        c.checks.push_back(truth(tag + "_fit", false));
        c.detail[tag] = e.what();
      }
    }
    out.push_back(c);
  }
  {  // 4
    CriterionResult c{4, "collar residual", {}, {}};
    const ResidualSeries r = residual_analysis(main, "beta", 1e-5, 1e-2);
    const auto in_window = std::count_if(r.s.begin(), r.s.end(), [](double s) { return s >= 1e-5 * (1 - 1e-9) && s <= 1e-2 * (1 + 1e-9); });
    c.checks = {truth("window_has_samples", in_window >= 2),
                less("residual_variation", r.variation, 1.0, k),
                less("residual_over_log_inv_s", r.trend, 0.05, k)};
    const ResidualSeries rs = residual_analysis(sym, "beta", 1e-5, 1e-2);
    c.detail = {{"mu12", {{"variation", r.variation}, {"trend", r.trend}, {"last", r.residual.empty() ? 0.0 : r.residual.back()}}},
                {"mu11", {{"variation", rs.variation}, {"trend", rs.trend}}},
                {"limit_constant_2log16", 2 * std::log(16.0)}};
    out.push_back(c);
  }
  {  // 5
    CriterionResult c{5, "pants perpendiculars", {}, {}};
    const double eps = 1e-4;
    const double excess = perp_between(PantsLengths(eps, eps, eps), 1, 2) - 2 * std::log(1 / eps);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const PantsLengths p(uniform(rng, 0.1, 3), uniform(rng, 0.1, 3), uniform(rng, 0.1, 3));
      const PantsEmbedding e = embed_pants(p);
      for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
        const double f = perp_between(p, i, j);
        worst = std::max(worst, std::fabs(embedded_perp_between(e, i, j) - f) / f);
      }
      for (int i = 1; i <= 3; ++i) {
        const double f = perp_self(p, i, i % 3 + 1);
        worst = std::max(worst, std::fabs(embedded_perp_self(e, i) - f) / f);
      }
    }
    c.checks = {less("abs_d12_excess_minus_log16", std::fabs(excess - std::log(16.0)), 1e-3, k),
                less("embedding_max_rel_error", worst, 1e-9, k)};
    out.push_back(c);
  }
  {  // 6
    CriterionResult c{6, "broken arcs", {}, {}};
    std::map<std::pair<int, int>, double> mx;
    double min_deficit = 1e300;
    bool finite = true;
    for (int r : {1, 2, 4}) {
      for (int d : {1, 3}) {
        const auto samples = deficit_survey(1000, d, static_cast<std::size_t>(r), seed);
        double top = 0.0;
        for (const auto& s : samples) {
          top = std::max(top, s.deficit);
          min_deficit = std::min(min_deficit, s.deficit);
          finite = finite && std::isfinite(s.deficit);
        }
        mx[{d, r}] = top;
      }
    }
    bool non_increasing_in_d = true, non_decreasing_in_r = true;
    for (int r : {1, 2, 4}) non_increasing_in_d = non_increasing_in_d && mx[{3, r}] <= mx[{1, r}];
    for (int d : {1, 3}) {
      non_decreasing_in_r = non_decreasing_in_r && mx[{d, 1}] <= mx[{d, 2}] && mx[{d, 2}] <= mx[{d, 4}];
    }
    c.checks = {truth("all_deficits_nonnegative", min_deficit >= -1e-12), truth("max_deficits_finite", finite),
                truth("max_non_increasing_in_D", non_increasing_in_d),
                truth("max_non_decreasing_in_r", non_decreasing_in_r)};
    for (const auto& [key, v] : mx) c.detail[fmt::format("D{}_r{}", key.first, key.second)] = v;
    c.detail["min_deficit"] = min_deficit;
    out.push_back(c);
  }
  {  // 7
    CriterionResult c{7, "oracle cross-check", {}, {}};
    const OracleCheck oc = oracle_check(1000, seed);
    std::mt19937_64 rng(seed + 1);
    double grad_worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const FNCoords x = s12_coords(uniform(rng, 0.1, 3), uniform(rng, 0.1, 3), uniform(rng, -2, 2), uniform(rng, -2, 2));
      for (const CurveId curve : {"beta", "d1", "d2"}) grad_worst = std::max(grad_worst, gradient_error(m, curve, x));
    }
    c.checks = {less("length_max_rel_error", oc.worst, 1e-9, k), less("gradient_max_rel_error", grad_worst, 1e-6, k)};
    out.push_back(c);
  }
  {  // 8
    CriterionResult c{8, "dual estimates", {}, {}};
    const std::vector<double> eps = geometric_grid(1e-2, 1e-5, 5);
    double lo_b = 1e300, hi_b = -1e300, lo_a = 1e300, hi_a = -1e300;
    const SurfaceModel& s11 = surface_s11();
    for (double e : eps) {
      const FNCoords x = s12_coords(e, e, 0, 0);
      const double rb = std::fabs(m.length("d1", x) - dual_length_estimate(m, "a1", x));
      lo_b = std::min(lo_b, rb);
      hi_b = std::max(hi_b, rb);
      const double ra = std::fabs(s11.length("b", FNCoords({e}, {0.0})) - 2 * std::log(1 / e));
      lo_a = std::min(lo_a, ra);
      hi_a = std::max(hi_a, ra);
    }
    c.checks = {less("s12_d1_residual_variation", hi_b - lo_b, 0.5, k),
                less("s11_b_residual_variation", hi_a - lo_a, 0.5, k)};
    c.detail = {{"s12_d1_residual_range", {lo_b, hi_b}}, {"s11_b_residual_range", {lo_a, hi_a}}};
    out.push_back(c);
  }
  {  // 9
    CriterionResult c{9, "uniqueness", {}, {}};
    const MinimaProblem p(m, parse_multicurve("a1=1,a2=1"), parse_multicurve("beta"));
    std::mt19937_64 rng(seed);
    std::vector<FNCoords> sols;
    bool all_converged = true;
    for (int n = 0; n < 10; ++n) {
      const FNCoords init =
          s12_coords(uniform(rng, 0.3, 3), uniform(rng, 0.3, 3), uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5));
      const MinimumPoint pt = minimize_Fs(p, 0.3, init);
      all_converged = all_converged && pt.converged;
      sols.push_back(pt.coords);
    }
    double spread = 0.0;
    for (const auto& a : sols) {
      for (const auto& b : sols) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
          d2 += std::pow(a.lengths[i] - b.lengths[i], 2) + std::pow(a.twists[i] - b.twists[i], 2);
        }
        spread = std::max(spread, std::sqrt(d2));
      }
    }
    c.checks = {truth("all_converged", all_converged), less("max_pairwise_distance", spread, 1e-8, k)};
    c.detail = {{"minimum", {{"lengths", sols.front().lengths}, {"twists", sols.front().twists}}}};
    out.push_back(c);
  }
  {  // 10
    CriterionResult c{10, "simplex discontinuity", {}, {}};
    RunConfig cfg;
    const json demo = simplex_demo(cfg);
    for (const auto& r : demo["runs"]) {
      const double eps = r["epsilon"].get<double>();
      if (eps == 0.0) continue;
      const std::string tag = fmt::format("eps{}", eps);
      if (r["limit"].is_null()) {
        c.checks.push_back(truth(tag + "_limit_available", false));
        continue;
      }
      c.checks.push_back(within(tag + "_d1_over_d2", r["d1_over_d2"].get<double>(), 0.95, 1.05, k));
      const auto w = r["limit"]["inferred_weights"].get<std::vector<double>>();
      c.checks.push_back(within(tag + "_a1_weight", w[0], 0.9, 1.1, k));
      c.checks.push_back(within(tag + "_a2_weight", w[1], 0.9, 1.1, k));
    }
    c.checks.push_back(truth("eps0_differs", demo["discontinuity"]["epsilon_zero_differs"].get<bool>()));
    c.checks.push_back(truth("juxtaposition_present", demo.contains("discontinuity") &&
                                                          demo["discontinuity"].contains("epsilon_zero")));
    c.detail = demo["discontinuity"];
    out.push_back(c);
  }
  return out;
}

json verify_json(const std::vector<CriterionResult>& results, double tol_scale, std::uint64_t seed) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "verify";
  j["tol_scale"] = tol_scale;
  j["seed"] = seed;
  json list = json::array();
  bool all = true;
  for (const auto& r : results) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}, {"detail", r.detail}});
    all = all && r.pass();
  }
  j["criteria"] = list;
  j["all_pass"] = all;
  return j;
}

}  // namespace lom
