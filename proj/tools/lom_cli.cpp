#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "lom/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lines of minima on small hyperbolic surfaces"};
  app.require_subcommand(1);
  app.fallthrough();

  lom::RunConfig flags;
  std::string config_path;
  std::map<std::string, CLI::Option*> opts;
  app.add_option("--config", config_path, "flat key = value config file");
  opts["--surface"] = app.add_option("--surface", flags.surface, "s12 or s11");
  opts["--mu"] = app.add_option("--mu", flags.mu, "weights on pants curves, e.g. a1=1,a2=2");
  opts["--nu"] = app.add_option("--nu", flags.nu, "weights of the second multicurve, e.g. beta=1");
  opts["--s-start"] = app.add_option("--s-start", flags.s_start, "largest s of the grid");
  opts["--s-stop"] = app.add_option("--s-stop", flags.s_stop, "smallest s of the grid");
  opts["--per-decade"] = app.add_option("--per-decade", flags.per_decade, "grid points per decade");
  opts["--seed"] = app.add_option("--seed", flags.seed, "rng seed");
  opts["--out"] = app.add_option("--out", flags.out, "output directory");

  auto* trace = app.add_subcommand("trace", "trace a line of minima; writes trajectory.csv and summary.json");

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  opts["--tol-scale"] = verify->add_option("--tol-scale", flags.tol_scale, "multiplies every tolerance");
  bool verify_json_only = false;
  verify->add_flag("--json", verify_json_only, "print the JSON report instead of one line per criterion");

  auto* limit = app.add_subcommand("limit", "rerun the analysis on an existing trajectory CSV");
  std::string csv_path;
  limit->add_option("--in", csv_path, "trajectory CSV")->required();

  auto* pants = app.add_subcommand("pants", "perpendicular table of a pair of pants (0 is a cusp)");
  std::vector<double> pants_lengths;
  pants->add_option("lengths", pants_lengths, "l1 l2 l3")->expected(3)->required();

  auto* oracle = app.add_subcommand("oracle-check", "closed-form lengths against matrix traces");
  opts["--n"] = oracle->add_option("--n", flags.samples, "number of samples");

  auto* simplex = app.add_subcommand("simplex-demo", "mu = a1 + eps a2 for eps in {1, 0.1, 0.01, 0}");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    lom::RunConfig cfg;
    if (!config_path.empty()) cfg = lom::load_config_file(config_path, cfg);
    auto given = [&](const char* name) { return opts.at(name)->count() > 0; };
    if (given("--surface")) cfg.surface = flags.surface;
    if (given("--mu")) cfg.mu = flags.mu;
    if (given("--nu")) cfg.nu = flags.nu;
    if (given("--s-start")) cfg.s_start = flags.s_start;
    if (given("--s-stop")) cfg.s_stop = flags.s_stop;
    if (given("--per-decade")) cfg.per_decade = flags.per_decade;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--out")) cfg.out = flags.out;
    if (given("--tol-scale")) cfg.tol_scale = flags.tol_scale;
    if (given("--n")) cfg.samples = flags.samples;

    if (trace->parsed()) {
      const lom::MinimaProblem problem = lom::problem_from_config(cfg);
      const std::vector<double> grid = lom::grid_from_config(cfg);
      const lom::Trajectory traj = lom::trace_line(problem, grid, lom::default_start(*problem.surface));
      const fs::path out = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
      write_file(out / "trajectory.csv", lom::trajectory_csv(traj));
      const json summary = lom::trace_summary(cfg, traj);
      write_file(out / "summary.json", dump(summary));
      if (traj.partial) {
        std::cerr << fmt::format("trace: stopped at s={} after {} samples ({})\n",
                                 traj.divergence ? traj.divergence->s : 0.0, traj.points.size(),
                                 traj.divergence ? traj.divergence->note : std::string("not converged"));
        return 1;
      }
      const auto& limit_json = summary["analysis"]["limit"];
      if (limit_json.contains("verdict")) std::cout << "limit: " << limit_json["verdict"].get<std::string>() << "\n";
      std::cout << fmt::format("wrote {} samples to {}\n", traj.points.size(), (out / "trajectory.csv").string());
      return 0;
    }

    if (verify->parsed()) {
      const auto results = lom::run_acceptance(cfg.tol_scale, cfg.seed);
      const json report = lom::verify_json(results, cfg.tol_scale, cfg.seed);
      if (!cfg.out.empty()) write_file(fs::path(cfg.out) / "verify.json", dump(report));
      if (verify_json_only) {
        std::cout << dump(report);
      } else {
        for (const auto& r : results) std::cout << r.line() << "\n";
      }
      return report["all_pass"].get<bool>() ? 0 : 1;
    }

    if (limit->parsed()) {
      std::ifstream f(csv_path);
      if (!f) throw lom::UsageError("cannot read " + csv_path);
      std::stringstream ss;
      ss << f.rdbuf();
      const lom::MinimaProblem problem = lom::problem_from_config(cfg);
      const lom::Trajectory traj = lom::read_trajectory_csv(ss.str(), problem);
      json report = lom::analyse_trajectory(traj);
      report["schema_version"] = lom::kSchemaVersion;
      report["command"] = "limit";
      report["source"] = csv_path;
      if (!cfg.out.empty()) write_file(fs::path(cfg.out) / "limit.json", dump(report));
      std::cout << dump(report);
      return 0;
    }

    if (pants->parsed()) {
      if (pants_lengths.size() != 3) throw lom::UsageError("pants needs three lengths");
      try {
        std::cout << lom::pants_table(pants_lengths[0], pants_lengths[1], pants_lengths[2]);
      } catch (const std::invalid_argument& e) {
        throw lom::UsageError(e.what());
      }
      return 0;
    }

    if (oracle->parsed()) {
      const lom::OracleCheck r = lom::oracle_check(cfg.samples, cfg.seed);
      std::cout << fmt::format("oracle check: {} samples, seed {}\n", r.samples, cfg.seed);
      for (std::size_t i = 0; i < r.curves.size(); ++i) {
        std::cout << fmt::format("  {:<6} max rel error {:.3e}\n", r.curves[i], r.max_rel_error[i]);
      }
      std::cout << fmt::format("  worst  {:.3e}\n", r.worst);
      return r.worst < 1e-9 ? 0 : 1;
    }

    if (simplex->parsed()) {
      const json report = lom::simplex_demo(cfg);
      if (!cfg.out.empty()) write_file(fs::path(cfg.out) / "simplex_demo.json", dump(report));
      std::cout << dump(report);
      return 0;
    }
  } catch (const lom::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
