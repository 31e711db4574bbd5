// Command-line front end: solve / envelope / check / saddle-mc / bounds.
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 invariant violation.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dys/analysis.hpp"
#include "dys/cli/config.hpp"
#include "dys/driver.hpp"
#include "dys/envelope.hpp"
#include "dys/errors.hpp"
#include "dys/model/registry.hpp"
#include "dys/saddle_lab.hpp"
#include "dys/splitting.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dys::BadConfig("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw dys::BadConfig("cannot write to '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json jvec(const dys::Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json jreal(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

struct Cli {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  bool q_at_z = false;
};

int cmd_solve(const Cli& cli, dys::RunConfig& cfg, const dys::RegistryEntry& entry) {
  dys::RunResult rr = dys::run(entry.triple, cfg.split, *cfg.z0, cfg.stop);
  std::ostringstream csv;
  dys::write_trajectory_csv(csv, rr.trajectory);
  if (cli.out_dir.empty()) {
    std::cout << csv.str();
    return 0;
  }
  fs::create_directories(cli.out_dir);
  atomic_write(fs::path(cli.out_dir) / "trajectory.csv", csv.str());
  ordered_json summary{{"problem", cfg.problem_name},
                       {"mode", dys::mode_name(dys::mode_of(entry.triple))},
                       {"gamma", cfg.split.gamma},
                       {"alpha", cfg.split.alpha},
                       {"seed", cfg.seed},
                       {"converged", rr.converged},
                       {"iterations", rr.trajectory.back().iter},
                       {"resid_final", rr.resid_final},
                       {"envelope_final", rr.trajectory.back().envelope},
                       {"z_final", jvec(rr.z_final)},
                       {"x_final", jvec(rr.x_final)}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_envelope(const Cli& cli, dys::RunConfig& cfg, const dys::RegistryEntry& entry) {
  const dys::ProblemTriple& P = entry.triple;
  if (P.dim > 2)
    throw dys::BadConfig("envelope grids are emitted only for 1-D and 2-D problems");
  const int points = 41;
  const double R = P.probe_radius;
  std::ostringstream csv;
  if (P.dim == 1) {
    csv << "z_0,envelope,grad_norm\n";
    for (int i = 0; i < points; ++i) {
      dys::Vec z(1);
      z[0] = -R + 2.0 * R * i / (points - 1);
      double val = dys::env_value(P, cfg.split, z);
      double gn = dys::norm(dys::env_gradient(P, cfg.split, z));
      csv << fmt17(z[0]) << ',' << fmt17(val) << ',' << fmt17(gn) << '\n';
    }
  } else {
    csv << "z_0,z_1,envelope,grad_norm\n";
    for (int i = 0; i < points; ++i)
      for (int j = 0; j < points; ++j) {
        dys::Vec z(2);
        z[0] = -R + 2.0 * R * i / (points - 1);
        z[1] = -R + 2.0 * R * j / (points - 1);
        double val = dys::env_value(P, cfg.split, z);
        double gn = dys::norm(dys::env_gradient(P, cfg.split, z));
        csv << fmt17(z[0]) << ',' << fmt17(z[1]) << ',' << fmt17(val) << ',' << fmt17(gn)
            << '\n';
      }
  }
  if (cli.out_dir.empty()) {
    std::cout << csv.str();
  } else {
    fs::create_directories(cli.out_dir);
    atomic_write(fs::path(cli.out_dir) / "envelope.csv", csv.str());
    ordered_json summary{{"problem", cfg.problem_name},
                         {"seed", cfg.seed},
                         {"points_per_dim", points},
                         {"box_radius", R}};
    std::cout << summary.dump(2) << "\n";
  }
  return 0;
}

int cmd_check(const Cli& cli, dys::RunConfig& cfg, const dys::RegistryEntry& entry) {
  std::vector<dys::CheckItem> items = dys::invariant_suite(entry.triple, cfg.split, cfg.seed, 50);
  bool all = true;
  ordered_json checks = ordered_json::array();
  for (const dys::CheckItem& it : items) {
    all = all && it.passed;
    ordered_json j{{"name", it.name},
                   {"passed", it.passed},
                   {"measure", it.measure},
                   {"threshold", it.threshold}};
    if (!it.note.empty()) j["note"] = it.note;
    checks.push_back(j);
  }
  ordered_json report{{"problem", cfg.problem_name},
                      {"mode", dys::mode_name(dys::mode_of(entry.triple))},
                      {"gamma", cfg.split.gamma},
                      {"alpha", cfg.split.alpha},
                      {"seed", cfg.seed},
                      {"checks", checks},
                      {"all_passed", all}};
  std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!cli.out_dir.empty()) {
    fs::create_directories(cli.out_dir);
    atomic_write(fs::path(cli.out_dir) / "check.json", text);
  }
  return all ? 0 : 4;
}

int cmd_saddle_mc(const Cli& cli, dys::RunConfig& cfg, const dys::RegistryEntry& entry) {
  dys::McOutcome out = dys::mc_run(entry.triple, cfg.split, cfg.mc, cli.workers);
  ordered_json summary{{"trials", out.trials},          {"to_min", out.to_min},
                       {"to_saddle", out.to_saddle},    {"not_converged", out.not_converged},
                       {"escaped", out.escaped},        {"seed", out.seed}};
  std::string text = summary.dump(2) + "\n";
  std::cout << text;
  if (!cli.out_dir.empty()) {
    fs::create_directories(cli.out_dir);
    atomic_write(fs::path(cli.out_dir) / "summary.json", text);
    std::ostringstream csv;
    const int n = entry.triple.dim;
    csv << "trial,label,attractor,iters,resid";
    for (int i = 0; i < n; ++i) csv << ",x_" << i;
    csv << '\n';
    for (std::size_t t = 0; t < out.per_trial.size(); ++t) {
      const dys::TrialResult& tr = out.per_trial[t];
      csv << t << ',' << dys::trial_label_name(tr.label) << ',' << tr.attractor << ','
          << tr.iters << ',' << fmt17(tr.resid);
      for (int i = 0; i < n; ++i)
        csv << ',' << (tr.x_final.size() == n ? fmt17(tr.x_final[i]) : "nan");
      csv << '\n';
    }
    atomic_write(fs::path(cli.out_dir) / "trials.csv", csv.str());
  }
  return 0;
}

int cmd_bounds(const Cli& cli, dys::RunConfig& cfg, const dys::RegistryEntry& entry) {
  dys::StepBounds b = dys::step_bounds(entry.triple, cfg.split);
  ordered_json report{{"problem", cfg.problem_name},
                      {"mode", dys::mode_name(dys::mode_of(entry.triple))},
                      {"gamma", cfg.split.gamma},
                      {"alpha", cfg.split.alpha},
                      {"seed", cfg.seed},
                      {"alpha1", jreal(b.alpha1)},
                      {"alpha2", jreal(b.alpha2)}};
  // probe the Jacobian at a fixed point when one is reachable from z0
  report["lambda_min_jt_probe"] = nullptr;
  try {
    dys::RunResult rr = dys::run(entry.triple, cfg.split, *cfg.z0, cfg.stop);
    if (rr.converged)
      report["lambda_min_jt_probe"] = dys::diffeo_probe(entry.triple, cfg.split, rr.z_final);
  } catch (const dys::Error&) {
    // leave null: no reachable fixed point or missing curvature data
  }
  std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!cli.out_dir.empty()) {
    fs::create_directories(cli.out_dir);
    atomic_write(fs::path(cli.out_dir) / "bounds.json", text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-operator splitting lab: envelope, analysis, and experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Cli cli;
  app.add_option("--config", cli.config_path, "Path to a JSON run config")->required();
  auto* seed_opt = app.add_option("--seed", cli.seed, "Override the config seed");
  app.add_option("--out", cli.out_dir, "Directory for output artifacts");
  app.add_option("--workers", cli.workers, "Worker threads for saddle-mc")
      ->check(CLI::PositiveNumber);
  app.add_flag("--q-at-z", cli.q_at_z,
               "Evaluate the forward term at z instead of at prox_g(z)");

  auto* solve = app.add_subcommand("solve", "Run the iteration and export the trajectory");
  auto* envelope = app.add_subcommand("envelope", "Tabulate the envelope on a grid");
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  auto* saddle = app.add_subcommand("saddle-mc", "Monte-Carlo saddle-avoidance experiment");
  auto* bounds = app.add_subcommand("bounds", "Report diffeomorphism step-size bounds");

  CLI11_PARSE(app, argc, argv);
  cli.seed_given = seed_opt->count() > 0;

  try {
    dys::RunConfig cfg = dys::parse_config(read_file(cli.config_path));
    if (cli.seed_given) cfg.seed = cli.seed;
    if (cli.q_at_z) cfg.split.q_at_prox = false;
    dys::RegistryEntry entry = dys::build_validated(cfg);

    if (app.got_subcommand(solve)) return cmd_solve(cli, cfg, entry);
    if (app.got_subcommand(envelope)) return cmd_envelope(cli, cfg, entry);
    if (app.got_subcommand(check)) return cmd_check(cli, cfg, entry);
    if (app.got_subcommand(saddle)) return cmd_saddle_mc(cli, cfg, entry);
    if (app.got_subcommand(bounds)) return cmd_bounds(cli, cfg, entry);
    return 2;
  } catch (const dys::Error& e) {
    ordered_json err{{"error", e.code()}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    switch (e.category()) {
      case dys::ErrorCategory::Config: return 2;
      case dys::ErrorCategory::Numerical: return 3;
      case dys::ErrorCategory::Invariant: return 4;
    }
    return 3;
  } catch (const std::exception& e) {
    ordered_json err{{"error", "Unexpected"}, {"message", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 3;
  }
}
