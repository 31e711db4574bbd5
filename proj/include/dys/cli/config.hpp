#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dys/analysis.hpp"
#include "dys/core/rng.hpp"
#include "dys/core/vec.hpp"
#include "dys/driver.hpp"
#include "dys/errors.hpp"
#include "dys/model/registry.hpp"
#include "dys/saddle_lab.hpp"
#include "dys/splitting.hpp"

namespace dys {

/// Parsed, schema-checked run description. Numeric admissibility beyond signs
/// (the gamma ranges) is rechecked against the concrete problem by
/// validate_params when the problem is built.
struct RunConfig {
  std::string problem_name;
  ParamMap problem_params;
  SplitParams split;
  bool alpha_given = false;
  StopRule stop;
  std::uint64_t seed = 1;
  std::optional<Vec> z0;
  McConfig mc;
  bool mc_minimizers_given = false;
  bool mc_saddles_given = false;
};

namespace cli_detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw SchemaError(path + ": unknown key '" + it.key() + "'");
  }
}

inline double need_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path + ": expected a number");
  return v.get<double>();
}

inline long need_integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number()) {
    double d = v.get<double>();
    if (std::abs(d - std::round(d)) < 1e-9) return static_cast<long>(std::round(d));
  }
  throw SchemaError(path + ": expected an integer");
}

inline bool need_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SchemaError(path + ": expected a boolean");
  return v.get<bool>();
}

inline std::string need_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path + ": expected a string");
  return v.get<std::string>();
}

inline Vec need_vec(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path + ": expected an array of numbers");
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (const json& e : v) out[i++] = need_number(e, path);
  return out;
}

inline std::vector<Vec> need_vec_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path + ": expected an array of arrays");
  std::vector<Vec> out;
  int i = 0;
  for (const json& e : v) out.push_back(need_vec(e, path + "[" + std::to_string(i++) + "]"));
  return out;
}

inline void parse_init(const json& j, McConfig& mc, const std::string& path) {
  check_keys(j, {"kind", "lo", "hi", "mean", "sigma", "start"}, path);
  std::string kind = j.contains("kind") ? need_string(j["kind"], path + ".kind") : "uniform_box";
  if (kind == "uniform_box") {
    mc.init = InitKind::UniformBox;
    if (j.contains("lo")) mc.box_lo = need_number(j["lo"], path + ".lo");
    if (j.contains("hi")) mc.box_hi = need_number(j["hi"], path + ".hi");
    if (!(mc.box_lo < mc.box_hi)) throw SchemaError(path + ": lo must be below hi");
  } else if (kind == "gaussian") {
    mc.init = InitKind::Gaussian;
    if (j.contains("mean")) mc.gaussian_mean = need_vec(j["mean"], path + ".mean");
    if (j.contains("sigma")) mc.gaussian_sigma = need_number(j["sigma"], path + ".sigma");
    if (mc.gaussian_sigma <= 0.0) throw SchemaError(path + ".sigma: must be positive");
  } else if (kind == "fixed") {
    mc.init = InitKind::Fixed;
    if (!j.contains("start")) throw SchemaError(path + ": fixed init needs 'start'");
    mc.fixed_start = need_vec(j["start"], path + ".start");
  } else {
    throw SchemaError(path + ".kind: must be uniform_box, gaussian, or fixed");
  }
}

}  // namespace cli_detail

/// Strict JSON config parse: rejects malformed text with the source line,
/// unknown keys, wrong types, and sign violations.
inline RunConfig parse_config(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(line, e.what());
  }
  if (!root.is_object()) throw SchemaError("config root must be an object");
  cli_detail::check_keys(root, {"problem", "splitting", "stop", "start", "seed", "experiment"},
                         "config");

  RunConfig cfg;
  if (!root.contains("problem")) throw SchemaError("missing 'problem' block");
  {
    const json& p = root["problem"];
    if (!p.is_object()) throw SchemaError("problem: expected an object");
    cli_detail::check_keys(p, {"name", "params"}, "problem");
    if (!p.contains("name")) throw SchemaError("problem.name: required");
    cfg.problem_name = cli_detail::need_string(p["name"], "problem.name");
    if (p.contains("params")) {
      const json& pp = p["params"];
      if (!pp.is_object()) throw SchemaError("problem.params: expected an object");
      for (auto it = pp.begin(); it != pp.end(); ++it) {
        const json& v = it.value();
        std::string path = "problem.params." + it.key();
        if (v.is_number()) {
          cfg.problem_params[it.key()] = v.get<double>();
        } else if (v.is_array()) {
          Vec vec = cli_detail::need_vec(v, path);
          std::vector<double> out(static_cast<std::size_t>(vec.size()));
          for (int i = 0; i < vec.size(); ++i) out[static_cast<std::size_t>(i)] = vec[i];
          cfg.problem_params[it.key()] = out;
        } else if (v.is_string()) {
          cfg.problem_params[it.key()] = v.get<std::string>();
        } else {
          throw SchemaError(path + ": expected number, array, or string");
        }
      }
    }
  }

  if (!root.contains("splitting")) throw SchemaError("missing 'splitting' block");
  {
    const json& s = root["splitting"];
    if (!s.is_object()) throw SchemaError("splitting: expected an object");
    cli_detail::check_keys(s, {"gamma", "alpha", "q_at_prox"}, "splitting");
    if (!s.contains("gamma")) throw SchemaError("splitting.gamma: required");
    cfg.split.gamma = cli_detail::need_number(s["gamma"], "splitting.gamma");
    if (cfg.split.gamma <= 0.0) throw SchemaError("splitting.gamma: must be positive");
    if (s.contains("alpha")) {
      cfg.split.alpha = cli_detail::need_number(s["alpha"], "splitting.alpha");
      if (cfg.split.alpha <= 0.0) throw SchemaError("splitting.alpha: must be positive");
      cfg.alpha_given = true;
    }
    if (s.contains("q_at_prox"))
      cfg.split.q_at_prox = cli_detail::need_bool(s["q_at_prox"], "splitting.q_at_prox");
  }

  if (root.contains("stop")) {
    const json& s = root["stop"];
    if (!s.is_object()) throw SchemaError("stop: expected an object");
    cli_detail::check_keys(s, {"tol", "max_iter"}, "stop");
    if (s.contains("tol")) {
      cfg.stop.tol = cli_detail::need_number(s["tol"], "stop.tol");
      if (cfg.stop.tol <= 0.0) throw SchemaError("stop.tol: must be positive");
    }
    if (s.contains("max_iter")) {
      cfg.stop.max_iter = cli_detail::need_integer(s["max_iter"], "stop.max_iter");
      if (cfg.stop.max_iter < 0) throw SchemaError("stop.max_iter: must be >= 0");
    }
  }

  if (root.contains("start")) {
    const json& s = root["start"];
    if (!s.is_object()) throw SchemaError("start: expected an object");
    cli_detail::check_keys(s, {"z0"}, "start");
    if (s.contains("z0")) cfg.z0 = cli_detail::need_vec(s["z0"], "start.z0");
  }

  if (root.contains("seed")) {
    long s = cli_detail::need_integer(root["seed"], "seed");
    if (s < 0) throw SchemaError("seed: must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }

  if (root.contains("experiment")) {
    const json& e = root["experiment"];
    if (!e.is_object()) throw SchemaError("experiment: expected an object");
    cli_detail::check_keys(e,
                           {"trials", "init", "delta_min", "delta_saddle", "tol", "max_iter",
                            "escape_radius", "minimizers", "saddles"},
                           "experiment");
    if (e.contains("trials")) {
      long t = cli_detail::need_integer(e["trials"], "experiment.trials");
      if (t < 1) throw SchemaError("experiment.trials: must be >= 1");
      cfg.mc.trials = static_cast<int>(t);
    }
    if (e.contains("init")) cli_detail::parse_init(e["init"], cfg.mc, "experiment.init");
    if (e.contains("delta_min")) {
      cfg.mc.delta_min = cli_detail::need_number(e["delta_min"], "experiment.delta_min");
      if (cfg.mc.delta_min <= 0.0) throw SchemaError("experiment.delta_min: must be positive");
    }
    if (e.contains("delta_saddle")) {
      cfg.mc.delta_saddle = cli_detail::need_number(e["delta_saddle"], "experiment.delta_saddle");
      if (cfg.mc.delta_saddle <= 0.0)
        throw SchemaError("experiment.delta_saddle: must be positive");
    }
    if (e.contains("tol")) {
      cfg.mc.tol = cli_detail::need_number(e["tol"], "experiment.tol");
      if (cfg.mc.tol <= 0.0) throw SchemaError("experiment.tol: must be positive");
    }
    if (e.contains("max_iter")) {
      cfg.mc.max_iter = cli_detail::need_integer(e["max_iter"], "experiment.max_iter");
      if (cfg.mc.max_iter < 1) throw SchemaError("experiment.max_iter: must be >= 1");
    }
    if (e.contains("escape_radius")) {
      cfg.mc.escape_radius =
          cli_detail::need_number(e["escape_radius"], "experiment.escape_radius");
      if (cfg.mc.escape_radius <= 0.0)
        throw SchemaError("experiment.escape_radius: must be positive");
    }
    if (e.contains("minimizers")) {
      cfg.mc.minimizers = cli_detail::need_vec_list(e["minimizers"], "experiment.minimizers");
      cfg.mc_minimizers_given = true;
    }
    if (e.contains("saddles")) {
      cfg.mc.saddles = cli_detail::need_vec_list(e["saddles"], "experiment.saddles");
      cfg.mc_saddles_given = true;
    }
  }
  return cfg;
}

/// Builds the problem, resolves the alpha default
/// (0.9 min(applicable step bound, 1)), and validates the parameters.
inline RegistryEntry build_validated(RunConfig& cfg) {
  RegistryEntry entry = registry_build(cfg.problem_name, cfg.problem_params);
  if (!cfg.alpha_given) {
    double bound = 1.0;
    if (entry.triple.g.is_zero || entry.triple.h.is_zero) {
      try {
        StepBounds b = step_bounds(entry.triple, cfg.split);
        bound = std::min({b.alpha1, b.alpha2, 1.0});
      } catch (const Error&) {
        bound = 1.0;  // no curvature data; fall back to the relaxed default
      }
    }
    cfg.split.alpha = 0.9 * bound;
  }
  validate_params(entry.triple, cfg.split);
  // default start: seeded uniform draw, reproducible per seed
  if (!cfg.z0) cfg.z0 = TrialRng(cfg.seed, 0).uniform_vec(entry.triple.dim, -1.0, 1.0);
  if (cfg.z0->size() != entry.triple.dim)
    throw SchemaError("start.z0: length " + std::to_string(cfg.z0->size()) +
                      " does not match problem dimension " + std::to_string(entry.triple.dim));
  // attractor lists default to the registry landscape
  cfg.mc.seed = cfg.seed;
  if (!cfg.mc_minimizers_given) cfg.mc.minimizers = entry.landscape.minimizers;
  if (!cfg.mc_saddles_given) cfg.mc.saddles = entry.landscape.saddles;
  for (const Vec& v : cfg.mc.minimizers)
    if (v.size() != entry.triple.dim)
      throw SchemaError("experiment.minimizers: entry dimension mismatch");
  for (const Vec& v : cfg.mc.saddles)
    if (v.size() != entry.triple.dim)
      throw SchemaError("experiment.saddles: entry dimension mismatch");
  return entry;
}

}  // namespace dys
