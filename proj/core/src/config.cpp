#include "spma/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spma {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : node.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&key](const char* k) { return key == k; }) == allowed.end())
      fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

template <typename T>
T get_field(const json& node, const std::string& path, const char* key, const T& fallback) {
  if (!node.contains(key)) return fallback;
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(path + "." + key, e.what());
  }
}

template <typename T>
T require_field(const json& node, const std::string& path, const char* key) {
  if (!node.contains(key)) fail(path + "." + key, "missing required key");
  try {
    return node.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(path + "." + key, e.what());
  }
}

EnvironmentConfig parse_environment(const json& node) {
  EnvironmentConfig env;
  const std::string name = require_field<std::string>(node, "environment", "name");
  if (name == "cliff_world") {
    env.kind = EnvKind::cliff_world;
    check_keys(node, "environment", {"name", "gamma"});
    env.gamma = get_field(node, "environment", "gamma", 0.9);
  } else if (name == "frozen_lake") {
    env.kind = EnvKind::frozen_lake;
    check_keys(node, "environment", {"name", "gamma", "slippery"});
    env.gamma = get_field(node, "environment", "gamma", 0.99);
    env.slippery = get_field(node, "environment", "slippery", false);
  } else if (name == "bandit") {
    env.kind = EnvKind::bandit;
    check_keys(node, "environment", {"name", "num_arms", "min_gap", "seed"});
    env.num_arms = require_field<int>(node, "environment", "num_arms");
    env.min_gap = require_field<double>(node, "environment", "min_gap");
    env.seed = get_field<std::uint64_t>(node, "environment", "seed", 0);
  } else {
    fail("environment.name", "unknown environment '" + name + "'");
  }
  if (env.kind != EnvKind::bandit && !(env.gamma >= 0.0 && env.gamma < 1.0))
    fail("environment.gamma", "must lie in [0, 1)");
  return env;
}

ParameterizationConfig parse_parameterization(const json& node) {
  ParameterizationConfig par;
  const std::string kind = require_field<std::string>(node, "parameterization", "kind");
  if (kind == "tabular") {
    check_keys(node, "parameterization", {"kind"});
    par.linear = false;
  } else if (kind == "linear") {
    par.linear = true;
    check_keys(node, "parameterization", {"kind", "features", "num_tilings", "tile_size"});
    const std::string feats =
        get_field<std::string>(node, "parameterization", "features", "one_hot");
    if (feats == "one_hot") {
      par.features = FeatureKind::one_hot;
    } else if (feats == "tile_coding") {
      par.features = FeatureKind::tile_coding;
      par.num_tilings = get_field(node, "parameterization", "num_tilings", 2);
      par.tile_size = get_field(node, "parameterization", "tile_size", 2);
    } else {
      fail("parameterization.features", "unknown feature kind '" + feats + "'");
    }
  } else {
    fail("parameterization.kind", "must be 'tabular' or 'linear'");
  }
  return par;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "SPMA") return Method::spma;
  if (name == "NPG") return Method::npg;
  if (name == "SPG") return Method::spg;
  if (name == "MDPO") return Method::mdpo;
  if (name == "SPMA_bandit_gap") return Method::spma_bandit_gap;
  throw ConfigError("methods: unknown method '" + name + "'");
}

double effective_step_size(Method method, double eta_raw, bool is_bandit, double gamma) {
  if (method != Method::spma) return eta_raw;
  if (is_bandit) return std::min(eta_raw, 1.0);
  return std::min(eta_raw, 0.999) * (1.0 - gamma);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_keys(root, "",
             {"environment", "parameterization", "methods", "eta_grid", "inner_m", "outer_T",
              "seeds", "advantage_mode", "state_mode", "output_dir",
              "estimate_surrogate_gap"});

  ExperimentConfig cfg;
  if (!root.contains("environment")) throw ConfigError("environment: missing required key");
  cfg.environment = parse_environment(root.at("environment"));
  if (!root.contains("parameterization"))
    throw ConfigError("parameterization: missing required key");
  cfg.parameterization = parse_parameterization(root.at("parameterization"));

  const auto method_names = require_field<std::vector<std::string>>(root, "", "methods");
  if (method_names.empty()) throw ConfigError("methods: must be nonempty");
  for (const auto& name : method_names) cfg.methods.push_back(parse_method(name));

  cfg.eta_grid = get_field(root, "", "eta_grid", cfg.eta_grid);
  if (cfg.eta_grid.empty()) throw ConfigError("eta_grid: must be nonempty");
  for (double eta : cfg.eta_grid)
    if (!(eta > 0.0)) throw ConfigError("eta_grid: entries must be positive");

  cfg.inner_m = get_field(root, "", "inner_m", cfg.inner_m);
  if (cfg.inner_m.empty()) throw ConfigError("inner_m: must be nonempty");
  for (int m : cfg.inner_m)
    if (m < 1) throw ConfigError("inner_m: entries must be >= 1");

  cfg.outer_iters = require_field<int>(root, "", "outer_T");
  if (cfg.outer_iters < 0) throw ConfigError("outer_T: must be nonnegative");

  cfg.seeds = get_field(root, "", "seeds", cfg.seeds);
  if (cfg.seeds.empty()) throw ConfigError("seeds: must be nonempty");

  if (root.contains("advantage_mode")) {
    const auto& node = root.at("advantage_mode");
    const std::string kind = require_field<std::string>(node, "advantage_mode", "kind");
    if (kind == "exact") {
      check_keys(node, "advantage_mode", {"kind"});
    } else if (kind == "noisy") {
      check_keys(node, "advantage_mode", {"kind", "approx_error"});
      cfg.advantage_mode = AdvantageMode::noisy;
      cfg.approx_error = require_field<double>(node, "advantage_mode", "approx_error");
      if (cfg.approx_error < 0.0) fail("advantage_mode.approx_error", "must be nonnegative");
    } else {
      fail("advantage_mode.kind", "must be 'exact' or 'noisy'");
    }
  }

  if (root.contains("state_mode")) {
    const auto& node = root.at("state_mode");
    const std::string kind = require_field<std::string>(node, "state_mode", "kind");
    if (kind == "exact_occupancy") {
      check_keys(node, "state_mode", {"kind"});
    } else if (kind == "sampled") {
      check_keys(node, "state_mode", {"kind", "n_states"});
      cfg.state_mode = StateMode::sampled;
      cfg.sample_count = require_field<int>(node, "state_mode", "n_states");
      if (cfg.sample_count < 1) fail("state_mode.n_states", "must be >= 1");
    } else {
      fail("state_mode.kind", "must be 'exact_occupancy' or 'sampled'");
    }
  }

  cfg.output_dir = get_field<std::string>(root, "", "output_dir", cfg.output_dir);
  cfg.estimate_surrogate_gap =
      get_field(root, "", "estimate_surrogate_gap", cfg.estimate_surrogate_gap);

  if (cfg.environment.kind == EnvKind::bandit && cfg.parameterization.linear)
    throw ConfigError("parameterization: linear features are grid-environment only");
  if (cfg.environment.kind != EnvKind::bandit) {
    for (Method m : cfg.methods)
      if (m == Method::spma_bandit_gap)
        throw ConfigError("methods: SPMA_bandit_gap applies to bandit environments only");
  }
  if (cfg.parameterization.linear) {
    for (Method m : cfg.methods)
      if (m == Method::npg)
        throw ConfigError(
            "methods: NPG has no linear-FA variant here; use MDPO for the mirror-descent "
            "baseline");
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace spma
