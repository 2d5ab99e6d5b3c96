#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spma/linear_fa.hpp"
#include "spma/types.hpp"

namespace spma {

enum class EnvKind { cliff_world, frozen_lake, bandit };
enum class FeatureKind { one_hot, tile_coding };

struct EnvironmentConfig {
  EnvKind kind = EnvKind::cliff_world;
  double gamma = 0.9;       // grid environments
  bool slippery = false;    // frozen_lake
  int num_arms = 2;         // bandit
  double min_gap = 0.1;     // bandit
  std::uint64_t seed = 0;   // bandit instance seed
};

struct ParameterizationConfig {
  bool linear = false;
  FeatureKind features = FeatureKind::one_hot;
  int num_tilings = 2;   // tile_coding
  int tile_size = 2;     // tile_coding
};

// Declarative experiment description; parsed strictly (unknown keys are
// errors) so a config file pins a run completely.
struct ExperimentConfig {
  EnvironmentConfig environment;
  ParameterizationConfig parameterization;
  std::vector<Method> methods;
  std::vector<double> eta_grid = {0.3, 0.5, 0.7, 0.9, 1.0};
  std::vector<int> inner_m = {5, 25, 50};
  int outer_iters = 100;
  std::vector<std::uint64_t> seeds = {0};
  AdvantageMode advantage_mode = AdvantageMode::exact;
  double approx_error = 0.0;
  StateMode state_mode = StateMode::exact_occupancy;
  int sample_count = 512;
  std::string output_dir = "results";
  bool estimate_surrogate_gap = false;
};

// Parse and validate; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

Method parse_method(const std::string& name);

// The grid stores raw values; SPMA on an MDP runs at
// min(eta * (1 - gamma), 0.999 (1 - gamma)) so every grid point is
// admissible, SPMA on a bandit is capped at 1, and the other methods use
// the raw value.
double effective_step_size(Method method, double eta_raw, bool is_bandit, double gamma);

}  // namespace spma
