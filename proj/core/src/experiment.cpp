#include "spma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "spma/envs.hpp"
#include "spma/linear_fa.hpp"
#include "spma/rng.hpp"
#include "spma/tabular.hpp"

namespace spma {

namespace {

TabularMdp build_grid_mdp(const EnvironmentConfig& env) {
  switch (env.kind) {
    case EnvKind::cliff_world: return cliff_world(env.gamma);
    case EnvKind::frozen_lake: return frozen_lake(env.gamma, env.slippery);
    case EnvKind::bandit: break;
  }
  throw ConfigError("bandit environment has no grid MDP");
}

FeatureMap build_features(const ExperimentConfig& cfg, const TabularMdp& mdp) {
  if (cfg.parameterization.features == FeatureKind::one_hot)
    return one_hot_features(mdp.num_states, mdp.num_actions);
  const GridSpec grid = cfg.environment.kind == EnvKind::cliff_world ? cliff_world_grid()
                                                                     : frozen_lake_grid();
  return tile_coding(grid, mdp.num_actions, cfg.parameterization.num_tilings,
                     cfg.parameterization.tile_size);
}

std::vector<IterationRecord> run_cell(const ExperimentConfig& cfg, const CellSpec& cell) {
  if (cfg.environment.kind == EnvKind::bandit) {
    const BanditInstance bandit = random_bandit(cfg.environment.num_arms,
                                                cfg.environment.min_gap,
                                                cfg.environment.seed);
    TabularRunConfig run;
    run.method = cell.method;
    run.step_size = cell.eta_effective;
    run.iterations = cfg.outer_iters;
    return run_bandit(bandit, run).records;
  }

  const TabularMdp mdp = build_grid_mdp(cfg.environment);
  if (!cfg.parameterization.linear) {
    TabularRunConfig run;
    run.method = cell.method;
    run.step_size = cell.eta_effective;
    run.iterations = cfg.outer_iters;
    return run_tabular(mdp, run).records;
  }

  const FeatureMap features = build_features(cfg, mdp);
  FaRunConfig run;
  run.outer_step_size = cell.eta_effective;
  run.inner_iters = cell.inner_m;
  run.outer_iters = cfg.outer_iters;
  run.advantage_mode = cfg.advantage_mode;
  run.approx_error = cfg.approx_error;
  run.noise_seed = derive_seed(cell.seed, 1);
  run.state_mode = cfg.state_mode;
  run.sample_count = cfg.sample_count;
  run.sample_seed = derive_seed(cell.seed, 2);
  run.estimate_surrogate_gap = cfg.estimate_surrogate_gap;
  switch (cell.method) {
    case Method::spma: return run_spma_fa(mdp, features, run).records;
    case Method::mdpo: return run_mdpo_fa(mdp, features, run).records;
    case Method::spg: return run_spg_fa(mdp, features, run).records;
    default: throw ConfigError("method not available with linear parameterization");
  }
}

}  // namespace

double curve_auc(const std::vector<IterationRecord>& records) {
  if (records.size() < 2) return records.empty() ? 0.0 : records[0].j_value;
  double area = 0.0;
  for (std::size_t t = 0; t + 1 < records.size(); ++t)
    area += 0.5 * (records[t].j_value + records[t + 1].j_value);
  return area;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads,
                                std::uint64_t seed_offset) {
  ExperimentResult result;
  result.config = cfg;

  const bool is_bandit = cfg.environment.kind == EnvKind::bandit;
  const double gamma = is_bandit ? 0.0 : cfg.environment.gamma;
  const std::vector<int> m_values =
      cfg.parameterization.linear ? cfg.inner_m : std::vector<int>{0};

  int index = 0;
  for (Method method : cfg.methods) {
    for (double eta : cfg.eta_grid) {
      for (int m : m_values) {
        for (std::uint64_t seed : cfg.seeds) {
          CellSpec spec;
          spec.index = index++;
          spec.method = method;
          spec.eta_raw = eta;
          spec.eta_effective = effective_step_size(method, eta, is_bandit, gamma);
          spec.inner_m = m;
          spec.seed = seed + seed_offset;
          result.cells.push_back(CellResult{spec, {}, "", 0.0});
        }
      }
    }
  }

  int worker_count = threads == 0 ? static_cast<int>(std::thread::hardware_concurrency())
                                  : threads;
  worker_count = std::max(1, std::min<int>(worker_count, static_cast<int>(result.cells.size())));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= result.cells.size()) return;
      CellResult& cell = result.cells[i];
      try {
        cell.records = run_cell(cfg, cell.spec);
        cell.auc = curve_auc(cell.records);
      } catch (const std::exception& e) {
        cell.records.clear();
        cell.error = e.what();
      }
    }
  };

  if (worker_count == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (int i = 0; i < worker_count; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::vector<AucSummary> summarize_auc(const ExperimentResult& result) {
  std::map<std::tuple<std::string, double, int>, std::vector<double>> groups;
  for (const auto& cell : result.cells) {
    if (cell.failed()) continue;
    groups[{method_name(cell.spec.method), cell.spec.eta_raw, cell.spec.inner_m}].push_back(
        cell.auc);
  }
  std::vector<AucSummary> out;
  for (const auto& [key, aucs] : groups) {
    AucSummary s;
    s.method = parse_method(std::get<0>(key));
    s.eta_raw = std::get<1>(key);
    s.inner_m = std::get<2>(key);
    s.cells = static_cast<int>(aucs.size());
    double mean = 0.0;
    for (double a : aucs) mean += a;
    mean /= aucs.size();
    double var = 0.0;
    for (double a : aucs) var += (a - mean) * (a - mean);
    s.mean_auc = mean;
    s.std_error = aucs.size() > 1 ? std::sqrt(var / (aucs.size() - 1) / aucs.size()) : 0.0;
    out.push_back(s);
  }
  return out;
}

std::map<std::pair<std::string, int>, AucSummary> best_eta(const ExperimentResult& result) {
  std::map<std::pair<std::string, int>, AucSummary> best;
  for (const AucSummary& s : summarize_auc(result)) {
    const auto key = std::make_pair(std::string(method_name(s.method)), s.inner_m);
    auto it = best.find(key);
    if (it == best.end() || s.mean_auc > it->second.mean_auc) best[key] = s;
  }
  return best;
}

}  // namespace spma
