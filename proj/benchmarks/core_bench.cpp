#include <benchmark/benchmark.h>

#include "spma/envs.hpp"
#include "spma/linear_fa.hpp"
#include "spma/mdp.hpp"
#include "spma/tabular.hpp"

namespace {

using namespace spma;

void BM_policy_evaluate(benchmark::State& state) {
  const TabularMdp mdp = cliff_world(0.9);
  const Policy pi = Policy::uniform(mdp.num_states, mdp.num_actions);
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy_evaluate(mdp, pi));
  }
}
BENCHMARK(BM_policy_evaluate);

void BM_value_iteration(benchmark::State& state) {
  const TabularMdp mdp = cliff_world(0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(value_iteration(mdp, 1e-10));
  }
}
BENCHMARK(BM_value_iteration);

void BM_spma_step(benchmark::State& state) {
  const TabularMdp mdp = cliff_world(0.9);
  const Policy pi = Policy::uniform(mdp.num_states, mdp.num_actions);
  const Matrix adv = policy_evaluate(mdp, pi).adv;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spma_step(pi, adv, 0.09));
  }
}
BENCHMARK(BM_spma_step);

void BM_tabular_iteration(benchmark::State& state) {
  const TabularMdp mdp = cliff_world(0.9);
  Policy pi = Policy::uniform(mdp.num_states, mdp.num_actions);
  for (auto _ : state) {
    const EvalResult eval = policy_evaluate(mdp, pi);
    pi = spma_step(pi, eval.adv, 0.09);
    benchmark::DoNotOptimize(pi);
  }
}
BENCHMARK(BM_tabular_iteration);

void BM_surrogate_eval(benchmark::State& state) {
  const TabularMdp mdp = cliff_world(0.9);
  const FeatureMap features = tile_coding(cliff_world_grid(), 4, 2, 2);
  const Policy pi = Policy::uniform(mdp.num_states, mdp.num_actions);
  const EvalResult eval = policy_evaluate(mdp, pi);
  const Matrix targets = spma_target(pi, eval.adv, 0.09);
  const Vector weights = occupancy(mdp, pi).d;
  const SurrogateProblem prob{weights, targets, features};
  const LinearPolicyParams params{Vector::Zero(features.dim())};
  for (auto _ : state) {
    benchmark::DoNotOptimize(spma_surrogate(params, prob));
  }
}
BENCHMARK(BM_surrogate_eval);

void BM_sample_states(benchmark::State& state) {
  const TabularMdp mdp = cliff_world(0.9);
  const Policy pi = Policy::uniform(mdp.num_states, mdp.num_actions);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_states(mdp, pi, 512, seed++));
  }
}
BENCHMARK(BM_sample_states);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
