#pragma once

#include <optional>
#include <vector>

#include "spma/diagnostics.hpp"
#include "spma/mdp.hpp"
#include "spma/types.hpp"

namespace spma {

// K-armed bandit with rewards in [0, 1].
struct BanditInstance {
  Vector rewards;

  int num_arms() const { return static_cast<int>(rewards.size()); }
  int best_arm() const {
    int a = 0;
    rewards.maxCoeff(&a);
    return a;
  }
  // Smallest gap between the best arm and any other arm.
  double min_gap() const;
};

struct TabularRunConfig {
  Method method = Method::spma;
  double step_size = 0.0;
  int iterations = 0;
  std::optional<Policy> init_policy;  // default: uniform
  std::optional<Logits> init_logits;  // SPG only; default: zeros
};

// pi'(a) = pi(a) (1 + eta (r(a) - <pi, r>)).  Mass is conserved by
// construction; no renormalization happens, so a too-large step surfaces as
// a StepSizeTooLarge error instead of being hidden.
Policy spma_bandit_step(const Policy& pi, const Vector& rewards, double eta);

// Gap-dependent step sizes 1/|Delta(a,a')| collapse the update to
// pi'(a) = pi(a) [1 + sum_{a' != a} pi(a') sign(r(a) - r(a'))], with
// sign(0) = 0 so ties contribute nothing.
Policy spma_bandit_gap_step(const Policy& pi, const Vector& rewards);

// Per-state update pi'(a|s) = pi(a|s) (1 + eta adv(s,a)).  The advantage
// must be zero-mean under pi at every state (within 1e-8).
Policy spma_step(const Policy& pi, const Matrix& adv, double eta);

// pi'(a|s) proportional to pi(a|s) exp(eta adv(s,a)), rows renormalized.
Policy npg_step(const Policy& pi, const Matrix& adv, double eta);

// Tabular mirror-descent policy optimization coincides with npg_step; named
// alias so experiment configs can select it directly.
Policy mdpo_tabular_step(const Policy& pi, const Matrix& adv, double eta);

// z' = z + eta (pi . adv); logits drift freely and are never renormalized.
std::pair<Logits, Policy> spg_step(const Logits& z, const Policy& pi, const Matrix& adv,
                                   double eta);

struct TabularRunResult {
  Method method = Method::spma;
  double step_size = 0.0;
  std::vector<IterationRecord> records;  // t = 0..T
  std::vector<Vector> values;            // V^{pi_t}, t = 0..T
  std::vector<Policy> policies;          // pi_t,     t = 0..T
  Vector v_star;
};

// Iterates {evaluate, step, record} with exact advantages for cfg.iterations
// steps; records cover t = 0..T inclusive.  SPMA requires
// eta <= 0.999 (1 - gamma).
TabularRunResult run_tabular(const TabularMdp& mdp, const TabularRunConfig& cfg);

struct BanditRunResult {
  Method method = Method::spma;
  double step_size = 0.0;
  std::vector<IterationRecord> records;
  std::vector<Policy> policies;        // 1 x K rows
  std::vector<double> best_arm_prob;   // pi_t(a*)
};

BanditRunResult run_bandit(const BanditInstance& bandit, const TabularRunConfig& cfg);

}  // namespace spma
