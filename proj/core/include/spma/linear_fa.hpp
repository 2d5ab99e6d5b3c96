#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spma/diagnostics.hpp"
#include "spma/mdp.hpp"
#include "spma/types.hpp"

namespace spma {

// State-action features, one row per (s, a) pair at index s * A + a.
struct FeatureMap {
  Matrix x;  // (S*A) x d

  int dim() const { return static_cast<int>(x.cols()); }
};

struct LinearPolicyParams {
  Vector theta;
};

// Weighted softmax-classification problem: fit the policy logits so that
// the induced rows match the target rows on every state with positive
// weight.
struct SurrogateProblem {
  Vector state_weights;  // length S, sums to 1
  Matrix targets;        // S x A probability rows (rows with zero weight unused)
  FeatureMap features;
};

struct ArmijoConfig {
  double init_step = 1.0;
  double shrink_factor = 0.5;
  // Acceptance threshold 1/2 tracks the inverse-curvature step along the
  // gradient; looser thresholds accept steps that overshoot the stiff
  // directions of badly scaled surrogates and stall the inner loop.
  double sufficient_decrease_c = 0.5;
  int max_backtracks = 50;
};

struct LineSearchResult {
  double step = 0.0;
  bool exhausted = false;
};

enum class AdvantageMode { exact, noisy };
enum class StateMode { exact_occupancy, sampled };

struct FaRunConfig {
  double outer_step_size = 0.0;  // eta, <= 1 - gamma
  int inner_iters = 1;           // m
  int outer_iters = 1;           // T
  AdvantageMode advantage_mode = AdvantageMode::exact;
  double approx_error = 0.0;  // sup-norm advantage noise level
  std::uint64_t noise_seed = 0;
  StateMode state_mode = StateMode::exact_occupancy;
  int sample_count = 0;  // states drawn per outer iteration
  std::uint64_t sample_seed = 0;
  ArmijoConfig armijo;
  // The minimum of the ideal surrogate is estimated by long-run Armijo
  // descent (2000 iterations, three restarts); costly, so off by default.
  bool estimate_surrogate_gap = false;
};

// pi(a|s) = softmax over a of <x(s,a), theta>, rows stabilized by max
// subtraction.
Policy log_linear_policy(const FeatureMap& features, const LinearPolicyParams& params,
                         int num_states, int num_actions);

// Target rows pi_t(.|s) (1 + eta adv(s,.)).  Rows are renormalized by their
// sum so that inexact advantages (which break the zero-mean identity) still
// yield probability rows; with exact advantages the sums are already 1 to
// roundoff.
Matrix spma_target(const Policy& pi, const Matrix& adv, double eta);

struct ValueGrad {
  double value = 0.0;
  Vector gradient;
};

// Weighted cross-entropy of the target rows against the log-linear policy,
// with the 0 log 0 = 0 convention; the gradient is
// sum_s w(s) sum_a (q_theta(a|s) - p(a|s)) x(s,a).  States are reduced in
// ascending index order so results do not depend on evaluation scheduling.
ValueGrad spma_surrogate(const LinearPolicyParams& params, const SurrogateProblem& prob);

// sum_s w(s) [ KL(q_theta(.|s) || pi_t(.|s)) - eta <q_theta(.|s), adv(s,.)> ],
// the mirror-descent surrogate; non-convex in theta.
ValueGrad mdpo_surrogate(const LinearPolicyParams& params, const Policy& pi_t,
                         const Matrix& adv, double eta, const Vector& state_weights,
                         const FeatureMap& features);

// Backtracking line search for the largest zeta = init * shrink^k with
// f(theta - zeta grad) <= f(theta) - c zeta |grad|^2.  Exhaustion is a
// signal, not an error: the caller keeps its iterate.
LineSearchResult armijo_search(const std::function<double(const Vector&)>& objective,
                               const Vector& theta, const Vector& grad,
                               const ArmijoConfig& cfg);

// m Armijo gradient-descent steps on an arbitrary smooth objective, taken
// from Nesterov-extrapolated points with a monotone safeguard (plain
// descent alone contracts badly scaled state weights far too slowly).
// warm_step, when given, carries the line-search initial step across calls
// (updated to 1.8x the last accepted step).
Vector minimize_with_armijo(const std::function<ValueGrad(const Vector&)>& objective,
                            const Vector& theta0, int iters, const ArmijoConfig& cfg,
                            double* warm_step = nullptr);

// m Armijo gradient-descent steps on spma_surrogate starting from theta0.
Vector inner_loop_minimize(const SurrogateProblem& prob, const Vector& theta0, int iters,
                           const ArmijoConfig& cfg, double* warm_step = nullptr);

// n i.i.d. draws from the discounted occupancy measure via geometric
// stopping: start from rho, stop and emit with probability 1 - gamma at
// every step, otherwise follow pi.
std::vector<int> sample_states(const TabularMdp& mdp, const Policy& pi, int n,
                               std::uint64_t seed);

// adv + uniform noise on [-eps, eps], clipped to [-1, 1] / (1 - gamma).
Matrix noisy_advantage(const Matrix& adv, double approx_error, double gamma,
                       std::uint64_t seed);

struct FaRunResult {
  Method method = Method::spma;
  double step_size = 0.0;
  std::vector<IterationRecord> records;  // t = 0..T
  std::vector<Policy> policies;          // pi_t
  std::vector<Vector> thetas;            // theta_t
  // Ideal (exact-occupancy) surrogate in KL form at theta_{t+1}; the
  // observable handle on the excess-risk + bias terms.  Entry t covers the
  // inner solve of outer iteration t.
  std::vector<double> ideal_kl;
  Vector v_star;
  double rho_min = 0.0;
};

FaRunResult run_spma_fa(const TabularMdp& mdp, const FeatureMap& features,
                        const FaRunConfig& cfg);
FaRunResult run_mdpo_fa(const TabularMdp& mdp, const FeatureMap& features,
                        const FaRunConfig& cfg);

// Gradient ascent on J(theta) with the exact policy gradient; the outer step
// is set by Armijo line search on -J with cfg.outer_step_size as the initial
// trial step.  inner_iters is ignored.
FaRunResult run_spg_fa(const TabularMdp& mdp, const FeatureMap& features,
                       const FaRunConfig& cfg);

// Exact policy gradient of J(theta) for the log-linear policy:
// (1/(1-gamma)) sum_s d(s) sum_a pi(a|s) A(s,a) (x(s,a) - xbar_pi(s)).
Vector policy_gradient(const TabularMdp& mdp, const FeatureMap& features,
                       const LinearPolicyParams& params);

}  // namespace spma
