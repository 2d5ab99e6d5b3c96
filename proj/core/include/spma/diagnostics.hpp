#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spma/mdp.hpp"
#include "spma/types.hpp"

namespace spma {

// Per-iteration diagnostics shared by the tabular and FA runners.  Optional
// fields stay empty when a column does not apply to the run that produced
// the record (surrogate columns for tabular runs, bound checks for methods
// whose bound is not claimed, and the final record of a run).
struct IterationRecord {
  int t = 0;
  double j_value = 0.0;
  double subopt_inf = 0.0;
  double subopt_rho = 0.0;
  std::optional<double> c_t;
  std::optional<double> min_gap;
  double alpha_t = 1.0;
  std::optional<double> surrogate_final;
  std::optional<double> surrogate_gap;
  std::optional<bool> bound_ok;
};

// Near-optimal action sets and gaps behind the contraction factor: for each
// state, near_optimal[s] = {a : Q(s,a) >= max_a' Q(s,a') - tie_tol} and
// gap[s] = max Q(s,.) - max over excluded actions, undefined when every
// action ties.  c_t = min_s pi(near_optimal(s)|s) * gap(s) over states with
// a defined gap; fully-tied states are already optimal and drop out.
struct GapQuantities {
  std::vector<std::vector<int>> near_optimal;
  std::vector<std::optional<double>> gap;
  std::optional<double> c_t;
  std::optional<double> min_gap;
};

GapQuantities gap_quantities(const Policy& pi, const Matrix& q, double tie_tol);

inline double alpha_from_c(std::optional<double> c_t, double eta, double gamma) {
  return c_t ? 1.0 - eta * (*c_t) * (1.0 - gamma) : 1.0;
}

struct BoundCheckEntry {
  int t = 0;
  double measured = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct BoundReport {
  std::string name;
  bool applicable = true;
  bool pass = true;
  std::string note;
  std::vector<BoundCheckEntry> entries;

  std::string render() const;
};

// Per-iteration contraction ||V* - V_{t+1}||_inf <= alpha_t ||V* - V_t||_inf
// plus the cumulative product bound.  Only claimed for SPMA runs; any other
// method yields a non-applicable report.
BoundReport check_theorem2(const std::vector<IterationRecord>& records, Method method,
                           double eta, double gamma);

// Bandit linear rate from uniform init:
// r(a*) - <pi_t, r> <= (1 - 1/K) exp(-eta Delta_min t / K).
BoundReport check_bandit_linear(const std::vector<IterationRecord>& records, int num_arms,
                                double min_gap, double eta);

// Gap-dependent bandit closed form from uniform init:
// pi_t(a*) = 1 - (1 - 1/K)^(2^t) until floating-point saturation, and
// sub-optimality <= (1 - 1/K)^(2^t).
BoundReport check_bandit_superlinear(const std::vector<IterationRecord>& records,
                                     const std::vector<double>& best_arm_prob, int num_arms);

// Descriptive check that the tail sub-optimality of an FA run settles within
// the accumulation band implied by the measured surrogate values.  ideal_kl
// holds the exact-weight KL surrogate evaluated at each returned iterate
// (the observable handle on the excess-risk and bias terms).  Never asserted:
// reports the band or the reason it is unavailable.
BoundReport neighbourhood_proxy(const std::vector<IterationRecord>& records,
                                const std::vector<double>& ideal_kl, double gamma,
                                double rho_min);

}  // namespace spma
