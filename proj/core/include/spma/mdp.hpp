#pragma once

#include <vector>

#include "spma/types.hpp"

namespace spma {

// Finite discounted MDP with rewards in [0, 1].  The transition tensor is
// stored action-major: transition[a] is the S x S row-stochastic matrix of
// P(s' | s, a).
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<Matrix> transition;
  Matrix reward;        // S x A
  Vector initial_dist;  // length S
  double discount = 0.0;
};

// Row-stochastic state x action probability table.
struct Policy {
  Matrix probs;

  static Policy uniform(int num_states, int num_actions) {
    Policy p;
    p.probs = Matrix::Constant(num_states, num_actions, 1.0 / num_actions);
    return p;
  }
};

// Unconstrained logits; softmax of each row reproduces a policy row.
struct Logits {
  Matrix z;
};

// Exact V, Q and advantage for one policy.
struct EvalResult {
  Vector v;    // length S
  Matrix q;    // S x A
  Matrix adv;  // S x A
};

// Discounted state-occupancy measure.
struct Occupancy {
  Vector d;
};

struct ValueIterationResult {
  Vector v_star;
  Policy pi_star;
  int iterations = 0;
};

// Throws InvalidMdp on the first violated invariant: transition rows and the
// initial distribution must be simplex rows (sum within 1e-12, entries above
// -1e-12), rewards must lie in [0, 1].
void validate_mdp(const TabularMdp& mdp);

// Throws InvalidPolicy unless probs is S x A, rows sum to 1 within 1e-10 and
// entries are above -1e-12.
void validate_policy(const TabularMdp& mdp, const Policy& pi);

// Row-wise softmax with per-row max subtraction.
Policy softmax_policy(const Logits& logits);

// Solves (I - gamma P_pi) V = r_pi by direct dense factorization and derives
// Q(s,a) = r(s,a) + gamma <P(.|s,a), V> and A = Q - V.
EvalResult policy_evaluate(const TabularMdp& mdp, const Policy& pi);

// d^T = (1 - gamma) rho^T (I - gamma P_pi)^{-1}.
Occupancy occupancy(const TabularMdp& mdp, const Policy& pi);

// Iterates the Bellman optimality operator until the sup-norm residual drops
// below tol; the greedy policy breaks ties uniformly over all actions within
// 1e-9 of the per-state maximum.
ValueIterationResult value_iteration(const TabularMdp& mdp, double tol);

// J = <rho, v>.
double expected_return(const TabularMdp& mdp, const Vector& v);

}  // namespace spma
