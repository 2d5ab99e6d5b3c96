#include "spma/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace spma {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kGreedyTieTol = 1e-9;

// P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Matrix policy_transition(const TabularMdp& mdp, const Policy& pi) {
  Matrix p = Matrix::Zero(mdp.num_states, mdp.num_states);
  for (int a = 0; a < mdp.num_actions; ++a) {
    p.noalias() += pi.probs.col(a).asDiagonal() * mdp.transition[a];
  }
  return p;
}

Vector policy_reward(const TabularMdp& mdp, const Policy& pi) {
  return (pi.probs.array() * mdp.reward.array()).rowwise().sum();
}

Vector bellman_optimality(const TabularMdp& mdp, const Vector& v) {
  Vector out(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double qsa = mdp.reward(s, a) + mdp.discount * mdp.transition[a].row(s).dot(v);
      best = std::max(best, qsa);
    }
    out(s) = best;
  }
  return out;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::spma: return "SPMA";
    case Method::npg: return "NPG";
    case Method::spg: return "SPG";
    case Method::mdpo: return "MDPO";
    case Method::spma_bandit_gap: return "SPMA_bandit_gap";
  }
  return "?";
}

void validate_mdp(const TabularMdp& mdp) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  if (S <= 0) throw InvalidMdp("num_states", 0, "must be positive");
  if (A <= 0) throw InvalidMdp("num_actions", 0, "must be positive");
  if (static_cast<int>(mdp.transition.size()) != A)
    throw InvalidMdp("transition", static_cast<long>(mdp.transition.size()),
                     "expected one S x S matrix per action");
  if (mdp.discount < 0.0 || mdp.discount >= 1.0)
    throw InvalidMdp("discount", 0, "must lie in [0, 1)");
  if (mdp.reward.rows() != S || mdp.reward.cols() != A)
    throw InvalidMdp("reward", 0, "shape mismatch");
  if (mdp.initial_dist.size() != S)
    throw InvalidMdp("initial_dist", mdp.initial_dist.size(), "length mismatch");

  for (int a = 0; a < A; ++a) {
    if (mdp.transition[a].rows() != S || mdp.transition[a].cols() != S)
      throw InvalidMdp("transition", a, "shape mismatch");
    for (int s = 0; s < S; ++s) {
      const auto row = mdp.transition[a].row(s);
      for (int t = 0; t < S; ++t) {
        if (!(row(t) >= -kProbFloorTol))
          throw InvalidMdp("transition", static_cast<long>(a) * S + s,
                           "negative probability " + std::to_string(row(t)));
      }
      const double sum = row.sum();
      if (std::abs(sum - 1.0) > kRowSumTol)
        throw InvalidMdp("transition", static_cast<long>(a) * S + s,
                         "row sums to " + std::to_string(sum));
    }
  }
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double r = mdp.reward(s, a);
      if (!(r >= 0.0 && r <= 1.0))
        throw InvalidMdp("reward", static_cast<long>(s) * A + a,
                         "entry " + std::to_string(r) + " outside [0, 1]");
    }
    if (!(mdp.initial_dist(s) >= -kProbFloorTol))
      throw InvalidMdp("initial_dist", s, "negative probability");
  }
  const double rho_sum = mdp.initial_dist.sum();
  if (std::abs(rho_sum - 1.0) > kRowSumTol)
    throw InvalidMdp("initial_dist", 0, "sums to " + std::to_string(rho_sum));
}

void validate_policy(const TabularMdp& mdp, const Policy& pi) {
  if (pi.probs.rows() != mdp.num_states || pi.probs.cols() != mdp.num_actions)
    throw InvalidPolicy("policy shape mismatch");
  for (int s = 0; s < mdp.num_states; ++s) {
    double sum = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double p = pi.probs(s, a);
      if (!(p >= -kProbFloorTol))
        throw InvalidPolicy("policy row " + std::to_string(s) + " has negative entry " +
                            std::to_string(p));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw InvalidPolicy("policy row " + std::to_string(s) + " sums to " + std::to_string(sum));
  }
}

Policy softmax_policy(const Logits& logits) {
  Policy pi;
  pi.probs.resize(logits.z.rows(), logits.z.cols());
  for (Eigen::Index s = 0; s < logits.z.rows(); ++s) {
    const double m = logits.z.row(s).maxCoeff();
    RowVector e = (logits.z.row(s).array() - m).exp();
    pi.probs.row(s) = e / e.sum();
  }
  return pi;
}

EvalResult policy_evaluate(const TabularMdp& mdp, const Policy& pi) {
  validate_policy(mdp, pi);
  const int S = mdp.num_states;
  const Matrix p_pi = policy_transition(mdp, pi);
  const Matrix system = Matrix::Identity(S, S) - mdp.discount * p_pi;
  Eigen::PartialPivLU<Matrix> lu(system);
  // I - gamma P_pi is strictly diagonally dominant for gamma < 1, so the
  // solve cannot fail; a degenerate factorization would indicate corrupt
  // inputs rather than a numerical edge case.
  EvalResult out;
  out.v = lu.solve(policy_reward(mdp, pi));
  if (!out.v.allFinite()) throw SingularSystem("policy evaluation solve produced non-finite values");
  out.q.resize(S, mdp.num_actions);
  for (int a = 0; a < mdp.num_actions; ++a) {
    out.q.col(a) = mdp.reward.col(a) + mdp.discount * (mdp.transition[a] * out.v);
  }
  out.adv = out.q.colwise() - out.v;
  return out;
}

Occupancy occupancy(const TabularMdp& mdp, const Policy& pi) {
  validate_policy(mdp, pi);
  const int S = mdp.num_states;
  const Matrix p_pi = policy_transition(mdp, pi);
  const Matrix system = (Matrix::Identity(S, S) - mdp.discount * p_pi).transpose();
  Occupancy out;
  out.d = Eigen::PartialPivLU<Matrix>(system).solve(
      ((1.0 - mdp.discount) * mdp.initial_dist).eval());
  if (!out.d.allFinite()) throw SingularSystem("occupancy solve produced non-finite values");
  return out;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double tol) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  ValueIterationResult out;
  Vector v = Vector::Zero(S);
  double residual = std::numeric_limits<double>::infinity();
  int iters = 0;
  while (residual > tol) {
    Vector next = bellman_optimality(mdp, v);
    residual = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    ++iters;
  }
  out.v_star = v;
  out.iterations = iters;
  out.pi_star.probs = Matrix::Zero(S, A);
  for (int s = 0; s < S; ++s) {
    RowVector q(A);
    for (int a = 0; a < A; ++a) {
      q(a) = mdp.reward(s, a) + mdp.discount * mdp.transition[a].row(s).dot(v);
    }
    const double best = q.maxCoeff();
    int ties = 0;
    for (int a = 0; a < A; ++a)
      if (q(a) >= best - kGreedyTieTol) ++ties;
    for (int a = 0; a < A; ++a)
      if (q(a) >= best - kGreedyTieTol) out.pi_star.probs(s, a) = 1.0 / ties;
  }
  return out;
}

double expected_return(const TabularMdp& mdp, const Vector& v) {
  return mdp.initial_dist.dot(v);
}

}  // namespace spma
