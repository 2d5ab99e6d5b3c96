#include "spma/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace spma {

namespace {

constexpr double kAdvMeanTol = 1e-8;
constexpr double kTieTol = 1e-9;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void clamp_tiny_negatives(Matrix& probs) {
  for (Eigen::Index s = 0; s < probs.rows(); ++s)
    for (Eigen::Index a = 0; a < probs.cols(); ++a)
      if (probs(s, a) < 0.0) probs(s, a) = 0.0;
}

// Bandit as a one-state MDP: gamma = 0, self-loop transitions, Q(a) = r(a).
TabularMdp bandit_mdp(const BanditInstance& bandit) {
  TabularMdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = bandit.num_arms();
  mdp.transition.assign(mdp.num_actions, Matrix::Ones(1, 1));
  mdp.reward = bandit.rewards.transpose();
  mdp.initial_dist = Vector::Ones(1);
  mdp.discount = 0.0;
  return mdp;
}

IterationRecord make_record(int t, double j, double subopt_inf, double subopt_rho,
                            const GapQuantities& gq, double eta, double gamma) {
  IterationRecord rec;
  rec.t = t;
  rec.j_value = j;
  rec.subopt_inf = subopt_inf;
  rec.subopt_rho = subopt_rho;
  rec.c_t = gq.c_t;
  rec.min_gap = gq.min_gap;
  rec.alpha_t = alpha_from_c(gq.c_t, eta, gamma);
  return rec;
}

}  // namespace

double BanditInstance::min_gap() const {
  const int star = best_arm();
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_arms(); ++a) {
    if (a == star) continue;
    gap = std::min(gap, rewards(star) - rewards(a));
  }
  return gap;
}

Policy spma_bandit_step(const Policy& pi, const Vector& rewards, double eta) {
  const double mean = (pi.probs.row(0) * rewards)(0);
  Policy out;
  out.probs = pi.probs.array() *
              (1.0 + eta * (rewards.transpose().array() - mean)).array();
  if ((out.probs.array() < -kProbFloorTol).any())
    throw StepSizeTooLarge("bandit step produced a negative probability; eta too large");
  clamp_tiny_negatives(out.probs);
  return out;
}

Policy spma_bandit_gap_step(const Policy& pi, const Vector& rewards) {
  const int K = static_cast<int>(rewards.size());
  Policy out;
  out.probs.resize(1, K);
  for (int a = 0; a < K; ++a) {
    double factor = 1.0;
    for (int b = 0; b < K; ++b) {
      if (b == a) continue;
      factor += pi.probs(0, b) * sign(rewards(a) - rewards(b));
    }
    out.probs(0, a) = pi.probs(0, a) * factor;
  }
  clamp_tiny_negatives(out.probs);
  return out;
}

Policy spma_step(const Policy& pi, const Matrix& adv, double eta) {
  for (Eigen::Index s = 0; s < pi.probs.rows(); ++s) {
    const double mean = pi.probs.row(s).dot(adv.row(s));
    if (std::abs(mean) > kAdvMeanTol)
      throw InconsistentAdvantage("advantage not zero-mean at state " + std::to_string(s) +
                                  " (residual " + std::to_string(mean) + ")");
  }
  Policy out;
  out.probs = pi.probs.array() * (1.0 + eta * adv.array());
  if ((out.probs.array() < -kProbFloorTol).any())
    throw StepSizeTooLarge("update produced a negative probability; eta too large");
  clamp_tiny_negatives(out.probs);
  return out;
}

Policy npg_step(const Policy& pi, const Matrix& adv, double eta) {
  Policy out;
  out.probs.resize(pi.probs.rows(), pi.probs.cols());
  for (Eigen::Index s = 0; s < pi.probs.rows(); ++s) {
    const RowVector scaled = eta * adv.row(s);
    const double m = scaled.maxCoeff();
    RowVector w = pi.probs.row(s).array() * (scaled.array() - m).exp();
    out.probs.row(s) = w / w.sum();
  }
  return out;
}

Policy mdpo_tabular_step(const Policy& pi, const Matrix& adv, double eta) {
  return npg_step(pi, adv, eta);
}

std::pair<Logits, Policy> spg_step(const Logits& z, const Policy& pi, const Matrix& adv,
                                   double eta) {
  const Policy from_logits = softmax_policy(z);
  const double mismatch = (from_logits.probs - pi.probs).cwiseAbs().maxCoeff();
  if (mismatch > 1e-9)
    throw LogitPolicyMismatch("policy disagrees with softmax of logits by " +
                              std::to_string(mismatch));
  Logits out;
  out.z = z.z + eta * (pi.probs.array() * adv.array()).matrix();
  return {out, softmax_policy(out)};
}

TabularRunResult run_tabular(const TabularMdp& mdp, const TabularRunConfig& cfg) {
  validate_mdp(mdp);
  if (cfg.iterations < 0) throw ConfigError("iterations must be nonnegative");
  if (cfg.method == Method::spma_bandit_gap)
    throw ConfigError("gap-dependent steps are bandit-only");
  const double eta = cfg.step_size;
  if (cfg.method == Method::spma && !(eta <= 0.999 * (1.0 - mdp.discount)))
    throw ConfigError("SPMA on MDPs requires eta <= 0.999 (1 - gamma)");
  if (!(eta >= 0.0)) throw ConfigError("step size must be nonnegative");

  TabularRunResult out;
  out.method = cfg.method;
  out.step_size = eta;

  const auto vi = value_iteration(mdp, 1e-10);
  // Polish the oracle: the greedy policy is exactly optimal once value
  // iteration is close, and its direct evaluation is machine-accurate.
  out.v_star = policy_evaluate(mdp, vi.pi_star).v;
  const double j_star = expected_return(mdp, out.v_star);

  Policy pi = cfg.init_policy ? *cfg.init_policy
                              : (cfg.init_logits ? softmax_policy(*cfg.init_logits)
                                                 : Policy::uniform(mdp.num_states, mdp.num_actions));
  Logits z;
  if (cfg.method == Method::spg) {
    if (cfg.init_logits) {
      z = *cfg.init_logits;
    } else if (cfg.init_policy) {
      z.z = cfg.init_policy->probs.array().log();
    } else {
      z.z = Matrix::Zero(mdp.num_states, mdp.num_actions);
    }
    pi = softmax_policy(z);
  }
  validate_policy(mdp, pi);

  for (int t = 0; t <= cfg.iterations; ++t) {
    const EvalResult eval = policy_evaluate(mdp, pi);
    const GapQuantities gq = gap_quantities(pi, eval.q, kTieTol);
    IterationRecord rec =
        make_record(t, expected_return(mdp, eval.v),
                    (out.v_star - eval.v).lpNorm<Eigen::Infinity>(),
                    j_star - expected_return(mdp, eval.v), gq, eta, mdp.discount);
    out.records.push_back(rec);
    out.values.push_back(eval.v);
    out.policies.push_back(pi);
    if (t == cfg.iterations) break;

    try {
      switch (cfg.method) {
        case Method::spma:
          pi = spma_step(pi, eval.adv, eta);
          break;
        case Method::npg:
          pi = npg_step(pi, eval.adv, eta);
          break;
        case Method::mdpo:
          pi = mdpo_tabular_step(pi, eval.adv, eta);
          break;
        case Method::spg: {
          auto [z_next, pi_next] = spg_step(z, pi, eval.adv, eta);
          z = std::move(z_next);
          pi = std::move(pi_next);
          break;
        }
        case Method::spma_bandit_gap:
          break;  // rejected above
      }
    } catch (const Error& err) {
      throw Error("iteration " + std::to_string(t) + ": " + err.what());
    }
  }

  // The contraction bound for the step t -> t+1 uses alpha_t of record t.
  if (cfg.method == Method::spma) {
    for (std::size_t t = 0; t + 1 < out.records.size(); ++t) {
      out.records[t].bound_ok = out.records[t + 1].subopt_inf <=
                                out.records[t].alpha_t * out.records[t].subopt_inf + 1e-10;
    }
  }
  return out;
}

BanditRunResult run_bandit(const BanditInstance& bandit, const TabularRunConfig& cfg) {
  const int K = bandit.num_arms();
  if (K < 1) throw ConfigError("bandit needs at least one arm");
  if (cfg.iterations < 0) throw ConfigError("iterations must be nonnegative");
  const double eta = cfg.step_size;
  if (cfg.method == Method::spma && !(eta <= 1.0))
    throw ConfigError("bandit SPMA requires eta <= 1");

  const TabularMdp mdp = bandit_mdp(bandit);
  const int star = bandit.best_arm();
  const double r_star = bandit.rewards(star);

  BanditRunResult out;
  out.method = cfg.method;
  out.step_size = eta;

  Policy pi = cfg.init_policy ? *cfg.init_policy : Policy::uniform(1, K);
  Logits z;
  if (cfg.method == Method::spg) {
    if (cfg.init_logits) {
      z = *cfg.init_logits;
    } else if (cfg.init_policy) {
      z.z = cfg.init_policy->probs.array().log();
    } else {
      z.z = Matrix::Zero(1, K);
    }
    pi = softmax_policy(z);
  }

  for (int t = 0; t <= cfg.iterations; ++t) {
    const double j = pi.probs.row(0).dot(bandit.rewards);
    // Roundoff can push <pi, r> a hair past r(a*) once the policy saturates.
    const double subopt = std::max(0.0, r_star - j);
    const Matrix q = bandit.rewards.transpose();
    const GapQuantities gq = gap_quantities(pi, q, kTieTol);
    IterationRecord rec = make_record(t, j, subopt, subopt, gq, eta, 0.0);
    out.records.push_back(rec);
    out.policies.push_back(pi);
    out.best_arm_prob.push_back(pi.probs(0, star));
    if (t == cfg.iterations) break;

    const Matrix adv = q.array() - j;
    try {
      switch (cfg.method) {
        case Method::spma:
          pi = spma_bandit_step(pi, bandit.rewards, eta);
          break;
        case Method::spma_bandit_gap:
          pi = spma_bandit_gap_step(pi, bandit.rewards);
          break;
        case Method::npg:
        case Method::mdpo:
          pi = npg_step(pi, adv, eta);
          break;
        case Method::spg: {
          auto [z_next, pi_next] = spg_step(z, pi, adv, eta);
          z = std::move(z_next);
          pi = std::move(pi_next);
          break;
        }
      }
    } catch (const Error& err) {
      throw Error("iteration " + std::to_string(t) + ": " + err.what());
    }
  }

  // Rate bounds are claimed from uniform initialization only.
  if (!cfg.init_policy && !cfg.init_logits && K >= 2) {
    const double base = 1.0 - 1.0 / K;
    const double gap = bandit.min_gap();
    for (auto& rec : out.records) {
      if (cfg.method == Method::spma && eta <= 1.0) {
        rec.bound_ok = rec.subopt_rho <=
                       base * std::exp(-eta * gap * rec.t / K) + 1e-12;
      } else if (cfg.method == Method::spma_bandit_gap) {
        rec.bound_ok =
            rec.subopt_rho <= std::pow(base, std::exp2(static_cast<double>(rec.t))) + 1e-12;
      }
    }
  }
  return out;
}

}  // namespace spma
