#include "spma/linear_fa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "spma/rng.hpp"

namespace spma {

namespace {

constexpr double kTieTol = 1e-9;
constexpr double kWarmGrowth = 1.8;

Matrix logits_by_state(const FeatureMap& features, const Vector& theta, int num_states,
                       int num_actions) {
  if (features.x.rows() != static_cast<Eigen::Index>(num_states) * num_actions)
    throw ConfigError("feature matrix rows do not match S * A");
  if (features.x.cols() != theta.size())
    throw ConfigError("feature dimension does not match parameter length");
  const Vector flat = features.x * theta;
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(flat.data(), num_states,
                                                          num_actions);
}

// Row-wise log-softmax; returns log q with the normalizer already removed.
Matrix log_softmax_rows(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index s = 0; s < z.rows(); ++s) {
    const double m = z.row(s).maxCoeff();
    const double lse = m + std::log((z.row(s).array() - m).exp().sum());
    out.row(s) = z.row(s).array() - lse;
  }
  return out;
}

double entropy_row(const RowVector& p) {
  double h = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a)
    if (p(a) > 0.0) h -= p(a) * std::log(p(a));
  return h;
}

struct FaLoopHooks {
  // Returns theta_next and the final inner objective value (empty for
  // methods that do not minimize a surrogate).
  std::function<std::pair<Vector, std::optional<double>>(
      const Policy& pi_t, const Matrix& targets, const Vector& weights, const Matrix& adv,
      const Vector& theta)>
      inner_solve;
  // Which per-iteration inputs the method consumes.  Methods whose step
  // sizes may exceed the SPMA range must not trip target validation for
  // rows they never read.
  bool needs_targets = true;
  bool needs_weights = true;
  bool record_ideal_kl = true;
};

void validate_fa_config(const TabularMdp& mdp, const FaRunConfig& cfg, bool needs_eta_cap) {
  if (cfg.outer_iters < 0) throw ConfigError("outer_iters must be nonnegative");
  if (cfg.inner_iters < 0) throw ConfigError("inner_iters must be nonnegative");
  if (needs_eta_cap && !(cfg.outer_step_size <= 1.0 - mdp.discount))
    throw ConfigError("outer step size must satisfy eta <= 1 - gamma");
  if (!(cfg.outer_step_size >= 0.0)) throw ConfigError("outer step size must be nonnegative");
  if (cfg.state_mode == StateMode::sampled && cfg.sample_count < 1)
    throw ConfigError("sampled state mode needs sample_count >= 1");
  if (cfg.advantage_mode == AdvantageMode::noisy && cfg.approx_error < 0.0)
    throw ConfigError("approx_error must be nonnegative");
}

FaRunResult run_fa_loop(const TabularMdp& mdp, const FeatureMap& features,
                        const FaRunConfig& cfg, Method method, const FaLoopHooks& hooks) {
  validate_mdp(mdp);
  const int S = mdp.num_states;
  const int A = mdp.num_actions;

  FaRunResult out;
  out.method = method;
  out.step_size = cfg.outer_step_size;
  out.rho_min = mdp.initial_dist.minCoeff();

  const auto vi = value_iteration(mdp, 1e-10);
  out.v_star = policy_evaluate(mdp, vi.pi_star).v;
  const double j_star = expected_return(mdp, out.v_star);

  Vector theta = Vector::Zero(features.dim());

  for (int t = 0; t <= cfg.outer_iters; ++t) {
    const Policy pi = log_linear_policy(features, {theta}, S, A);
    const EvalResult eval = policy_evaluate(mdp, pi);
    const GapQuantities gq = gap_quantities(pi, eval.q, kTieTol);

    IterationRecord rec;
    rec.t = t;
    rec.j_value = expected_return(mdp, eval.v);
    rec.subopt_inf = (out.v_star - eval.v).lpNorm<Eigen::Infinity>();
    rec.subopt_rho = j_star - rec.j_value;
    rec.c_t = gq.c_t;
    rec.min_gap = gq.min_gap;
    rec.alpha_t = alpha_from_c(gq.c_t, cfg.outer_step_size, mdp.discount);

    out.policies.push_back(pi);
    out.thetas.push_back(theta);
    if (t == cfg.outer_iters) {
      out.records.push_back(rec);
      break;
    }

    Matrix adv = eval.adv;
    Matrix targets;
    Vector weights;
    if (hooks.needs_weights) {
      if (cfg.advantage_mode == AdvantageMode::noisy) {
        adv = noisy_advantage(eval.adv, cfg.approx_error, mdp.discount,
                              derive_seed(cfg.noise_seed, static_cast<std::uint64_t>(t)));
      }
      if (hooks.needs_targets) targets = spma_target(pi, adv, cfg.outer_step_size);
      if (cfg.state_mode == StateMode::exact_occupancy) {
        weights = occupancy(mdp, pi).d;
      } else {
        const auto states =
            sample_states(mdp, pi, cfg.sample_count,
                          derive_seed(cfg.sample_seed, static_cast<std::uint64_t>(t)));
        weights = Vector::Zero(S);
        for (int s : states) weights(s) += 1.0 / cfg.sample_count;
      }
    }

    auto [theta_next, final_value] = hooks.inner_solve(pi, targets, weights, adv, theta);
    rec.surrogate_final = final_value;

    if (hooks.record_ideal_kl) {
      // Exact-weight surrogate in KL form at the returned iterate: the
      // observable handle on excess risk + bias.
      const Vector exact_w = cfg.state_mode == StateMode::exact_occupancy
                                 ? weights
                                 : occupancy(mdp, pi).d;
      SurrogateProblem ideal{exact_w, targets, features};
      const double ce = spma_surrogate({theta_next}, ideal).value;
      double hbar = 0.0;
      for (int s = 0; s < S; ++s)
        if (exact_w(s) > 0.0) hbar += exact_w(s) * entropy_row(targets.row(s));
      out.ideal_kl.push_back(ce - hbar);

      if (cfg.estimate_surrogate_gap) {
        ArmijoConfig long_cfg = cfg.armijo;
        double best = std::numeric_limits<double>::infinity();
        const Vector starts[3] = {theta_next, theta, Vector::Zero(features.dim())};
        for (const Vector& start : starts) {
          double warm = long_cfg.init_step;
          const Vector candidate = inner_loop_minimize(ideal, start, 2000, long_cfg, &warm);
          best = std::min(best, spma_surrogate({candidate}, ideal).value);
        }
        rec.surrogate_gap = ce - best;
      }
    }

    out.records.push_back(rec);
    theta = std::move(theta_next);
  }
  return out;
}

}  // namespace

Policy log_linear_policy(const FeatureMap& features, const LinearPolicyParams& params,
                         int num_states, int num_actions) {
  Logits z{logits_by_state(features, params.theta, num_states, num_actions)};
  return softmax_policy(z);
}

Matrix spma_target(const Policy& pi, const Matrix& adv, double eta) {
  Matrix target = pi.probs.array() * (1.0 + eta * adv.array());
  if ((target.array() < -kProbFloorTol).any())
    throw InvalidTarget("target row has a negative entry; step size too large for the "
                        "advantage range");
  target = target.cwiseMax(0.0);
  for (Eigen::Index s = 0; s < target.rows(); ++s) {
    const double sum = target.row(s).sum();
    if (!(sum > 0.0)) throw InvalidTarget("target row " + std::to_string(s) + " sums to zero");
    target.row(s) /= sum;
  }
  return target;
}

ValueGrad spma_surrogate(const LinearPolicyParams& params, const SurrogateProblem& prob) {
  const int S = static_cast<int>(prob.targets.rows());
  const int A = static_cast<int>(prob.targets.cols());
  const Matrix z = logits_by_state(prob.features, params.theta, S, A);
  const Matrix log_q = log_softmax_rows(z);

  ValueGrad out;
  out.value = 0.0;
  Vector g = Vector::Zero(static_cast<Eigen::Index>(S) * A);
  for (int s = 0; s < S; ++s) {
    const double w = prob.state_weights(s);
    if (w <= 0.0) continue;
    double ce = 0.0;
    for (int a = 0; a < A; ++a) {
      const double p = prob.targets(s, a);
      if (p > 0.0) ce -= p * log_q(s, a);
      g(static_cast<Eigen::Index>(s) * A + a) = w * (std::exp(log_q(s, a)) - p);
    }
    out.value += w * ce;
  }
  out.gradient = prob.features.x.transpose() * g;
  return out;
}

ValueGrad mdpo_surrogate(const LinearPolicyParams& params, const Policy& pi_t,
                         const Matrix& adv, double eta, const Vector& state_weights,
                         const FeatureMap& features) {
  const int S = static_cast<int>(pi_t.probs.rows());
  const int A = static_cast<int>(pi_t.probs.cols());
  const Matrix z = logits_by_state(features, params.theta, S, A);
  const Matrix log_q = log_softmax_rows(z);

  ValueGrad out;
  out.value = 0.0;
  Vector g = Vector::Zero(static_cast<Eigen::Index>(S) * A);
  for (int s = 0; s < S; ++s) {
    const double w = state_weights(s);
    if (w <= 0.0) continue;
    double value_s = 0.0;
    double mean_c = 0.0;
    RowVector q(A), c(A);
    for (int a = 0; a < A; ++a) {
      q(a) = std::exp(log_q(s, a));
      c(a) = log_q(s, a) - std::log(pi_t.probs(s, a)) - eta * adv(s, a);
      value_s += q(a) * c(a);
      mean_c += q(a) * c(a);
    }
    out.value += w * value_s;
    for (int a = 0; a < A; ++a)
      g(static_cast<Eigen::Index>(s) * A + a) = w * q(a) * (c(a) - mean_c);
  }
  out.gradient = features.x.transpose() * g;
  return out;
}

LineSearchResult armijo_search(const std::function<double(const Vector&)>& objective,
                               const Vector& theta, const Vector& grad,
                               const ArmijoConfig& cfg) {
  const double f0 = objective(theta);
  const double grad_sq = grad.squaredNorm();
  double step = cfg.init_step;
  for (int k = 0; k <= cfg.max_backtracks; ++k) {
    const double f1 = objective(theta - step * grad);
    if (f1 <= f0 - cfg.sufficient_decrease_c * step * grad_sq) return {step, false};
    step *= cfg.shrink_factor;
  }
  return {0.0, true};
}

namespace {

// One Armijo-backtracked gradient step from `from`.  Returns the accepted
// step size (0 when the search is exhausted) and fills `out`.
double armijo_gd_step(const std::function<ValueGrad(const Vector&)>& objective,
                      const Vector& from, const ValueGrad& at_from, double init,
                      const ArmijoConfig& cfg, Vector& out, double& f_out) {
  const double grad_sq = at_from.gradient.squaredNorm();
  double step = init;
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    out = from - step * at_from.gradient;
    f_out = objective(out).value;
    if (f_out <= at_from.value - cfg.sufficient_decrease_c * step * grad_sq) return step;
    step *= cfg.shrink_factor;
  }
  return 0.0;
}

}  // namespace

// Armijo-backtracked gradient steps taken from Nesterov-extrapolated points
// (monotone FISTA): the candidate step always feeds the extrapolation
// sequence, while the returned iterate only moves when the objective
// decreases.  Plain descent contracts badly scaled state weights far too
// slowly for the inner-loop budgets used here; this keeps the accelerated
// rate and the non-increasing surrogate value.
Vector minimize_with_armijo(const std::function<ValueGrad(const Vector&)>& objective,
                            const Vector& theta0, int iters, const ArmijoConfig& cfg,
                            double* warm_step) {
  Vector x = theta0;  // monotone iterate
  Vector y = theta0;  // extrapolated point
  double f_x = std::numeric_limits<double>::infinity();
  double t_k = 1.0;
  double init = warm_step ? *warm_step : cfg.init_step;

  for (int k = 0; k < iters; ++k) {
    ValueGrad vg_y = objective(y);
    if (f_x == std::numeric_limits<double>::infinity())
      f_x = (y - x).squaredNorm() == 0.0 ? vg_y.value : objective(x).value;

    Vector candidate;
    double f_candidate = std::numeric_limits<double>::infinity();
    double accepted = armijo_gd_step(objective, y, vg_y, init, cfg, candidate, f_candidate);
    if (accepted == 0.0) {
      // Search exhausted at the extrapolated point: restart momentum at the
      // monotone iterate and retry once.
      t_k = 1.0;
      y = x;
      vg_y = objective(x);
      f_x = vg_y.value;
      if (vg_y.gradient.squaredNorm() == 0.0) break;
      accepted = armijo_gd_step(objective, x, vg_y, init, cfg, candidate, f_candidate);
      if (accepted == 0.0) break;  // keep the current iterate
    }
    init = kWarmGrowth * accepted;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
    const Vector x_old = x;
    if (f_candidate <= f_x) {
      x = candidate;
      f_x = f_candidate;
    }
    y = x + (t_k / t_next) * (candidate - x) + ((t_k - 1.0) / t_next) * (x - x_old);
    t_k = t_next;
  }
  if (warm_step) *warm_step = init;
  return x;
}

Vector inner_loop_minimize(const SurrogateProblem& prob, const Vector& theta0, int iters,
                           const ArmijoConfig& cfg, double* warm_step) {
  return minimize_with_armijo(
      [&prob](const Vector& theta) { return spma_surrogate({theta}, prob); }, theta0, iters,
      cfg, warm_step);
}

std::vector<int> sample_states(const TabularMdp& mdp, const Policy& pi, int n,
                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) {
    int s = rng.categorical(mdp.initial_dist);
    while (rng.uniform() >= 1.0 - mdp.discount) {
      const int a = rng.categorical(pi.probs.row(s));
      s = rng.categorical(mdp.transition[a].row(s));
    }
    states.push_back(s);
  }
  return states;
}

Matrix noisy_advantage(const Matrix& adv, double approx_error, double gamma,
                       std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / (1.0 - gamma);
  Matrix out(adv.rows(), adv.cols());
  for (Eigen::Index s = 0; s < adv.rows(); ++s) {
    for (Eigen::Index a = 0; a < adv.cols(); ++a) {
      const double noisy = adv(s, a) + rng.uniform(-approx_error, approx_error);
      out(s, a) = std::clamp(noisy, -bound, bound);
    }
  }
  return out;
}

Vector policy_gradient(const TabularMdp& mdp, const FeatureMap& features,
                       const LinearPolicyParams& params) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const Policy pi = log_linear_policy(features, params, S, A);
  const EvalResult eval = policy_evaluate(mdp, pi);
  const Vector d = occupancy(mdp, pi).d;

  Vector g(static_cast<Eigen::Index>(S) * A);
  const double scale = 1.0 / (1.0 - mdp.discount);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      g(static_cast<Eigen::Index>(s) * A + a) = scale * d(s) * pi.probs(s, a) * eval.adv(s, a);
  return features.x.transpose() * g;
}

FaRunResult run_spma_fa(const TabularMdp& mdp, const FeatureMap& features,
                        const FaRunConfig& cfg) {
  validate_fa_config(mdp, cfg, /*needs_eta_cap=*/true);
  FaLoopHooks hooks;
  double warm = cfg.armijo.init_step;
  hooks.inner_solve = [&](const Policy&, const Matrix& targets, const Vector& weights,
                          const Matrix&, const Vector& theta) {
    SurrogateProblem prob{weights, targets, features};
    Vector next = inner_loop_minimize(prob, theta, cfg.inner_iters, cfg.armijo, &warm);
    const std::optional<double> final_value = spma_surrogate({next}, prob).value;
    return std::make_pair(std::move(next), final_value);
  };
  return run_fa_loop(mdp, features, cfg, Method::spma, hooks);
}

FaRunResult run_mdpo_fa(const TabularMdp& mdp, const FeatureMap& features,
                        const FaRunConfig& cfg) {
  validate_fa_config(mdp, cfg, /*needs_eta_cap=*/false);
  FaLoopHooks hooks;
  hooks.needs_targets = false;
  hooks.record_ideal_kl = false;  // the excess-risk handle is tied to the SPMA surrogate
  double warm = cfg.armijo.init_step;
  hooks.inner_solve = [&](const Policy& pi_t, const Matrix&, const Vector& weights,
                          const Matrix& adv, const Vector& theta) {
    auto objective = [&](const Vector& th) {
      return mdpo_surrogate({th}, pi_t, adv, cfg.outer_step_size, weights, features);
    };
    Vector next = minimize_with_armijo(objective, theta, cfg.inner_iters, cfg.armijo, &warm);
    const std::optional<double> final_value = objective(next).value;
    return std::make_pair(std::move(next), final_value);
  };
  return run_fa_loop(mdp, features, cfg, Method::mdpo, hooks);
}

FaRunResult run_spg_fa(const TabularMdp& mdp, const FeatureMap& features,
                       const FaRunConfig& cfg) {
  validate_fa_config(mdp, cfg, /*needs_eta_cap=*/false);
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  FaLoopHooks hooks;
  hooks.needs_targets = false;
  hooks.needs_weights = false;
  hooks.record_ideal_kl = false;
  ArmijoConfig ls = cfg.armijo;
  // The grid step size is the Armijo trial step, restarted fresh every
  // iteration so that the grid value actually governs behaviour.
  ls.init_step = cfg.outer_step_size > 0.0 ? cfg.outer_step_size : cfg.armijo.init_step;
  hooks.inner_solve = [&, S, A](const Policy&, const Matrix&, const Vector&, const Matrix&,
                                const Vector& theta) {
    auto neg_j = [&](const Vector& th) {
      const Policy p = log_linear_policy(features, {th}, S, A);
      return -expected_return(mdp, policy_evaluate(mdp, p).v);
    };
    const Vector grad = -policy_gradient(mdp, features, {theta});  // gradient of -J
    const LineSearchResult res = armijo_search(neg_j, theta, grad, ls);
    Vector next = theta;
    if (!res.exhausted) next -= res.step * grad;
    return std::make_pair(std::move(next), std::optional<double>());
  };
  return run_fa_loop(mdp, features, cfg, Method::spg, hooks);
}

}  // namespace spma
