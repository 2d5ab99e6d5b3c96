#include "spma/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "spma/diagnostics.hpp"
#include "spma/envs.hpp"
#include "spma/experiment.hpp"
#include "spma/linear_fa.hpp"
#include "spma/mdp.hpp"
#include "spma/rng.hpp"
#include "spma/tabular.hpp"

namespace spma {

namespace {

// Regression bounds measured once with this implementation (criterion:
// iterations for exact-advantage SPMA at eta = 0.9 (1 - gamma) to reach
// sup-norm sub-optimality 1e-6); reruns must land within 10%.
constexpr long kSpmaItersCliff = 549;
constexpr long kSpmaItersLake = 109255;

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

CriterionResult run_timed(const std::string& id, const std::string& name,
                          const std::function<std::pair<bool, std::string>()>& body) {
  CriterionResult out;
  out.id = id;
  out.name = name;
  Timer timer;
  try {
    auto [pass, detail] = body();
    out.pass = pass;
    out.detail = detail;
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.seconds = timer.seconds();
  return out;
}

// Lean first-passage loop: iterations until ||V* - V_t||_inf <= threshold.
// Returns cap + 1 when the cap is hit.
long iterations_to_threshold(const TabularMdp& mdp, const Vector& v_star, Method method,
                             double eta, double threshold, long cap) {
  Policy pi = Policy::uniform(mdp.num_states, mdp.num_actions);
  Logits z{Matrix::Zero(mdp.num_states, mdp.num_actions)};
  for (long t = 0; t <= cap; ++t) {
    const EvalResult eval = policy_evaluate(mdp, pi);
    if ((v_star - eval.v).lpNorm<Eigen::Infinity>() <= threshold) return t;
    switch (method) {
      case Method::spma: pi = spma_step(pi, eval.adv, eta); break;
      case Method::npg: pi = npg_step(pi, eval.adv, eta); break;
      case Method::spg: {
        auto [zn, pn] = spg_step(z, pi, eval.adv, eta);
        z = std::move(zn);
        pi = std::move(pn);
        break;
      }
      default: throw ConfigError("unsupported method in first-passage loop");
    }
  }
  return cap + 1;
}

Vector oracle_v_star(const TabularMdp& mdp) {
  const auto vi = value_iteration(mdp, 1e-10);
  return policy_evaluate(mdp, vi.pi_star).v;
}

double policy_tv(const Policy& a, const Policy& b) {
  double worst = 0.0;
  for (Eigen::Index s = 0; s < a.probs.rows(); ++s)
    worst = std::max(worst, 0.5 * (a.probs.row(s) - b.probs.row(s)).lpNorm<1>());
  return worst;
}

// Small random MDP for the oracle checks; transitions are normalized
// uniform draws so every entry stays positive.
TabularMdp random_mdp(int S, int A, double gamma, Rng& rng) {
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.discount = gamma;
  mdp.transition.assign(A, Matrix::Zero(S, S));
  for (int a = 0; a < A; ++a)
    for (int s = 0; s < S; ++s) {
      double sum = 0.0;
      for (int t = 0; t < S; ++t) {
        mdp.transition[a](s, t) = 0.05 + rng.uniform();
        sum += mdp.transition[a](s, t);
      }
      mdp.transition[a].row(s) /= sum;
    }
  mdp.reward = Matrix::NullaryExpr(S, A, [&rng](Eigen::Index, Eigen::Index) {
    return rng.uniform();
  });
  mdp.initial_dist = Vector::Zero(S);
  double sum = 0.0;
  for (int s = 0; s < S; ++s) {
    mdp.initial_dist(s) = 0.1 + rng.uniform();
    sum += mdp.initial_dist(s);
  }
  mdp.initial_dist /= sum;
  return mdp;
}

Policy random_policy(int S, int A, Rng& rng) {
  Policy pi;
  pi.probs.resize(S, A);
  for (int s = 0; s < S; ++s) {
    double sum = 0.0;
    for (int a = 0; a < A; ++a) {
      pi.probs(s, a) = 0.05 + rng.uniform();
      sum += pi.probs(s, a);
    }
    pi.probs.row(s) /= sum;
  }
  return pi;
}

Vector random_vector(int n, double scale, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

FeatureMap random_features(int S, int A, int d, Rng& rng) {
  FeatureMap f;
  f.x = Matrix::NullaryExpr(static_cast<Eigen::Index>(S) * A, d,
                            [&rng](Eigen::Index, Eigen::Index) {
                              return 2.0 * rng.uniform() - 1.0;
                            });
  return f;
}

double relative_error(const Vector& got, const Vector& want) {
  const double denom = std::max(want.norm(), 1e-12);
  return (got - want).norm() / denom;
}

// --- criterion 1 -----------------------------------------------------------

std::pair<bool, std::string> criterion_bandit_linear() {
  const double gaps[] = {0.05, 0.2, 0.5};
  const double etas[] = {0.5, 1.0};
  int runs = 0;
  int violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const int K = 2 + i % 9;
    // Skip gap values that cannot fit K arms inside [0, 1].
    std::vector<double> feasible;
    for (double g : gaps)
      if ((K - 1) * g <= 1.0) feasible.push_back(g);
    const double min_gap = feasible[i % feasible.size()];
    const BanditInstance bandit = random_bandit(K, min_gap, 9000 + i);
    for (double eta : etas) {
      TabularRunConfig cfg;
      cfg.method = Method::spma;
      cfg.step_size = eta;
      cfg.iterations = 200;
      const BanditRunResult run = run_bandit(bandit, cfg);
      const BoundReport report =
          check_bandit_linear(run.records, K, bandit.min_gap(), eta);
      ++runs;
      if (!report.pass) ++violations;
      for (const auto& e : report.entries)
        worst_margin = std::min(worst_margin, e.bound - e.measured);
    }
  }
  std::string detail = std::to_string(runs) + " runs, " + std::to_string(violations) +
                       " violations, tightest margin " + fmt(worst_margin);
  return {violations == 0, detail};
}

// --- criterion 2 -----------------------------------------------------------

std::pair<bool, std::string> criterion_bandit_superlinear() {
  bool pass = true;
  std::string detail;
  for (int K : {2, 4, 8}) {
    const BanditInstance bandit = random_bandit(K, 0.1, 40 + K);
    TabularRunConfig cfg;
    cfg.method = Method::spma_bandit_gap;
    cfg.step_size = 0.0;
    cfg.iterations = 6;
    const BanditRunResult run = run_bandit(bandit, cfg);
    const BoundReport report = check_bandit_superlinear(run.records, run.best_arm_prob, K);
    double mass_err = 0.0;
    for (const Policy& pi : run.policies)
      mass_err = std::max(mass_err, std::abs(pi.probs.sum() - 1.0));
    const bool ok = report.pass && mass_err <= 1e-14;
    pass = pass && ok;
    detail += "K=" + std::to_string(K) + (ok ? " ok" : " FAIL") +
              " (mass err " + fmt(mass_err) + ") ";
  }
  return {pass, detail};
}

// --- criterion 3 -----------------------------------------------------------

std::pair<bool, std::string> criterion_contraction() {
  struct Case {
    const char* name;
    TabularMdp mdp;
  };
  Case cases[] = {{"cliff_world", cliff_world(0.9)}, {"frozen_lake", frozen_lake(0.99, false)}};
  bool pass = true;
  std::string detail;
  for (auto& c : cases) {
    const double eta = 0.9 * (1.0 - c.mdp.discount);
    TabularRunConfig cfg;
    cfg.method = Method::spma;
    cfg.step_size = eta;
    cfg.iterations = 500;
    const TabularRunResult run = run_tabular(c.mdp, cfg);
    const BoundReport report = check_theorem2(run.records, run.method, eta, c.mdp.discount);

    double worst_drop = 0.0;
    for (std::size_t t = 0; t + 1 < run.values.size(); ++t)
      worst_drop = std::max(worst_drop,
                            (run.values[t] - run.values[t + 1]).maxCoeff());
    const bool monotone = worst_drop <= 1e-10;
    const bool ok = report.applicable && report.pass && monotone;
    pass = pass && ok;
    detail += std::string(c.name) + (ok ? " ok" : " FAIL") + " (max V drop " +
              fmt(worst_drop) + ") ";
  }
  return {pass, detail};
}

// --- criterion 4 -----------------------------------------------------------

std::pair<bool, std::string> criterion_linear_convergence() {
  struct Case {
    const char* name;
    TabularMdp mdp;
    long frozen_spma_iters;
  };
  Case cases[] = {{"cliff_world", cliff_world(0.9), kSpmaItersCliff},
                  {"frozen_lake", frozen_lake(0.99, false), kSpmaItersLake}};
  const double threshold = 1e-6;
  bool pass = true;
  std::string detail;
  for (auto& c : cases) {
    const double gamma = c.mdp.discount;
    const double eta = 0.9 * (1.0 - gamma);
    const Vector v_star = oracle_v_star(c.mdp);
    const long cap = 4'000'000;

    const long t_spma = iterations_to_threshold(c.mdp, v_star, Method::spma, eta,
                                                threshold, cap);
    const long t_npg = iterations_to_threshold(c.mdp, v_star, Method::npg, eta, threshold,
                                               2 * t_spma);
    bool ok = t_spma <= cap && t_npg <= 2 * t_spma;

    if (c.frozen_spma_iters < 0) {
      ok = false;
      detail += std::string(c.name) + " UNPINNED (measured SPMA iters " +
                std::to_string(t_spma) + ") ";
    } else {
      const double lo = 0.9 * static_cast<double>(c.frozen_spma_iters);
      const double hi = 1.1 * static_cast<double>(c.frozen_spma_iters);
      ok = ok && static_cast<double>(t_spma) >= lo && static_cast<double>(t_spma) <= hi;
    }

    // Constant-step SPG from the scaled grid must still be above threshold
    // when both mirror-ascent methods have already converged.
    const long n_budget = std::max(t_spma, t_npg);
    long best_spg = std::numeric_limits<long>::max();
    for (double raw : {0.3, 0.5, 0.7, 0.9, 1.0}) {
      const long t_spg = iterations_to_threshold(c.mdp, v_star, Method::spg,
                                                 raw * (1.0 - gamma), threshold, n_budget);
      best_spg = std::min(best_spg, t_spg);
    }
    const bool spg_slower = best_spg > n_budget;
    ok = ok && spg_slower;
    pass = pass && ok;
    detail += std::string(c.name) + (ok ? " ok" : " FAIL") + " (SPMA " +
              std::to_string(t_spma) + ", NPG " + std::to_string(t_npg) + ", SPG >" +
              std::to_string(n_budget) + (spg_slower ? "" : " VIOLATED") + ") ";
  }
  return {pass, detail};
}

// --- criterion 5 -----------------------------------------------------------

FaRunConfig onehot_exact_config(double eta) {
  FaRunConfig cfg;
  cfg.outer_step_size = eta;
  cfg.inner_iters = 200;
  cfg.outer_iters = 50;
  return cfg;
}

std::pair<bool, std::string> criterion_fa_tabular_equivalence() {
  const TabularMdp mdp = cliff_world(0.9);
  const double eta = 0.9 * (1.0 - mdp.discount);
  const FeatureMap features = one_hot_features(mdp.num_states, mdp.num_actions);

  TabularRunConfig tab_cfg;
  tab_cfg.method = Method::spma;
  tab_cfg.step_size = eta;
  tab_cfg.iterations = 50;
  const TabularRunResult tab = run_tabular(mdp, tab_cfg);

  const FaRunResult fa = run_spma_fa(mdp, features, onehot_exact_config(eta));

  double worst = 0.0;
  for (std::size_t t = 0; t < tab.policies.size() && t < fa.policies.size(); ++t)
    worst = std::max(worst, policy_tv(tab.policies[t], fa.policies[t]));
  const bool pass = worst <= 1e-6;

  std::string detail = "max per-state TV " + fmt(worst) + " over 51 iterates (m = 200)";
  if (!pass) {
    // Diagnose whether the pipeline or only the inner budget is at fault:
    // rerun with a ten-fold inner budget.
    FaRunConfig diag = onehot_exact_config(eta);
    diag.inner_iters = 2000;
    const FaRunResult wide = run_spma_fa(mdp, features, diag);
    double worst_wide = 0.0;
    for (std::size_t t = 0; t < tab.policies.size() && t < wide.policies.size(); ++t)
      worst_wide = std::max(worst_wide, policy_tv(tab.policies[t], wide.policies[t]));
    detail += "; diagnostic rerun at m = 2000: TV " + fmt(worst_wide) +
              (worst_wide <= 1e-6 ? " (tolerance met, inner budget is the binding limit)" : "");
  }
  return {pass, detail};
}

// --- criterion 6 -----------------------------------------------------------

std::pair<bool, std::string> criterion_gradient_oracles() {
  Rng rng(123456);
  const double h = 1e-6;
  double worst_spma = 0.0, worst_mdpo = 0.0, worst_spg = 0.0;

  for (int problem = 0; problem < 5; ++problem) {
    const int S = 3 + static_cast<int>(rng.next() % 4);
    const int A = 2 + static_cast<int>(rng.next() % 2);
    const int d = 4 + static_cast<int>(rng.next() % 5);
    const TabularMdp mdp = random_mdp(S, A, 0.8 + 0.15 * rng.uniform(), rng);
    const FeatureMap features = random_features(S, A, d, rng);

    const Policy pi_t = random_policy(S, A, rng);
    const EvalResult eval = policy_evaluate(mdp, pi_t);
    const double eta = 0.5 * (1.0 - mdp.discount);
    const Matrix targets = spma_target(pi_t, eval.adv, eta);
    const Vector weights = occupancy(mdp, pi_t).d;
    const SurrogateProblem prob{weights, targets, features};

    auto fd_gradient = [&](const std::function<double(const Vector&)>& f, const Vector& at) {
      Vector g(at.size());
      for (int i = 0; i < at.size(); ++i) {
        Vector lo = at, hi = at;
        hi(i) += h;
        lo(i) -= h;
        g(i) = (f(hi) - f(lo)) / (2.0 * h);
      }
      return g;
    };

    for (int trial = 0; trial < 20; ++trial) {
      const Vector theta = random_vector(d, 1.0, rng);

      const ValueGrad sg = spma_surrogate({theta}, prob);
      worst_spma = std::max(
          worst_spma,
          relative_error(sg.gradient,
                         fd_gradient([&](const Vector& th) {
                           return spma_surrogate({th}, prob).value;
                         }, theta)));

      const ValueGrad mg = mdpo_surrogate({theta}, pi_t, eval.adv, eta, weights, features);
      worst_mdpo = std::max(
          worst_mdpo,
          relative_error(mg.gradient,
                         fd_gradient([&](const Vector& th) {
                           return mdpo_surrogate({th}, pi_t, eval.adv, eta, weights, features)
                               .value;
                         }, theta)));

      const Vector jg = policy_gradient(mdp, features, {theta});
      worst_spg = std::max(
          worst_spg,
          relative_error(jg, fd_gradient([&](const Vector& th) {
                           const Policy p = log_linear_policy(features, {th}, S, A);
                           return expected_return(mdp, policy_evaluate(mdp, p).v);
                         }, theta)));
    }
  }
  const bool pass = worst_spma <= 1e-5 && worst_mdpo <= 1e-5 && worst_spg <= 1e-4;
  return {pass, "rel err: surrogate " + fmt(worst_spma) + ", mirror-descent " +
                    fmt(worst_mdpo) + ", policy gradient " + fmt(worst_spg)};
}

// --- criterion 7 -----------------------------------------------------------

std::pair<bool, std::string> criterion_convexity() {
  Rng rng(7777);
  double worst = -std::numeric_limits<double>::infinity();
  int checks = 0;
  while (checks < 1000) {
    const int S = 2 + static_cast<int>(rng.next() % 4);
    const int A = 2 + static_cast<int>(rng.next() % 3);
    const int d = 3 + static_cast<int>(rng.next() % 6);
    const FeatureMap features = random_features(S, A, d, rng);
    const Policy targets = random_policy(S, A, rng);
    Vector w(S);
    double sum = 0.0;
    for (int s = 0; s < S; ++s) {
      w(s) = rng.uniform();
      sum += w(s);
    }
    w /= sum;
    const SurrogateProblem prob{w, targets.probs, features};
    for (int i = 0; i < 20 && checks < 1000; ++i, ++checks) {
      const Vector t1 = random_vector(d, 3.0, rng);
      const Vector t2 = random_vector(d, 3.0, rng);
      const double lam = rng.uniform();
      const double mid = spma_surrogate({lam * t1 + (1.0 - lam) * t2}, prob).value;
      const double chord = lam * spma_surrogate({t1}, prob).value +
                           (1.0 - lam) * spma_surrogate({t2}, prob).value;
      worst = std::max(worst, mid - chord);
    }
  }
  return {worst <= 1e-10, "1000 checks, max convexity violation " + fmt(worst)};
}

// --- criterion 8 -----------------------------------------------------------

std::pair<bool, std::string> criterion_sampler() {
  struct Case {
    const char* name;
    TabularMdp mdp;
  };
  Case cases[] = {{"two_state_chain", two_state_chain(0.5)},
                  {"frozen_lake", frozen_lake(0.99, true)}};
  const int n = 1'000'000;
  bool pass = true;
  std::string detail;
  for (auto& c : cases) {
    const Policy pi = Policy::uniform(c.mdp.num_states, c.mdp.num_actions);
    const Vector d = occupancy(c.mdp, pi).d;
    const auto states = sample_states(c.mdp, pi, n, 20240 + c.mdp.num_states);
    Vector freq = Vector::Zero(c.mdp.num_states);
    for (int s : states) freq(s) += 1.0 / n;
    double worst_sigma = 0.0;
    for (int s = 0; s < c.mdp.num_states; ++s) {
      const double se = std::sqrt(std::max(d(s) * (1.0 - d(s)), 1e-300) / n);
      worst_sigma = std::max(worst_sigma, std::abs(freq(s) - d(s)) / se);
    }
    const bool ok = worst_sigma <= 3.0;
    pass = pass && ok;
    detail += std::string(c.name) + (ok ? " ok" : " FAIL") + " (max " + fmt(worst_sigma) +
              " sigma) ";
  }
  return {pass, detail};
}

// --- criterion 9 -----------------------------------------------------------

std::pair<bool, std::string> criterion_fa_qualitative() {
  const TabularMdp mdp = cliff_world(0.9);
  const double gamma = mdp.discount;
  const FeatureMap features = tile_coding(cliff_world_grid(), mdp.num_actions, 2, 2);
  const std::vector<double> raw_grid = {0.3, 0.5, 0.7, 0.9, 1.0};
  const std::vector<std::uint64_t> seeds = {11, 12, 13, 14, 15};
  const int outer_iters = 200;

  // AUC per (method, eta, seed) at the scaled grid; exact advantages,
  // sampled states (n = 512 per outer iteration).
  auto run_one = [&](Method method, double raw, std::uint64_t seed) {
    FaRunConfig cfg;
    cfg.inner_iters = 25;
    cfg.outer_iters = outer_iters;
    cfg.state_mode = StateMode::sampled;
    cfg.sample_count = 512;
    cfg.sample_seed = derive_seed(seed, 2);
    const double scaled = raw * (1.0 - gamma);
    switch (method) {
      case Method::spma:
        cfg.outer_step_size = std::min(raw, 0.999) * (1.0 - gamma);
        return curve_auc(run_spma_fa(mdp, features, cfg).records);
      case Method::mdpo:
        cfg.outer_step_size = scaled;
        return curve_auc(run_mdpo_fa(mdp, features, cfg).records);
      case Method::spg:
        cfg.outer_step_size = scaled;
        return curve_auc(run_spg_fa(mdp, features, cfg).records);
      default: throw ConfigError("unexpected method");
    }
  };

  auto best_auc_per_seed = [&](Method method) {
    double best_mean = -std::numeric_limits<double>::infinity();
    std::vector<double> best;
    for (double raw : raw_grid) {
      std::vector<double> aucs;
      double mean = 0.0;
      for (std::uint64_t seed : seeds) {
        aucs.push_back(run_one(method, raw, seed));
        mean += aucs.back();
      }
      mean /= aucs.size();
      if (mean > best_mean) {
        best_mean = mean;
        best = aucs;
      }
    }
    return best;
  };

  const auto spma = best_auc_per_seed(Method::spma);
  const auto mdpo = best_auc_per_seed(Method::mdpo);
  const auto spg = best_auc_per_seed(Method::spg);

  auto mean_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / v.size();
  };
  // Standard error of the paired per-seed differences.
  auto diff_se = [](const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      var += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
    return std::sqrt(var / (n - 1) / n);
  };

  const double m_spma = mean_of(spma), m_mdpo = mean_of(mdpo), m_spg = mean_of(spg);
  const double se_sm = diff_se(spma, mdpo);
  const double se_ss = diff_se(spma, spg);
  const double se_ms = diff_se(mdpo, spg);

  const bool spma_vs_mdpo = m_spma >= m_mdpo - se_sm;
  const bool spma_vs_spg = m_spma - m_spg > 2.0 * se_ss;
  const bool mdpo_vs_spg = m_mdpo - m_spg > 2.0 * se_ms;
  const bool pass = spma_vs_mdpo && spma_vs_spg && mdpo_vs_spg;
  return {pass, "mean AUC: SPMA " + fmt(m_spma) + ", MDPO " + fmt(m_mdpo) + ", SPG " +
                    fmt(m_spg) + "; se(SPMA-MDPO) " + fmt(se_sm) + ", se(SPMA-SPG) " +
                    fmt(se_ss) + ", se(MDPO-SPG) " + fmt(se_ms)};
}

// --- criterion 10 ----------------------------------------------------------

std::pair<bool, std::string> criterion_noise_robustness() {
  const TabularMdp mdp = cliff_world(0.9);
  const double eta = 0.9 * (1.0 - mdp.discount);
  const FeatureMap features = one_hot_features(mdp.num_states, mdp.num_actions);
  const double inv = 1.0 / (1.0 - mdp.discount);
  const double levels[] = {0.0, 0.05 * inv, 0.1 * inv};
  const std::vector<std::uint64_t> seeds = {21, 22, 23, 24, 25};

  // Exact-mode reference (criterion 5's configuration).
  const FaRunResult exact = run_spma_fa(mdp, features, onehot_exact_config(eta));

  // The noise-level comparison runs past the transient so that final values
  // sit on their plateaus; T is otherwise unconstrained here.  The zero-noise
  // run's t <= 50 prefix must coincide with the exact run.
  const int compare_iters = 200;
  double mean_final[3] = {0.0, 0.0, 0.0};
  double zero_mismatch = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int reps = level == 0 ? 1 : static_cast<int>(seeds.size());
    for (int r = 0; r < reps; ++r) {
      FaRunConfig cfg = onehot_exact_config(eta);
      cfg.outer_iters = compare_iters;
      cfg.advantage_mode = AdvantageMode::noisy;
      cfg.approx_error = levels[level];
      cfg.noise_seed = derive_seed(seeds[r], 1);
      const FaRunResult run = run_spma_fa(mdp, features, cfg);
      mean_final[level] += run.records.back().subopt_rho / reps;
      if (level == 0) {
        for (std::size_t t = 0; t < exact.policies.size(); ++t)
          zero_mismatch = std::max(zero_mismatch,
                                   policy_tv(run.policies[t], exact.policies[t]));
      }
    }
  }
  const bool monotone = mean_final[0] <= mean_final[1] + 1e-12 &&
                        mean_final[1] <= mean_final[2] + 1e-12;
  const bool matches = zero_mismatch <= 1e-12;
  return {monotone && matches,
          "final subopt by noise level: " + fmt(mean_final[0]) + " / " + fmt(mean_final[1]) +
              " / " + fmt(mean_final[2]) + "; zero-noise deviation " + fmt(zero_mismatch)};
}

// --- criterion 11 ----------------------------------------------------------

std::pair<bool, std::string> criterion_value_difference() {
  Rng rng(31337);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const TabularMdp mdp = random_mdp(5, 3, 0.5 + 0.45 * rng.uniform(), rng);
    const Policy pi = random_policy(5, 3, rng);
    const Policy pi_prime = random_policy(5, 3, rng);
    const EvalResult base = policy_evaluate(mdp, pi);
    const EvalResult improved = policy_evaluate(mdp, pi_prime);
    const Vector d_prime = occupancy(mdp, pi_prime).d;

    const double lhs = expected_return(mdp, improved.v) - expected_return(mdp, base.v);
    double rhs = 0.0;
    for (int s = 0; s < 5; ++s)
      rhs += d_prime(s) * pi_prime.probs.row(s).dot(base.adv.row(s));
    rhs /= 1.0 - mdp.discount;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= 1e-8, "50 random MDPs, max identity residual " + fmt(worst)};
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(const std::string& suite) {
  const bool bandit = suite == "bandit" || suite == "all";
  const bool tabular = suite == "tabular" || suite == "all";
  const bool fa = suite == "fa" || suite == "all";
  if (!bandit && !tabular && !fa)
    throw ConfigError("unknown suite '" + suite + "'; expected bandit, tabular, fa or all");

  std::vector<CriterionResult> results;
  if (bandit) {
    results.push_back(run_timed("1", "bandit linear rate, exhaustive", criterion_bandit_linear));
    results.push_back(
        run_timed("2", "gap-dependent super-linear closed form", criterion_bandit_superlinear));
  }
  if (tabular) {
    results.push_back(run_timed("3", "per-iteration contraction", criterion_contraction));
    results.push_back(
        run_timed("4", "linear convergence and method ordering", criterion_linear_convergence));
    results.push_back(run_timed("11", "value-difference identity", criterion_value_difference));
  }
  if (fa) {
    results.push_back(
        run_timed("5", "one-hot FA reproduces tabular run", criterion_fa_tabular_equivalence));
    results.push_back(run_timed("6", "gradients match finite differences", criterion_gradient_oracles));
    results.push_back(run_timed("7", "surrogate convexity", criterion_convexity));
    results.push_back(run_timed("8", "occupancy sampler frequencies", criterion_sampler));
    results.push_back(
        run_timed("9", "tile-coded method ordering", criterion_fa_qualitative));
    results.push_back(
        run_timed("10", "inexact-advantage robustness", criterion_noise_robustness));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::string format_criterion_line(const CriterionResult& r) {
  std::ostringstream line;
  line << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail
       << " (" << fmt(r.seconds) << " s)";
  return line.str();
}

}  // namespace spma
