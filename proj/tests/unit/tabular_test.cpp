#include "spma/tabular.hpp"

#include <cmath>
#include <doctest.h>

#include "spma/envs.hpp"
#include "spma/rng.hpp"

using namespace spma;

namespace {

Policy bandit_policy(std::initializer_list<double> probs) {
  Policy pi;
  pi.probs.resize(1, static_cast<Eigen::Index>(probs.size()));
  int i = 0;
  for (double p : probs) pi.probs(0, i++) = p;
  return pi;
}

Vector rewards2(double a, double b) {
  Vector r(2);
  r << a, b;
  return r;
}

Matrix random_zero_mean_adv(const Policy& pi, double scale, Rng& rng) {
  Matrix adv(pi.probs.rows(), pi.probs.cols());
  for (Eigen::Index s = 0; s < adv.rows(); ++s) {
    double mean = 0.0;
    for (Eigen::Index a = 0; a < adv.cols(); ++a) {
      adv(s, a) = scale * (2.0 * rng.uniform() - 1.0);
      mean += pi.probs(s, a) * adv(s, a);
    }
    adv.row(s).array() -= mean;  // exact zero mean under pi
    double resid = pi.probs.row(s).dot(adv.row(s));
    adv(s, 0) -= resid / pi.probs(s, 0);
  }
  return adv;
}

}  // namespace

TEST_CASE("bandit step reproduces the hand-applied update") {
  // K=2, r=(1,0), uniform start, eta=1: advantage of the good arm is 0.5.
  const Policy next = spma_bandit_step(bandit_policy({0.5, 0.5}), rewards2(1, 0), 1.0);
  CHECK(next.probs(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(next.probs(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("bandit step identity cases") {
  const Policy pi = bandit_policy({0.3, 0.7});
  SUBCASE("eta = 0") {
    const Policy next = spma_bandit_step(pi, rewards2(1, 0), 0.0);
    CHECK(next.probs == pi.probs);
  }
  SUBCASE("equal rewards") {
    const Policy next = spma_bandit_step(pi, rewards2(0.4, 0.4), 1.0);
    CHECK((next.probs - pi.probs).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("bandit step conserves mass and stays on the simplex") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + static_cast<int>(rng.next() % 9);
    Policy pi;
    pi.probs.resize(1, K);
    double sum = 0.0;
    for (int a = 0; a < K; ++a) {
      pi.probs(0, a) = 0.01 + rng.uniform();
      sum += pi.probs(0, a);
    }
    pi.probs /= sum;
    Vector r(K);
    for (int a = 0; a < K; ++a) r(a) = rng.uniform();
    const double eta = rng.uniform();
    const Policy next = spma_bandit_step(pi, r, eta);
    CHECK(std::abs(next.probs.sum() - pi.probs.sum()) <= 1e-14);
    CHECK(next.probs.minCoeff() >= 0.0);
  }
}

TEST_CASE("gap-dependent step follows the doubling recursion") {
  SUBCASE("first step from uniform") {
    const Policy next = spma_bandit_gap_step(bandit_policy({0.5, 0.5}), rewards2(1, 0));
    CHECK(next.probs(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("closed form over six steps") {
    for (int K : {2, 4, 8}) {
      const BanditInstance b = random_bandit(K, 0.05, 90 + K);
      Policy pi = Policy::uniform(1, K);
      const int star = b.best_arm();
      for (int t = 0; t <= 6; ++t) {
        const double closed = 1.0 - std::pow(1.0 - 1.0 / K, std::exp2(t));
        if (1.0 - closed >= 1e-15)
          CHECK(pi.probs(0, star) == doctest::Approx(closed).epsilon(1e-10));
        pi = spma_bandit_gap_step(pi, b.rewards);
      }
    }
  }
  SUBCASE("equal rewards are a fixed point") {
    const Policy pi = bandit_policy({0.2, 0.8});
    const Policy next = spma_bandit_gap_step(pi, rewards2(0.5, 0.5));
    CHECK(next.probs == pi.probs);
  }
}

TEST_CASE("mdp step matches the hand-applied update on the chain") {
  const TabularMdp mdp = two_state_chain(0.5);
  const Policy pi = Policy::uniform(2, 2);
  const EvalResult eval = policy_evaluate(mdp, pi);
  const double eta = 0.4 * (1.0 - mdp.discount);  // 0.2

  const Policy next = spma_step(pi, eval.adv, eta);
  // Advantage rows are (-3/8, 3/8) and (-1/8, 1/8).
  CHECK(next.probs(0, 0) == doctest::Approx(0.5 * (1 - 0.2 * 3.0 / 8)).epsilon(1e-12));
  CHECK(next.probs(0, 1) == doctest::Approx(0.5 * (1 + 0.2 * 3.0 / 8)).epsilon(1e-12));
  CHECK(next.probs(1, 0) == doctest::Approx(0.5 * (1 - 0.2 / 8)).epsilon(1e-12));
  CHECK(next.probs(1, 1) == doctest::Approx(0.5 * (1 + 0.2 / 8)).epsilon(1e-12));
}

TEST_CASE("mdp step edge cases and errors") {
  const TabularMdp mdp = two_state_chain(0.5);
  const Policy pi = Policy::uniform(2, 2);
  const EvalResult eval = policy_evaluate(mdp, pi);

  SUBCASE("eta = 0 is the identity") {
    CHECK(spma_step(pi, eval.adv, 0.0).probs == pi.probs);
  }
  SUBCASE("optimal policy is a fixed point on its support") {
    const auto res = value_iteration(mdp, 1e-12);
    const EvalResult star = policy_evaluate(mdp, res.pi_star);
    const Policy next = spma_step(res.pi_star, star.adv, 0.4);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        if (res.pi_star.probs(s, a) > 0)
          CHECK(next.probs(s, a) == doctest::Approx(res.pi_star.probs(s, a)).epsilon(1e-9));
  }
  SUBCASE("non-zero-mean advantage is rejected") {
    Matrix bad = eval.adv;
    bad.array() += 0.5;
    CHECK_THROWS_AS(spma_step(pi, bad, 0.2), InconsistentAdvantage);
  }
  SUBCASE("too-large step is rejected") {
    Matrix adv(1, 2);
    adv << -0.9, 0.9;
    const Policy p = bandit_policy({0.5, 0.5});
    CHECK_THROWS_AS(spma_step(p, adv, 1.2), StepSizeTooLarge);
  }
}

TEST_CASE("npg step closed form on the two-arm bandit") {
  Matrix adv(1, 2);
  adv << 0.5, -0.5;
  const Policy next = npg_step(bandit_policy({0.5, 0.5}), adv, 1.0);
  const double expected = std::exp(0.5) / (std::exp(0.5) + std::exp(-0.5));
  CHECK(next.probs(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(next.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("identity cases") {
    CHECK((npg_step(bandit_policy({0.3, 0.7}), adv, 0.0).probs -
           bandit_policy({0.3, 0.7}).probs)
              .cwiseAbs()
              .maxCoeff() <= 1e-15);
    Matrix zero = Matrix::Zero(1, 2);
    CHECK((npg_step(bandit_policy({0.3, 0.7}), zero, 2.0).probs -
           bandit_policy({0.3, 0.7}).probs)
              .cwiseAbs()
              .maxCoeff() <= 1e-15);
  }
  SUBCASE("alias agrees") {
    const Policy a = npg_step(bandit_policy({0.4, 0.6}), adv, 0.7);
    const Policy b = mdpo_tabular_step(bandit_policy({0.4, 0.6}), adv, 0.7);
    CHECK(a.probs == b.probs);
  }
}

TEST_CASE("spg step updates logits by the softmax gradient") {
  Logits z{Matrix::Zero(1, 2)};
  Matrix adv(1, 2);
  adv << 0.5, -0.5;
  const auto [z_next, pi_next] = spg_step(z, bandit_policy({0.5, 0.5}), adv, 1.0);
  CHECK(z_next.z(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(z_next.z(0, 1) == doctest::Approx(-0.25).epsilon(1e-15));
  const double expected = 1.0 / (1.0 + std::exp(-0.5));
  CHECK(pi_next.probs(0, 0) == doctest::Approx(expected).epsilon(1e-12));

  SUBCASE("mismatched policy and logits are rejected") {
    CHECK_THROWS_AS(spg_step(z, bandit_policy({0.9, 0.1}), adv, 1.0), LogitPolicyMismatch);
  }
}

TEST_CASE("steps preserve the simplex on random inputs") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int S = 1 + static_cast<int>(rng.next() % 4);
    const int A = 2 + static_cast<int>(rng.next() % 3);
    Policy pi;
    pi.probs.resize(S, A);
    for (int s = 0; s < S; ++s) {
      double sum = 0.0;
      for (int a = 0; a < A; ++a) {
        pi.probs(s, a) = 0.01 + rng.uniform();
        sum += pi.probs(s, a);
      }
      pi.probs.row(s) /= sum;
    }
    const double gamma = 0.5 + 0.4 * rng.uniform();
    const Matrix adv = random_zero_mean_adv(pi, 1.0 / (1.0 - gamma), rng);
    // Keep 1 + eta * adv strictly positive for the SPMA step.
    const double eta = std::min(1.0 - gamma, 0.99 / std::max(1e-9, adv.cwiseAbs().maxCoeff()));

    for (const Policy& next :
         {spma_step(pi, adv, eta), npg_step(pi, adv, 2.0),
          spg_step(Logits{pi.probs.array().log().matrix()}, pi, adv, 1.5).second}) {
      for (int s = 0; s < S; ++s) {
        CHECK(next.probs.row(s).minCoeff() >= -1e-12);
        CHECK(std::abs(next.probs.row(s).sum() - 1.0) <= 1e-10);
      }
    }
  }
}

TEST_CASE("tabular runner basics") {
  const TabularMdp mdp = two_state_chain(0.5);
  SUBCASE("zero iterations records only the initial policy") {
    TabularRunConfig cfg;
    cfg.method = Method::spma;
    cfg.step_size = 0.2;
    cfg.iterations = 0;
    const TabularRunResult run = run_tabular(mdp, cfg);
    CHECK(run.records.size() == 1);
    CHECK(run.records[0].j_value == doctest::Approx(0.75));
    CHECK_FALSE(run.records[0].bound_ok.has_value());
  }
  SUBCASE("step size above the SPMA cap is rejected") {
    TabularRunConfig cfg;
    cfg.method = Method::spma;
    cfg.step_size = 0.51;  // above 0.999 (1 - gamma) = 0.4995
    cfg.iterations = 1;
    CHECK_THROWS_AS(run_tabular(mdp, cfg), ConfigError);
  }
  SUBCASE("J is monotone along an SPMA run") {
    TabularRunConfig cfg;
    cfg.method = Method::spma;
    cfg.step_size = 0.45;
    cfg.iterations = 200;
    const TabularRunResult run = run_tabular(mdp, cfg);
    for (std::size_t t = 0; t + 1 < run.records.size(); ++t)
      CHECK(run.records[t + 1].j_value >= run.records[t].j_value - 1e-12);
    CHECK(run.records.back().subopt_inf <= 1e-4);
    for (const auto& rec : run.records) {
      CHECK(rec.alpha_t > 0.0);
      CHECK(rec.alpha_t <= 1.0);
      CHECK(rec.subopt_inf >= 0.0);
    }
    for (std::size_t t = 0; t + 1 < run.records.size(); ++t) {
      REQUIRE(run.records[t].bound_ok.has_value());
      CHECK(*run.records[t].bound_ok);
    }
  }
}

TEST_CASE("bandit runner reaches the optimal arm") {
  const BanditInstance b = random_bandit(4, 0.1, 5);
  TabularRunConfig cfg;
  cfg.method = Method::spma;
  cfg.step_size = 1.0;
  cfg.iterations = 300;
  const BanditRunResult run = run_bandit(b, cfg);
  CHECK(run.records.back().subopt_rho <= 1e-3);
  CHECK(run.best_arm_prob.front() == doctest::Approx(0.25));
  CHECK(run.best_arm_prob.back() > 0.99);
}
