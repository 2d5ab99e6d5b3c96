#include "spma/envs.hpp"

#include <doctest.h>

#include "spma/mdp.hpp"

using namespace spma;

TEST_CASE("cliff world layout") {
  const TabularMdp mdp = cliff_world(0.9);
  CHECK(mdp.num_states == 48);
  CHECK(mdp.num_actions == 4);
  CHECK_NOTHROW(validate_mdp(mdp));

  const GridSpec g = cliff_world_grid();
  const auto res = value_iteration(mdp, 1e-10);
  const int start = g.cell_index(g.start);
  CHECK(res.v_star(start) > 0.0);

  // gamma^12 / (1 - gamma): 13 moves along the row above the cliff, reward 1
  // per step at the absorbing goal.
  CHECK(res.v_star(start) ==
        doctest::Approx(std::pow(0.9, 12) / 0.1).epsilon(1e-8));

  // The optimal policy hugs the row adjacent to the cliff: from (2, c) the
  // greedy action is to move right toward the goal column.
  for (int c = 0; c < 11; ++c) {
    const int s = g.cell_index({2, c});
    int best = 0;
    res.pi_star.probs.row(s).maxCoeff(&best);
    CHECK(best == 3);  // right
  }
}

TEST_CASE("cliff cells reset to the start") {
  const TabularMdp mdp = cliff_world(0.9);
  const GridSpec g = cliff_world_grid();
  const int start = g.cell_index(g.start);
  for (const GridCell& cell : g.cliff_cells) {
    const int s = g.cell_index(cell);
    for (int a = 0; a < 4; ++a) {
      CHECK(mdp.transition[a](s, start) == 1.0);
      CHECK(mdp.reward(s, a) == 0.0);
    }
  }
  // Stepping right from the start lands on the first cliff cell.
  CHECK(mdp.transition[3](start, g.cell_index({3, 1})) == 1.0);
}

TEST_CASE("frozen lake layout") {
  const TabularMdp det = frozen_lake(0.99, false);
  CHECK(det.num_states == 16);
  CHECK_NOTHROW(validate_mdp(det));

  // Deterministic variant: shortest safe path is 6 moves, so
  // V*(start) = gamma^5.
  const auto res = value_iteration(det, 1e-12);
  CHECK(res.v_star(0) == doctest::Approx(std::pow(0.99, 5)).epsilon(1e-9));

  const TabularMdp slip = frozen_lake(0.99, true);
  CHECK_NOTHROW(validate_mdp(slip));
  const GridSpec g = frozen_lake_grid();
  for (const GridCell& hole : g.hole_cells) {
    const int s = g.cell_index(hole);
    for (int a = 0; a < 4; ++a) {
      CHECK(slip.transition[a](s, s) == 1.0);
      CHECK(slip.reward(s, a) == 0.0);
    }
  }
}

TEST_CASE("environment constructors are deterministic") {
  const TabularMdp a = cliff_world(0.9);
  const TabularMdp b = cliff_world(0.9);
  CHECK(a.reward == b.reward);
  for (int act = 0; act < 4; ++act) CHECK(a.transition[act] == b.transition[act]);

  const BanditInstance x = random_bandit(6, 0.1, 42);
  const BanditInstance y = random_bandit(6, 0.1, 42);
  CHECK(x.rewards == y.rewards);
}

TEST_CASE("random bandit construction") {
  SUBCASE("maximal two-arm gap forces {0, 1}") {
    const BanditInstance b = random_bandit(2, 1.0, 7);
    CHECK(b.rewards.minCoeff() == doctest::Approx(0.0));
    CHECK(b.rewards.maxCoeff() == doctest::Approx(1.0));
  }
  SUBCASE("gaps respect the floor") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const BanditInstance b = random_bandit(5, 0.07, seed);
      CHECK(b.min_gap() >= 0.07);
      CHECK(b.rewards.maxCoeff() <= 1.0);
      CHECK(b.rewards.minCoeff() >= 0.0);
    }
  }
  SUBCASE("infeasible request") {
    CHECK_THROWS_AS(random_bandit(12, 0.1, 0), InfeasibleGap);
  }
}

TEST_CASE("one-hot features are the identity") {
  const FeatureMap f = one_hot_features(3, 2);
  CHECK(f.x.rows() == 6);
  CHECK(f.x.cols() == 6);
  CHECK(f.x == Matrix::Identity(6, 6));
}

TEST_CASE("tile coding dimensions and row sums") {
  const GridSpec g = cliff_world_grid();
  SUBCASE("documented dimension example") {
    const FeatureMap f = tile_coding(g, 4, 2, 2);
    CHECK(f.x.cols() == 2 * 2 * 6 * 4);
    for (Eigen::Index r = 0; r < f.x.rows(); ++r)
      CHECK(f.x.row(r).sum() == doctest::Approx(2.0));
  }
  SUBCASE("unit tiles recover one-hot up to column permutation") {
    const FeatureMap f = tile_coding(g, 4, 1, 1);
    CHECK(f.x.cols() == f.x.rows());
    for (Eigen::Index r = 0; r < f.x.rows(); ++r) {
      CHECK(f.x.row(r).sum() == doctest::Approx(1.0));
      CHECK(f.x.row(r).maxCoeff() == doctest::Approx(1.0));
    }
    // Distinct (s, a) pairs hit distinct columns.
    CHECK((f.x.colwise().sum().array() == 1.0).all());
  }
}
