#include "spma/envs.hpp"

#include <algorithm>
#include <cmath>

#include "spma/rng.hpp"

namespace spma {

namespace {

enum Move { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
constexpr int kNumMoves = 4;
constexpr int kRowDelta[kNumMoves] = {-1, 1, 0, 0};
constexpr int kColDelta[kNumMoves] = {0, 0, -1, 1};

GridCell step_cell(const GridSpec& g, GridCell c, int move) {
  GridCell n{c.row + kRowDelta[move], c.col + kColDelta[move]};
  if (n.row < 0 || n.row >= g.rows || n.col < 0 || n.col >= g.cols) return c;
  return n;
}

bool contains(const std::vector<GridCell>& cells, GridCell c) {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

}  // namespace

GridSpec cliff_world_grid() {
  GridSpec g;
  g.rows = 4;
  g.cols = 12;
  g.start = {3, 0};
  g.goal = {3, 11};
  for (int c = 1; c <= 10; ++c) g.cliff_cells.push_back({3, c});
  return g;
}

TabularMdp cliff_world(double gamma) {
  const GridSpec g = cliff_world_grid();
  const int S = g.num_cells();
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = kNumMoves;
  mdp.transition.assign(kNumMoves, Matrix::Zero(S, S));
  mdp.reward = Matrix::Zero(S, kNumMoves);
  // Uniform start distribution: every state carries initial mass, so the
  // occupancy measure stays bounded away from zero and function
  // approximation has a usable learning signal everywhere.
  mdp.initial_dist = Vector::Constant(S, 1.0 / S);
  mdp.discount = gamma;

  const int start = g.cell_index(g.start);
  const int goal = g.cell_index(g.goal);
  for (int row = 0; row < g.rows; ++row) {
    for (int col = 0; col < g.cols; ++col) {
      const GridCell cell{row, col};
      const int s = g.cell_index(cell);
      for (int a = 0; a < kNumMoves; ++a) {
        if (s == goal) {
          mdp.transition[a](s, s) = 1.0;
          mdp.reward(s, a) = 1.0;
          continue;
        }
        if (contains(g.cliff_cells, cell)) {
          mdp.transition[a](s, start) = 1.0;
          continue;
        }
        const int next = g.cell_index(step_cell(g, cell, a));
        mdp.transition[a](s, next) = 1.0;
        if (next == goal) mdp.reward(s, a) = 1.0;
      }
    }
  }
  return mdp;
}

GridSpec frozen_lake_grid() {
  GridSpec g;
  g.rows = 4;
  g.cols = 4;
  g.start = {0, 0};
  g.goal = {3, 3};
  g.hole_cells = {{1, 1}, {1, 3}, {2, 3}, {3, 0}};
  return g;
}

TabularMdp frozen_lake(double gamma, bool slippery) {
  GridSpec g = frozen_lake_grid();
  g.slip_prob = slippery ? 2.0 / 3.0 : 0.0;
  const int S = g.num_cells();
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = kNumMoves;
  mdp.transition.assign(kNumMoves, Matrix::Zero(S, S));
  mdp.reward = Matrix::Zero(S, kNumMoves);
  mdp.initial_dist = Vector::Zero(S);
  mdp.initial_dist(g.cell_index(g.start)) = 1.0;
  mdp.discount = gamma;

  const int goal = g.cell_index(g.goal);
  // Perpendicular moves for each intended direction.
  const int perp[kNumMoves][2] = {
      {kLeft, kRight}, {kLeft, kRight}, {kUp, kDown}, {kUp, kDown}};

  for (int row = 0; row < g.rows; ++row) {
    for (int col = 0; col < g.cols; ++col) {
      const GridCell cell{row, col};
      const int s = g.cell_index(cell);
      const bool absorbing = (s == goal) || contains(g.hole_cells, cell);
      for (int a = 0; a < kNumMoves; ++a) {
        if (absorbing) {
          mdp.transition[a](s, s) = 1.0;
          continue;
        }
        const int realized[3] = {a, perp[a][0], perp[a][1]};
        const double probs[3] = {slippery ? 1.0 / 3.0 : 1.0,
                                 slippery ? 1.0 / 3.0 : 0.0,
                                 slippery ? 1.0 / 3.0 : 0.0};
        for (int k = 0; k < 3; ++k) {
          if (probs[k] == 0.0) continue;
          const int next = g.cell_index(step_cell(g, cell, realized[k]));
          mdp.transition[a](s, next) += probs[k];
          // Reward on entering the goal, expressed as expected reward.
          if (next == goal) mdp.reward(s, a) += probs[k];
        }
      }
    }
  }
  return mdp;
}

TabularMdp two_state_chain(double gamma) {
  TabularMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 2;
  mdp.transition.assign(2, Matrix::Zero(2, 2));
  mdp.transition[0] << 1, 0, 0, 1;  // stay
  mdp.transition[1] << 0, 1, 1, 0;  // hop
  mdp.reward = Matrix::Zero(2, 2);
  mdp.reward(0, 1) = 1.0;
  mdp.initial_dist = Vector::Zero(2);
  mdp.initial_dist(0) = 1.0;
  mdp.discount = gamma;
  return mdp;
}

BanditInstance random_bandit(int num_arms, double min_gap, std::uint64_t seed) {
  if (num_arms < 2) throw ConfigError("random_bandit needs at least two arms");
  if (!(min_gap > 0.0)) throw ConfigError("min_gap must be positive");
  if ((num_arms - 1) * min_gap > 1.0 + 1e-12)
    throw InfeasibleGap("cannot fit " + std::to_string(num_arms) + " arms with gap " +
                        std::to_string(min_gap) + " inside [0, 1]");

  Rng rng(seed);
  BanditInstance out;
  out.rewards.resize(num_arms);
  const int star = static_cast<int>(rng.next() % static_cast<std::uint64_t>(num_arms));
  const double lo = std::min(1.0, (num_arms - 1) * min_gap);
  const double r_star = rng.uniform(lo, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    out.rewards(star) = r_star;
    for (int a = 0; a < num_arms; ++a) {
      if (a == star) continue;
      out.rewards(a) = rng.uniform(0.0, r_star - min_gap);
    }
    bool distinct = true;
    for (int a = 0; a < num_arms && distinct; ++a)
      for (int b = a + 1; b < num_arms && distinct; ++b)
        if (std::abs(out.rewards(a) - out.rewards(b)) < 1e-9) distinct = false;
    if (distinct) return out;
  }
  throw Error("random_bandit failed to draw distinct rewards");
}

FeatureMap one_hot_features(int num_states, int num_actions) {
  FeatureMap f;
  f.x = Matrix::Identity(num_states * num_actions, num_states * num_actions);
  return f;
}

FeatureMap tile_coding(const GridSpec& grid, int num_actions, int num_tilings, int tile_size) {
  if (num_tilings < 1 || tile_size < 1)
    throw ConfigError("tile_coding needs num_tilings >= 1 and tile_size >= 1");
  const int tiles_r = (grid.rows + tile_size - 1) / tile_size;
  const int tiles_c = (grid.cols + tile_size - 1) / tile_size;
  const int dim = num_tilings * tiles_r * tiles_c * num_actions;
  FeatureMap f;
  f.x = Matrix::Zero(static_cast<Eigen::Index>(grid.num_cells()) * num_actions, dim);
  for (int row = 0; row < grid.rows; ++row) {
    for (int col = 0; col < grid.cols; ++col) {
      const int s = row * grid.cols + col;
      for (int i = 0; i < num_tilings; ++i) {
        const int offset = i * tile_size / num_tilings;
        const int tr = ((row + offset) / tile_size) % tiles_r;
        const int tc = ((col + offset) / tile_size) % tiles_c;
        for (int a = 0; a < num_actions; ++a) {
          const int feature = ((i * tiles_r + tr) * tiles_c + tc) * num_actions + a;
          f.x(static_cast<Eigen::Index>(s) * num_actions + a, feature) = 1.0;
        }
      }
    }
  }
  return f;
}

}  // namespace spma
