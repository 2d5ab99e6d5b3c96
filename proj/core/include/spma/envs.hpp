#pragma once

#include <cstdint>
#include <vector>

#include "spma/linear_fa.hpp"
#include "spma/mdp.hpp"
#include "spma/tabular.hpp"
#include "spma/types.hpp"

namespace spma {

struct GridCell {
  int row = 0;
  int col = 0;
  bool operator==(const GridCell&) const = default;
};

struct GridSpec {
  int rows = 0;
  int cols = 0;
  std::vector<GridCell> cliff_cells;
  std::vector<GridCell> hole_cells;
  GridCell start;
  GridCell goal;
  double slip_prob = 0.0;

  int cell_index(GridCell c) const { return c.row * cols + c.col; }
  int num_cells() const { return rows * cols; }
};

// 4 x 12 grid, 4 deterministic moves (up/down/left/right, off-grid moves
// stay in place).  Moving onto a cliff cell enters it for one step; every
// action from a cliff cell returns to the start with reward 0.  Entering
// the goal earns reward 1 and the goal is absorbing with reward 1 per step.
// rho is uniform over all cells, keeping every state's occupancy positive.
TabularMdp cliff_world(double gamma);
GridSpec cliff_world_grid();

// Standard 4 x 4 map: start at (0,0), goal at (3,3), four holes.  Holes and
// the goal are absorbing; entering the goal earns reward 1, everything else
// 0.  When slippery, the intended move and each perpendicular move happen
// with probability 1/3 each.
TabularMdp frozen_lake(double gamma, bool slippery);
GridSpec frozen_lake_grid();

// Two-state chain used throughout the tests: a0 stays put with reward 0,
// a1 hops to the other state and pays 1 only from state 0; rho is one-hot
// at state 0.
TabularMdp two_state_chain(double gamma);

// K rewards in [0, 1] with a unique maximum and every gap to the best arm
// at least min_gap; rewards are pairwise distinct.  Deterministic in seed.
BanditInstance random_bandit(int num_arms, double min_gap, std::uint64_t seed);

// Identity feature matrix of size SA x SA.
FeatureMap one_hot_features(int num_states, int num_actions);

// Binary tile-coded features over (tiling, tile containing the cell, action)
// triples.  Tiling i is offset by floor(i * tile_size / num_tilings) cells
// on each axis and tiles wrap around the grid, so the feature dimension is
// exactly num_tilings * ceil(rows/tile_size) * ceil(cols/tile_size) * A and
// every (s, a) row has exactly num_tilings ones.
FeatureMap tile_coding(const GridSpec& grid, int num_actions, int num_tilings, int tile_size);

}  // namespace spma
