#pragma once

#include <cstddef>
#include <vector>

#include "uavcov/gridworld.hpp"

namespace uavcov {

// Sequence of visited cells. leg_ends[k] is the index into `cells` where leg k
// finishes; a single-leg trajectory has leg_ends = {cells.size() - 1}.
struct Trajectory {
  std::vector<CellIndex> cells;
  std::vector<std::size_t> leg_ends;
  bool feasible = true;

  std::size_t steps() const { return cells.empty() ? 0 : cells.size() - 1; }
  double loss_m(double cell_size_m) const { return cell_size_m * static_cast<double>(steps()); }
  std::size_t leg_steps(std::size_t leg) const {
    const std::size_t begin = leg == 0 ? 0 : leg_ends[leg - 1];
    return leg_ends[leg] - begin;
  }
};

// Appends `leg` (which must start at the current last cell) as a new leg.
void append_leg(Trajectory& into, const Trajectory& leg);

// Checks consecutive cells are axis-adjacent, every cell is in the grid and
// the altitude band, and no cell collides. Throws InternalConsistency.
void validate_trajectory(const GridSpace& grid, const ObstacleMap& obstacles,
                         const Trajectory& trajectory);

}  // namespace uavcov
