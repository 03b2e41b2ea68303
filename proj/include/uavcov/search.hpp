#pragma once

#include <optional>
#include <vector>

#include "uavcov/gridworld.hpp"
#include "uavcov/trajectory.hpp"

namespace uavcov {

inline constexpr int kUnreachable = -1;

// Step distance from `source` to every cell over collision-free, in-band
// moves; kUnreachable elsewhere. Indexed by GridSpace::flat.
std::vector<int> bfs_distances(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex source);

// Minimum-step path by breadth-first search. Among equally short paths the
// one whose move sequence comes first in action order is returned. nullopt
// when the goal is unreachable or either endpoint is not a free in-band cell.
std::optional<Trajectory> shortest_path_oracle(const GridSpace& grid, const ObstacleMap& obstacles,
                                               CellIndex start, CellIndex goal);

}  // namespace uavcov
