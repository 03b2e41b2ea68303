#include "uavcov/search.hpp"

#include <algorithm>

namespace uavcov {

namespace {

bool free_cell(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex c) {
  return grid.contains(c) && grid.in_band(c) && !is_collision(grid, obstacles, c);
}

}  // namespace

std::vector<int> bfs_distances(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex source) {
  std::vector<int> dist(grid.cell_count(), kUnreachable);
  if (!free_cell(grid, obstacles, source)) return dist;
  std::vector<CellIndex> frontier{source};
  dist[grid.flat(source)] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const CellIndex c = frontier[head];
    const int d = dist[grid.flat(c)];
    const ActionMask legal = legal_actions(grid, obstacles, c);
    for (Action a : kAllActions) {
      if (!legal.contains(a)) continue;
      const CellIndex n = apply(c, a);
      int& dn = dist[grid.flat(n)];
      if (dn == kUnreachable) {
        dn = d + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

std::optional<Trajectory> shortest_path_oracle(const GridSpace& grid, const ObstacleMap& obstacles,
                                               CellIndex start, CellIndex goal) {
  if (!free_cell(grid, obstacles, start) || !free_cell(grid, obstacles, goal)) return std::nullopt;
  // Distances to the goal; walking downhill from the start taking the first
  // improving action yields the lexicographically first shortest move sequence.
  const std::vector<int> to_goal = bfs_distances(grid, obstacles, goal);
  if (to_goal[grid.flat(start)] == kUnreachable) return std::nullopt;

  Trajectory t;
  t.cells.push_back(start);
  CellIndex c = start;
  while (c != goal) {
    const int d = to_goal[grid.flat(c)];
    const ActionMask legal = legal_actions(grid, obstacles, c);
    for (Action a : kAllActions) {
      if (!legal.contains(a)) continue;
      const CellIndex n = apply(c, a);
      if (to_goal[grid.flat(n)] == d - 1) {
        c = n;
        break;
      }
    }
    t.cells.push_back(c);
  }
  t.leg_ends.push_back(t.cells.size() - 1);
  return t;
}

}  // namespace uavcov
