#include "uavcov/trajectory.hpp"

#include <cstdlib>

#include "uavcov/errors.hpp"

namespace uavcov {

void append_leg(Trajectory& into, const Trajectory& leg) {
  if (leg.cells.empty()) throw InternalConsistency("cannot append an empty leg");
  if (into.cells.empty()) {
    into.cells.push_back(leg.cells.front());
  } else if (into.cells.back() != leg.cells.front()) {
    throw InternalConsistency("leg starts at " + to_string(leg.cells.front()) +
                              " but trajectory ends at " + to_string(into.cells.back()));
  }
  into.cells.insert(into.cells.end(), leg.cells.begin() + 1, leg.cells.end());
  into.leg_ends.push_back(into.cells.size() - 1);
  into.feasible = into.feasible && leg.feasible;
}

void validate_trajectory(const GridSpace& grid, const ObstacleMap& obstacles,
                         const Trajectory& trajectory) {
  for (std::size_t i = 0; i < trajectory.cells.size(); ++i) {
    const CellIndex c = trajectory.cells[i];
    if (!grid.contains(c) || !grid.in_band(c))
      throw InternalConsistency("trajectory leaves the flyable space at " + to_string(c));
    if (is_collision(grid, obstacles, c))
      throw InternalConsistency("trajectory collides at " + to_string(c));
    if (i > 0) {
      const CellIndex p = trajectory.cells[i - 1];
      const int manhattan = std::abs(c.ix - p.ix) + std::abs(c.iy - p.iy) + std::abs(c.iz - p.iz);
      if (manhattan != 1)
        throw InternalConsistency("non-adjacent consecutive cells " + to_string(p) + " -> " +
                                  to_string(c));
    }
  }
}

}  // namespace uavcov
