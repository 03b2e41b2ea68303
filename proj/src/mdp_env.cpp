#include "uavcov/mdp_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavcov/errors.hpp"

namespace uavcov {

double discounted_return(std::span<const double> rewards, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidConfiguration("discount must lie in [0, 1]");
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

CoverageEnv::CoverageEnv(GridSpace grid, ObstacleMap obstacles, ObstacleHandling handling)
    : grid_(std::move(grid)), obstacles_(std::move(obstacles)), handling_(handling) {
  if (obstacles_.nx() != grid_.nx() || obstacles_.ny() != grid_.ny())
    throw InvalidConfiguration("obstacle map does not match the grid");
  const std::size_t n = grid_.cell_count();
  allowed_.resize(n);
  legal_.resize(n);
  collide_.resize(n);
  for (std::size_t i = 0; i < n; ++i) collide_[i] = is_collision(grid_, obstacles_, grid_.unflat(i)) ? 1 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    const CellIndex c = grid_.unflat(i);
    const ActionMask movable = movable_actions(grid_, c);
    ActionMask legal;
    for (Action a : kAllActions)
      if (movable.contains(a) && !collide_[grid_.flat(apply(c, a))]) legal.insert(a);
    legal_[i] = legal;
    allowed_[i] = handling_ == ObstacleHandling::Mask ? legal : movable;
  }
  const auto nx = static_cast<std::ptrdiff_t>(grid_.nx());
  const auto nxy = nx * static_cast<std::ptrdiff_t>(grid_.ny());
  offset_[action_index(Action::Forward)] = 1;
  offset_[action_index(Action::Backward)] = -1;
  offset_[action_index(Action::Right)] = nx;
  offset_[action_index(Action::Left)] = -nx;
  offset_[action_index(Action::Up)] = nxy;
  offset_[action_index(Action::Down)] = -nxy;
}

bool CoverageEnv::is_free(CellIndex c) const {
  return grid_.contains(c) && grid_.in_band(c) && !collide_[grid_.flat(c)];
}

EnvState CoverageEnv::reset(CellIndex start, CellIndex target) const {
  if (!is_free(start))
    throw InvalidConfiguration("start cell " + to_string(start) +
                               " is out of bounds, outside the altitude band, or colliding");
  if (!is_free(target))
    throw InvalidConfiguration("target cell " + to_string(target) +
                               " is out of bounds, outside the altitude band, or colliding");
  return {start, target, 0};
}

bool CoverageEnv::is_terminal(const EnvState& state) const {
  return state.agent == state.target || (grid_.contains(state.agent) && collide_[grid_.flat(state.agent)]);
}

StepOutcome CoverageEnv::step(const EnvState& state, Action action) const {
  grid_.require_contains(state.agent);
  if (is_terminal(state)) throw IllegalAction("step called on a terminal state");
  if (!allowed_[grid_.flat(state.agent)].contains(action))
    throw IllegalAction("action " + std::string(to_string(action)) + " is not allowed at " +
                        to_string(state.agent));

  StepOutcome out;
  out.next = state;
  out.next.agent = apply(state.agent, action);
  ++out.next.steps_taken;
  const bool reached = out.next.agent == state.target;
  const bool collided = collide_[grid_.flat(out.next.agent)] != 0;
  out.reward = step_reward(grid_.cell_size(), reached, collided);
  out.terminal = reached || collided;
  out.cause = reached ? TerminalCause::ReachedTarget
                      : (collided ? TerminalCause::Collision : TerminalCause::None);
  return out;
}

SnappedCell snap_to_cell(const GridSpace& grid, const ObstacleMap& obstacles, Vec2 position_m,
                         double altitude_m) {
  const double cell = grid.cell_size();
  const CellIndex nearest{std::clamp(static_cast<int>(std::floor(position_m.x / cell)), 0, grid.nx() - 1),
                          std::clamp(static_cast<int>(std::floor(position_m.y / cell)), 0, grid.ny() - 1),
                          std::clamp(grid.layer_for_altitude(altitude_m), grid.band_lo(), grid.band_hi())};
  auto free = [&](CellIndex c) {
    return grid.contains(c) && grid.in_band(c) && !is_collision(grid, obstacles, c);
  };
  if (free(nearest)) return {nearest, false};

  const Vec3 want{position_m.x, position_m.y, altitude_m};
  const int max_r = std::max({grid.nx(), grid.ny(), grid.nz()});
  for (int r = 1; r <= max_r; ++r) {
    CellIndex best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int dz = -r; dz <= r; ++dz)
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
          const CellIndex c{nearest.ix + dx, nearest.iy + dy, nearest.iz + dz};
          if (!free(c)) continue;
          const Vec3 p = grid.center(c);
          const double d = (p.x - want.x) * (p.x - want.x) + (p.y - want.y) * (p.y - want.y) +
                           (p.z - want.z) * (p.z - want.z);
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
    if (std::isfinite(best_d)) return {best, true};
  }
  throw InfeasibleMission("no collision-free cell inside the altitude band");
}

}  // namespace uavcov
