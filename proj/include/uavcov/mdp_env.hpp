#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavcov/gridworld.hpp"

namespace uavcov {

enum class ObstacleHandling { Mask, Penalize };

enum class TerminalCause { None, ReachedTarget, Collision };

struct EnvState {
  CellIndex agent;
  CellIndex target;
  int steps_taken = 0;
};

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  bool terminal = false;
  TerminalCause cause = TerminalCause::None;
};

// Per-step reward: a -0.1 * cell_size step cost unless the move reaches the
// target (+100), minus 100 when the move lands in an obstacle.
constexpr double step_reward(double cell_size_m, bool reached_target, bool collided) {
  const double h = reached_target ? 1.0 : 0.0;
  const double l = collided ? 1.0 : 0.0;
  return (-0.1 * cell_size_m) * (1.0 - h) + 100.0 * h - 100.0 * l;
}

double discounted_return(std::span<const double> rewards, double gamma);

// One leg of the mission as an episodic MDP. Owns copies of the grid and
// obstacle map plus per-cell lookup tables, so instances are self-contained.
class CoverageEnv {
 public:
  CoverageEnv(GridSpace grid, ObstacleMap obstacles,
              ObstacleHandling handling = ObstacleHandling::Penalize);

  const GridSpace& grid() const { return grid_; }
  const ObstacleMap& obstacles() const { return obstacles_; }
  ObstacleHandling handling() const { return handling_; }

  // Throws InvalidConfiguration if either cell is out of bounds, outside the
  // altitude band, or colliding.
  EnvState reset(CellIndex start, CellIndex target) const;
  bool is_terminal(const EnvState& state) const;
  // Throws IllegalAction when `action` is not allowed at the agent's cell.
  StepOutcome step(const EnvState& state, Action action) const;

  // Actions the learner may attempt: legal moves, plus moves into obstacles
  // when handling is Penalize.
  ActionMask allowed_actions(std::size_t flat_cell) const { return allowed_[flat_cell]; }
  // Collision-free moves only.
  ActionMask legal_actions(std::size_t flat_cell) const { return legal_[flat_cell]; }
  bool collides(std::size_t flat_cell) const { return collide_[flat_cell] != 0; }
  std::size_t flat(CellIndex c) const { return grid_.flat(c); }
  // Flat index of the neighbour reached by a; a must be movable from cell.
  std::size_t neighbor(std::size_t flat_cell, Action a) const {
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(flat_cell) + offset_[action_index(a)]);
  }

  // Valid start/target: in bounds, in band, collision-free.
  bool is_free(CellIndex c) const;

 private:
  GridSpace grid_;
  ObstacleMap obstacles_;
  ObstacleHandling handling_;
  std::vector<ActionMask> allowed_;
  std::vector<ActionMask> legal_;
  std::vector<std::uint8_t> collide_;
  std::ptrdiff_t offset_[kActionCount];
};

struct SnappedCell {
  CellIndex cell;
  bool substituted = false;
};

// Maps a horizontal position at the given flight altitude to the nearest
// in-band, collision-free cell. If that cell collides, searches expanding
// Chebyshev shells and reports the substitution. Throws InfeasibleMission
// when no free in-band cell exists.
SnappedCell snap_to_cell(const GridSpace& grid, const ObstacleMap& obstacles, Vec2 position_m,
                         double altitude_m);

}  // namespace uavcov
