#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavcov/clustering.hpp"
#include "uavcov/mdp_env.hpp"
#include "uavcov/qlearning.hpp"
#include "uavcov/search.hpp"
#include "uavcov/trajectory.hpp"

namespace uavcov {

enum class Method { Qlutp, QlutpStar, FixedEpsQl, BfsOracle, RandomWalk };
enum class OrderStrategy { NearestNeighbor, Exact, GivenOrder };

std::string_view to_string(Method m);
std::string_view to_string(OrderStrategy s);
Method parse_method(std::string_view name);
OrderStrategy parse_order_strategy(std::string_view name);

inline constexpr int kMaxExactTargets = 8;

// Visiting order over `targets` (indices into it). Distances are BFS step
// counts. Throws InfeasibleMission naming the first unreachable target, and
// InvalidConfiguration for Exact with more than kMaxExactTargets targets.
std::vector<std::size_t> order_targets(const GridSpace& grid, const ObstacleMap& obstacles,
                                       CellIndex start, const std::vector<CellIndex>& targets,
                                       OrderStrategy strategy);

// Total BFS step length of start -> targets[order[0]] -> ...
long long tour_length(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex start,
                      const std::vector<CellIndex>& targets, const std::vector<std::size_t>& order);

struct RandomWalkResult {
  Trajectory trajectory;
  bool reached = false;
};

// Uniformly random collision-free moves until the goal or `step_cap` steps.
RandomWalkResult random_walk_baseline(const GridSpace& grid, const ObstacleMap& obstacles,
                                      CellIndex start, CellIndex goal, long long step_cap,
                                      std::uint64_t seed);

struct PlannerConfig {
  LearningConfig learning;  // alpha, gamma, episodes, budget, step cap
  EpsilonSchedule fixed_eps = ConstantEpsilon{0.1};
  EpsilonSchedule qlutp = ExpDecay{0.1, 0.005, 0.05};
  EpsilonSchedule qlutp_star = LinearDecay{0.1, 0.005, 40};
  ObstacleHandling obstacle_handling = ObstacleHandling::Penalize;
  OrderStrategy ordering = OrderStrategy::NearestNeighbor;
  std::optional<double> flight_altitude_m;  // default: band center
  long long random_walk_cap = 1'000'000;
  double coverage_threshold = 0.9;
  std::uint64_t seed = 0;
};

// Schedule used for a learning method; throws for non-learning methods.
EpsilonSchedule schedule_for(const PlannerConfig& config, Method method);
double default_flight_altitude(const GridSpace& grid);
// Cell nearest the (0, 0) corner at flight altitude, snapped to free space.
CellIndex default_start_cell(const GridSpace& grid, const ObstacleMap& obstacles,
                             const PlannerConfig& config);

struct LegReport {
  int episodes_run = 0;
  bool extended = false;
  bool converged = true;
  std::size_t oracle_steps = 0;
  LearningCurve curve;
};

struct MissionPlan {
  Method method = Method::BfsOracle;
  std::vector<std::size_t> order;          // indices into the hovering plan
  std::vector<CellIndex> ordered_targets;  // cells, in visiting order
  std::vector<bool> substituted;           // per hovering point: snapped away from a collision
  Trajectory trajectory;
  std::vector<LegReport> legs;
  double coverage_rate = 0.0;
  bool meets_coverage_threshold = false;

  double loss_m(double cell_size_m) const { return trajectory.loss_m(cell_size_m); }
  int total_episodes() const;
};

// Orders the hovering points, plans each leg with `method`, stitches the legs
// and validates the result. Throws InfeasibleMission for unreachable targets,
// PolicyNotConverged if a learner exhausts its episode budget, and
// InternalConsistency if the stitched trajectory violates a constraint.
// A random-walk leg that hits its cap marks the trajectory infeasible.
MissionPlan plan_mission(const GridSpace& grid, const ObstacleMap& obstacles,
                         const HoveringPlan& plan, CellIndex start, Method method,
                         const PlannerConfig& config);

// Same, with target cells already chosen.
MissionPlan plan_mission_cells(const GridSpace& grid, const ObstacleMap& obstacles,
                               const std::vector<CellIndex>& targets, CellIndex start,
                               Method method, const PlannerConfig& config);

// Trajectory CSV: leg,step,ix,iy,iz,x_m,y_m,z_m
std::string trajectory_csv(const GridSpace& grid, const Trajectory& trajectory);

}  // namespace uavcov
