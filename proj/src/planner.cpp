#include "uavcov/planner.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "uavcov/errors.hpp"
#include "uavcov/seeding.hpp"

namespace uavcov {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Qlutp: return "qlutp";
    case Method::QlutpStar: return "qlutp-star";
    case Method::FixedEpsQl: return "fixed-eps-ql";
    case Method::BfsOracle: return "bfs-oracle";
    case Method::RandomWalk: return "random-walk";
  }
  return "?";
}

std::string_view to_string(OrderStrategy s) {
  switch (s) {
    case OrderStrategy::NearestNeighbor: return "nearest-neighbor";
    case OrderStrategy::Exact: return "exact";
    case OrderStrategy::GivenOrder: return "given-order";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Qlutp, Method::QlutpStar, Method::FixedEpsQl, Method::BfsOracle,
                   Method::RandomWalk})
    if (to_string(m) == name) return m;
  throw InvalidConfiguration("unknown method '" + std::string(name) + "'");
}

OrderStrategy parse_order_strategy(std::string_view name) {
  for (OrderStrategy s : {OrderStrategy::NearestNeighbor, OrderStrategy::Exact, OrderStrategy::GivenOrder})
    if (to_string(s) == name) return s;
  throw InvalidConfiguration("unknown ordering strategy '" + std::string(name) + "'");
}

namespace {

// dist[k][t]: BFS steps from node k to target t, where node 0 is the start
// and node k+1 is target k.
std::vector<std::vector<long long>> pairwise_distances(const GridSpace& grid,
                                                       const ObstacleMap& obstacles, CellIndex start,
                                                       const std::vector<CellIndex>& targets) {
  std::vector<std::vector<long long>> out;
  out.reserve(targets.size() + 1);
  auto row = [&](CellIndex from) {
    const auto field = bfs_distances(grid, obstacles, from);
    std::vector<long long> r;
    r.reserve(targets.size());
    for (CellIndex t : targets) r.push_back(field[grid.flat(t)]);
    return r;
  };
  out.push_back(row(start));
  for (std::size_t k = 0; k < out[0].size(); ++k) {
    if (out[0][k] == kUnreachable)
      throw InfeasibleMission("hovering point " + std::to_string(k) + " at " + to_string(targets[k]) +
                              " is unreachable from the start " + to_string(start));
  }
  for (CellIndex t : targets) out.push_back(row(t));
  return out;
}

}  // namespace

std::vector<std::size_t> order_targets(const GridSpace& grid, const ObstacleMap& obstacles,
                                       CellIndex start, const std::vector<CellIndex>& targets,
                                       OrderStrategy strategy) {
  if (targets.empty()) throw InvalidConfiguration("no targets to order");
  if (strategy == OrderStrategy::Exact && targets.size() > kMaxExactTargets)
    throw InvalidConfiguration("exact ordering supports at most " +
                               std::to_string(kMaxExactTargets) + " targets");
  const auto dist = pairwise_distances(grid, obstacles, start, targets);

  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  switch (strategy) {
    case OrderStrategy::GivenOrder:
      return order;
    case OrderStrategy::NearestNeighbor: {
      std::vector<bool> used(targets.size(), false);
      std::size_t node = 0;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        std::size_t pick = targets.size();
        for (std::size_t t = 0; t < targets.size(); ++t)
          if (!used[t] && (pick == targets.size() || dist[node][t] < dist[node][pick])) pick = t;
        used[pick] = true;
        order[k] = pick;
        node = pick + 1;
      }
      return order;
    }
    case OrderStrategy::Exact: {
      std::vector<std::size_t> best = order;
      long long best_len = std::numeric_limits<long long>::max();
      do {
        long long len = dist[0][order[0]];
        for (std::size_t k = 1; k < order.size(); ++k) len += dist[order[k - 1] + 1][order[k]];
        if (len < best_len) {
          best_len = len;
          best = order;
        }
      } while (std::next_permutation(order.begin(), order.end()));
      return best;
    }
  }
  return order;
}

long long tour_length(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex start,
                      const std::vector<CellIndex>& targets, const std::vector<std::size_t>& order) {
  long long total = 0;
  CellIndex at = start;
  for (std::size_t k : order) {
    const int d = bfs_distances(grid, obstacles, at)[grid.flat(targets.at(k))];
    if (d == kUnreachable) throw InfeasibleMission("tour leg to " + to_string(targets[k]) + " is unreachable");
    total += d;
    at = targets[k];
  }
  return total;
}

RandomWalkResult random_walk_baseline(const GridSpace& grid, const ObstacleMap& obstacles,
                                      CellIndex start, CellIndex goal, long long step_cap,
                                      std::uint64_t seed) {
  const CoverageEnv env(grid, obstacles, ObstacleHandling::Mask);
  env.reset(start, goal);
  Rng rng(seed);
  RandomWalkResult out;
  out.trajectory.cells.push_back(start);
  std::size_t s = env.flat(start);
  const std::size_t g = env.flat(goal);
  long long steps = 0;
  while (s != g && steps < step_cap) {
    const ActionMask legal = env.legal_actions(s);
    if (legal.empty()) break;
    std::uniform_int_distribution<int> pick(0, legal.size() - 1);
    s = env.neighbor(s, legal.nth(pick(rng)));
    out.trajectory.cells.push_back(grid.unflat(s));
    ++steps;
  }
  out.reached = s == g;
  out.trajectory.feasible = out.reached;
  out.trajectory.leg_ends.push_back(out.trajectory.cells.size() - 1);
  return out;
}

EpsilonSchedule schedule_for(const PlannerConfig& config, Method method) {
  switch (method) {
    case Method::Qlutp: return config.qlutp;
    case Method::QlutpStar: return config.qlutp_star;
    case Method::FixedEpsQl: return config.fixed_eps;
    default: throw InvalidConfiguration(std::string(to_string(method)) + " is not a learning method");
  }
}

double default_flight_altitude(const GridSpace& grid) {
  return 0.5 * (grid.band().min_m + grid.band().max_m);
}

CellIndex default_start_cell(const GridSpace& grid, const ObstacleMap& obstacles,
                             const PlannerConfig& config) {
  const double h = config.flight_altitude_m.value_or(default_flight_altitude(grid));
  return snap_to_cell(grid, obstacles, {0.0, 0.0}, h).cell;
}

int MissionPlan::total_episodes() const {
  int total = 0;
  for (const auto& leg : legs) total += leg.episodes_run;
  return total;
}

MissionPlan plan_mission_cells(const GridSpace& grid, const ObstacleMap& obstacles,
                               const std::vector<CellIndex>& targets, CellIndex start,
                               Method method, const PlannerConfig& config) {
  if (targets.empty()) throw InvalidConfiguration("mission has no hovering points");
  const CoverageEnv env(grid, obstacles, config.obstacle_handling);
  for (CellIndex t : targets) env.reset(start, t);

  MissionPlan mission;
  mission.method = method;
  mission.order = order_targets(grid, obstacles, start, targets, config.ordering);
  for (std::size_t k : mission.order) mission.ordered_targets.push_back(targets[k]);
  mission.substituted.assign(targets.size(), false);

  const std::string method_name(to_string(method));
  CellIndex at = start;
  for (std::size_t leg = 0; leg < mission.ordered_targets.size(); ++leg) {
    const CellIndex goal = mission.ordered_targets[leg];
    LegReport report;
    report.oracle_steps = shortest_path_oracle(grid, obstacles, at, goal)->steps();
    Trajectory path;
    switch (method) {
      case Method::BfsOracle:
        path = *shortest_path_oracle(grid, obstacles, at, goal);
        break;
      case Method::RandomWalk: {
        auto walk = random_walk_baseline(grid, obstacles, at, goal, config.random_walk_cap,
                                         derive_seed(config.seed, method_name, leg));
        report.converged = walk.reached;
        path = std::move(walk.trajectory);
        break;
      }
      default: {
        LearningConfig lc = config.learning;
        lc.schedule = schedule_for(config, method);
        lc.seed = derive_seed(config.seed, method_name, leg);
        TrainingResult tr = train(env, at, goal, lc);
        report.episodes_run = tr.episodes_run;
        report.extended = tr.extended;
        report.converged = tr.converged;
        report.curve = std::move(tr.curve);
        if (!tr.converged)
          throw PolicyNotConverged(method_name + " leg " + std::to_string(leg) + " to " +
                                   to_string(goal) + " did not converge within " +
                                   std::to_string(tr.episodes_run) + " episodes");
        const int cap = lc.max_steps_per_episode > 0 ? lc.max_steps_per_episode : default_step_cap(grid);
        path = greedy_rollout(tr.table, env, at, goal, cap);
        break;
      }
    }
    append_leg(mission.trajectory, path);
    mission.legs.push_back(std::move(report));
    if (!path.feasible) break;
    at = goal;
  }

  validate_trajectory(grid, obstacles, mission.trajectory);
  if (mission.trajectory.feasible) {
    std::size_t pos = 0;
    for (std::size_t leg = 0; leg < mission.ordered_targets.size(); ++leg) {
      pos = mission.trajectory.leg_ends[leg];
      if (mission.trajectory.cells[pos] != mission.ordered_targets[leg])
        throw InternalConsistency("leg " + std::to_string(leg) + " does not end at its target");
      if (mission.trajectory.leg_steps(leg) < mission.legs[leg].oracle_steps)
        throw InternalConsistency("leg " + std::to_string(leg) + " is shorter than the BFS optimum");
    }
  }
  return mission;
}

MissionPlan plan_mission(const GridSpace& grid, const ObstacleMap& obstacles,
                         const HoveringPlan& plan, CellIndex start, Method method,
                         const PlannerConfig& config) {
  if (plan.points.empty()) throw InvalidConfiguration("hovering plan is empty");
  const double h = config.flight_altitude_m.value_or(default_flight_altitude(grid));
  std::vector<CellIndex> targets;
  std::vector<bool> substituted;
  for (const auto& hp : plan.points) {
    const SnappedCell snapped = snap_to_cell(grid, obstacles, hp.position, h);
    targets.push_back(snapped.cell);
    substituted.push_back(snapped.substituted);
  }
  MissionPlan mission = plan_mission_cells(grid, obstacles, targets, start, method, config);
  mission.substituted = std::move(substituted);
  mission.coverage_rate = plan.coverage_rate;
  mission.meets_coverage_threshold = plan.coverage_rate >= config.coverage_threshold;
  return mission;
}

std::string trajectory_csv(const GridSpace& grid, const Trajectory& trajectory) {
  std::ostringstream os;
  os << "leg,step,ix,iy,iz,x_m,y_m,z_m\n";
  std::size_t leg = 0;
  for (std::size_t i = 0; i < trajectory.cells.size(); ++i) {
    while (leg + 1 < trajectory.leg_ends.size() && i > trajectory.leg_ends[leg]) ++leg;
    const CellIndex c = trajectory.cells[i];
    const Vec3 p = grid.center(c);
    os << leg << ',' << i << ',' << c.ix << ',' << c.iy << ',' << c.iz << ',' << p.x << ',' << p.y
       << ',' << p.z << '\n';
  }
  return os.str();
}

}  // namespace uavcov
