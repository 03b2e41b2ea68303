#include "uavcov/qlearning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "uavcov/errors.hpp"
#include "uavcov/search.hpp"

namespace uavcov {

double QTable::max_over(std::size_t s, ActionMask mask) const {
  if (mask.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  const double* row = values_.data() + s * kActionCount;
  for (int a = 0; a < kActionCount; ++a)
    if (mask.contains(static_cast<Action>(a))) best = std::max(best, row[a]);
  return best;
}

Action QTable::argmax(std::size_t s, ActionMask mask) const {
  if (mask.empty()) throw DeadEnd("no legal action at state " + std::to_string(s));
  const double* row = values_.data() + s * kActionCount;
  int best = -1;
  for (int a = 0; a < kActionCount; ++a) {
    if (!mask.contains(static_cast<Action>(a))) continue;
    if (best < 0 || row[a] > row[best]) best = a;
  }
  return static_cast<Action>(best);
}

std::string QTable::to_json() const {
  nlohmann::json j;
  auto& actions = j["actions"] = nlohmann::json::array();
  for (Action a : kAllActions) actions.push_back(std::string(to_string(a)));
  auto& q = j["q"] = nlohmann::json::object();
  for (std::size_t s = 0; s < states(); ++s) {
    const auto row = values().subspan(s * kActionCount, kActionCount);
    if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) continue;
    q[std::to_string(s)] = std::vector<double>(row.begin(), row.end());
  }
  return j.dump();
}

double epsilon_at(const EpsilonSchedule& schedule, int episode) {
  const double ep = std::max(0, episode);
  return std::visit(
      [ep](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEpsilon>) {
          return s.epsilon;
        } else if constexpr (std::is_same_v<T, LinearDecay>) {
          const double span = 0.7 * s.horizon_episodes;
          return std::max(s.floor, s.start - (s.start - s.floor) * ep / span);
        } else {
          return std::max(s.floor, s.start * std::exp(-s.rate * ep));
        }
      },
      schedule);
}

void validate(const EpsilonSchedule& schedule) {
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEpsilon>) {
          if (!unit(s.epsilon)) throw InvalidConfiguration("epsilon must lie in (0, 1)");
        } else {
          if (!unit(s.start) || !unit(s.floor) || s.floor > s.start)
            throw InvalidConfiguration("epsilon schedule needs 0 < floor <= start < 1");
          if constexpr (std::is_same_v<T, LinearDecay>) {
            if (s.horizon_episodes < 1) throw InvalidConfiguration("decay horizon must be >= 1");
          } else {
            if (!(s.rate >= 0.0)) throw InvalidConfiguration("decay rate must be >= 0");
          }
        }
      },
      schedule);
}

std::string describe(const EpsilonSchedule& schedule) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEpsilon>)
          os << "constant(" << s.epsilon << ")";
        else if constexpr (std::is_same_v<T, LinearDecay>)
          os << "linear(" << s.start << "->" << s.floor << " over 0.7*" << s.horizon_episodes << ")";
        else
          os << "exp(" << s.start << "->" << s.floor << ", k=" << s.rate << ")";
      },
      schedule);
  return os.str();
}

void validate(const LearningConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha <= 1.0))
    throw InvalidConfiguration("learning rate must lie in (0, 1]");
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0))
    throw InvalidConfiguration("discount must lie in [0, 1]");
  if (config.episodes < 1) throw InvalidConfiguration("episodes must be >= 1");
  if (config.max_steps_per_episode < 0)
    throw InvalidConfiguration("max_steps_per_episode must be >= 0");
  if (config.max_episodes > config.episodes && config.extension_block < 1)
    throw InvalidConfiguration("extension block must be >= 1");
  if (config.stable_checks < 1) throw InvalidConfiguration("stable_checks must be >= 1");
  validate(config.schedule);
}

int default_step_cap(const GridSpace& grid) { return 4 * (grid.nx() + grid.ny() + grid.nz()); }

Action select_action(const QTable& q, std::size_t state, ActionMask legal, double epsilon, Rng& rng) {
  if (legal.empty()) throw DeadEnd("no legal action at state " + std::to_string(state));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, legal.size() - 1);
    return legal.nth(pick(rng));
  }
  return q.argmax(state, legal);
}

double update(QTable& q, std::size_t s, Action a, double reward, std::size_t s_next,
              ActionMask legal_next, bool next_terminal, double alpha, double gamma) {
  const double bootstrap = next_terminal ? 0.0 : q.max_over(s_next, legal_next);
  const double old = q.get(s, a);
  const double delta = reward + gamma * bootstrap - old;
  q.set(s, a, old + alpha * delta);
  return delta;
}

TrainingResult train(const CoverageEnv& env, CellIndex start, CellIndex target,
                     const LearningConfig& config) {
  validate(config);
  env.reset(start, target);
  const GridSpace& grid = env.grid();
  if (bfs_distances(grid, env.obstacles(), start)[grid.flat(target)] == kUnreachable)
    throw InfeasibleLeg("target " + to_string(target) + " is unreachable from " + to_string(start));

  const int cap = config.max_steps_per_episode > 0 ? config.max_steps_per_episode : default_step_cap(grid);
  const std::size_t s0 = env.flat(start);
  const std::size_t goal = env.flat(target);
  const double cell = grid.cell_size();

  TrainingResult result{QTable(grid.cell_count()), {}, 0, false, false};
  QTable& q = result.table;
  Rng rng(config.seed);

  auto run_episode = [&](int ep) {
    EpisodeRecord rec;
    rec.epsilon = epsilon_at(config.schedule, ep);
    std::size_t s = s0;
    if (s == goal) {
      rec.reached_target = true;
      return rec;
    }
    while (rec.steps < cap) {
      const ActionMask allowed = env.allowed_actions(s);
      if (allowed.empty()) break;
      const Action a = select_action(q, s, allowed, rec.epsilon, rng);
      const std::size_t next = env.neighbor(s, a);
      const bool reached = next == goal;
      const bool collided = env.collides(next);
      const double r = step_reward(cell, reached, collided);
      update(q, s, a, r, next, env.allowed_actions(next), reached || collided, config.alpha, config.gamma);
      ++rec.steps;
      rec.total_reward += r;
      if (reached || collided) {
        rec.reached_target = reached;
        break;
      }
      s = next;
    }
    return rec;
  };

  int streak = 0;
  std::size_t streak_len = 0;
  auto rollout_ok = [&] {
    try {
      const std::size_t len = greedy_rollout(q, env, start, target, cap).steps();
      streak = (streak > 0 && len == streak_len) ? streak + 1 : 1;
      streak_len = len;
    } catch (const PolicyNotConverged&) {
      streak = 0;
    }
    return streak >= config.stable_checks;
  };

  for (int ep = 0; ep < config.episodes; ++ep) result.curve.push_back(run_episode(ep));
  result.episodes_run = config.episodes;
  result.converged = rollout_ok();
  while (!result.converged && result.episodes_run < config.max_episodes) {
    const int block_end = std::min(config.max_episodes, result.episodes_run + config.extension_block);
    for (int ep = result.episodes_run; ep < block_end; ++ep) result.curve.push_back(run_episode(ep));
    result.episodes_run = block_end;
    result.extended = true;
    result.converged = rollout_ok();
  }
  return result;
}

Trajectory greedy_rollout(const QTable& q, const CoverageEnv& env, CellIndex start,
                          CellIndex target, int step_cap) {
  env.reset(start, target);
  const GridSpace& grid = env.grid();
  Trajectory t;
  t.cells.push_back(start);
  std::vector<char> visited(grid.cell_count(), 0);
  std::size_t s = env.flat(start);
  const std::size_t goal = env.flat(target);
  visited[s] = 1;
  while (s != goal) {
    if (static_cast<int>(t.steps()) >= step_cap)
      throw PolicyNotConverged("greedy rollout exceeded " + std::to_string(step_cap) + " steps");
    const Action a = q.argmax(s, env.legal_actions(s));
    s = env.neighbor(s, a);
    if (visited[s])
      throw PolicyNotConverged("greedy rollout revisits " + to_string(grid.unflat(s)));
    visited[s] = 1;
    t.cells.push_back(grid.unflat(s));
  }
  t.leg_ends.push_back(t.cells.size() - 1);
  return t;
}

}  // namespace uavcov
