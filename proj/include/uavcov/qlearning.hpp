#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "uavcov/mdp_env.hpp"
#include "uavcov/seeding.hpp"
#include "uavcov/trajectory.hpp"

namespace uavcov {

// Dense state x action value table, zero-initialised.
class QTable {
 public:
  explicit QTable(std::size_t states) : values_(states * kActionCount, 0.0) {}

  std::size_t states() const { return values_.size() / kActionCount; }
  double get(std::size_t s, Action a) const { return values_[s * kActionCount + action_index(a)]; }
  void set(std::size_t s, Action a, double v) { values_[s * kActionCount + action_index(a)] = v; }
  std::span<const double> values() const { return values_; }

  // Max over the mask, 0 for an empty mask.
  double max_over(std::size_t s, ActionMask mask) const;
  // Argmax over a non-empty mask, first action in enum order on ties.
  Action argmax(std::size_t s, ActionMask mask) const;

  // {"actions": [...], "q": {"<flat index>": [6 values], ...}}, non-zero rows only.
  std::string to_json() const;

  bool operator==(const QTable&) const = default;

 private:
  std::vector<double> values_;
};

struct ConstantEpsilon {
  double epsilon = 0.1;
};
// Linear from `start` to `floor`, reaching the floor after 70% of
// `horizon_episodes`.
struct LinearDecay {
  double start = 0.9;
  double floor = 0.05;
  int horizon_episodes = 40;
};
// start * exp(-rate * episode), clipped at `floor`.
struct ExpDecay {
  double start = 0.9;
  double floor = 0.05;
  double rate = 0.05;
};
using EpsilonSchedule = std::variant<ConstantEpsilon, LinearDecay, ExpDecay>;

double epsilon_at(const EpsilonSchedule& schedule, int episode);
void validate(const EpsilonSchedule& schedule);
std::string describe(const EpsilonSchedule& schedule);

struct LearningConfig {
  double alpha = 0.6;
  double gamma = 0.6;
  int episodes = 40;
  EpsilonSchedule schedule = LinearDecay{};
  // 0 selects 4 * (N_x + N_y + N_z).
  int max_steps_per_episode = 0;
  std::uint64_t seed = 0;
  // After `episodes`, keep training in blocks of this size until the greedy
  // rollout reaches the target or `max_episodes` is hit. max_episodes <=
  // episodes disables extension.
  int extension_block = 40;
  int max_episodes = 0;
  // Converged once this many consecutive block-end rollouts reach the target
  // with the same length. 1 accepts the first successful rollout.
  int stable_checks = 1;
};

void validate(const LearningConfig& config);
int default_step_cap(const GridSpace& grid);

struct EpisodeRecord {
  int steps = 0;
  double total_reward = 0.0;
  double epsilon = 0.0;
  bool reached_target = false;
};
using LearningCurve = std::vector<EpisodeRecord>;

// With probability epsilon a uniformly random member of `legal`, otherwise
// the greedy action. Throws DeadEnd for an empty mask.
Action select_action(const QTable& q, std::size_t state, ActionMask legal, double epsilon, Rng& rng);

// One temporal-difference update. Returns delta = R + gamma * max Q(s',.) -
// Q(s,a), with the bootstrap term dropped when s' is terminal.
double update(QTable& q, std::size_t s, Action a, double reward, std::size_t s_next,
              ActionMask legal_next, bool next_terminal, double alpha, double gamma);

struct TrainingResult {
  QTable table;
  LearningCurve curve;
  int episodes_run = 0;
  bool extended = false;   // training continued past config.episodes
  bool converged = false;  // final greedy rollout reached the target
};

// Throws InfeasibleLeg when the target is unreachable from start.
TrainingResult train(const CoverageEnv& env, CellIndex start, CellIndex target,
                     const LearningConfig& config);

// Follows argmax over collision-free moves. Throws PolicyNotConverged on a
// revisited cell or when step_cap is exceeded.
Trajectory greedy_rollout(const QTable& q, const CoverageEnv& env, CellIndex start,
                          CellIndex target, int step_cap);

}  // namespace uavcov
