#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uavcov/errors.hpp"
#include "uavcov/gridworld.hpp"
#include "uavcov/linkbudget.hpp"
#include "uavcov/mdp_env.hpp"
#include "uavcov/planner.hpp"
#include "uavcov/qlearning.hpp"

namespace uavcov {

struct GridSection {
  Vec3 extent_m{2000.0, 2000.0, 200.0};
  double cell_size_m = 20.0;
  AltitudeBand altitude_band_m{120.0, 180.0};
};

struct ObstacleSection {
  std::optional<std::filesystem::path> file;
  PillarParams pillars{40, 60.0, 200.0, 3};
  std::uint64_t seed = 7;
};

struct UserSection {
  enum class Mode { Fixed, Ppp };
  Mode mode = Mode::Fixed;
  // Exact counts in fixed mode, expected counts (lambda * area) in PPP mode.
  std::vector<int> counts{30, 35, 40, 45, 50};
  int seeds = 20;
};

struct RadioSection {
  // When set, used directly; otherwise derived from a2a / a2g.
  std::optional<double> swarm_radius_m = 500.0;
  std::optional<link::A2AParams> a2a;
  std::optional<link::A2GParams> a2g;
  std::optional<double> altitude_m;  // default: band center
};

struct ClusteringSection {
  std::vector<int> candidate_ns{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double coverage_threshold = 0.9;
  int restarts = 10;
  int max_iters = 100;
};

// A linear schedule with horizon 0 decays over whatever run it is bound to.
struct LearningSection {
  double alpha = 0.6;
  double gamma = 0.6;
  int episodes = 40;
  int max_steps_per_episode = 0;
  int extension_block = 40;
  int max_episodes = 100000;
  int stable_checks = 10;
  EpsilonSchedule fixed_eps = ConstantEpsilon{0.1};
  EpsilonSchedule qlutp = ExpDecay{0.1, 0.005, 0.002};
  EpsilonSchedule qlutp_star = LinearDecay{0.1, 0.005, 0};
  ObstacleHandling obstacle_handling = ObstacleHandling::Penalize;
  int seeds = 10;
};

struct PlannerSection {
  std::vector<Method> methods{Method::BfsOracle, Method::QlutpStar, Method::Qlutp,
                              Method::FixedEpsQl, Method::RandomWalk};
  OrderStrategy ordering = OrderStrategy::NearestNeighbor;
  std::optional<CellIndex> start_cell;
  std::optional<double> flight_altitude_m;
  long long random_walk_cap = 2'000'000;
  std::vector<int> hp_counts{3, 6, 9};
  int user_count = 40;
};

struct ConvergenceSection {
  int scenarios = 10;
  Vec3 extent_m{600.0, 600.0, 200.0};
  PillarParams pillars{22, 100.0, 200.0, 2};
  int episodes = 2000;
  int min_leg_steps = 15;
  // Steps within this fraction of the BFS optimum count as converged ...
  double tolerance = 0.10;
  // ... when it holds for this many consecutive episodes.
  int window = 5;
};

struct OutputSection {
  std::filesystem::path directory = "results";
  bool svg = true;
};

// Optional bounds checked after the studies; a violation makes the CLI exit
// nonzero.
struct AcceptanceSection {
  std::optional<double> coverage_min;
  int coverage_at_n = 6;
  bool convergence_ordering = false;
  bool loss_ordering = false;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  GridSection grid;
  ObstacleSection obstacles;
  UserSection users;
  RadioSection radio;
  ClusteringSection clustering;
  LearningSection learning;
  PlannerSection planner;
  ConvergenceSection convergence;
  OutputSection output;
  AcceptanceSection acceptance;
};

struct ConfigIssue {
  std::string path;  // e.g. "learning.alpha"
  std::string message;
};

// Thrown by load_config; what() lists every issue, one per line.
class ConfigError : public InvalidConfiguration {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Parses and validates; missing fields take defaults. An empty document
// yields the full default preset. Relative obstacle file paths resolve
// against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
// Same checks, reported instead of thrown. Empty result means valid.
std::vector<ConfigIssue> validate_config_text(std::string_view text);

nlohmann::json to_json(const ExperimentConfig& config);
// FNV-1a over the normalized config, excluding the output section.
std::string config_hash(const ExperimentConfig& config);

// Derived pieces shared by the studies.
GridSpace make_grid(const ExperimentConfig& config);
ObstacleMap make_obstacles(const ExperimentConfig& config, const GridSpace& grid);
double resolve_swarm_radius(const ExperimentConfig& config);
PlannerConfig make_planner_config(const ExperimentConfig& config, std::uint64_t seed);
// Replaces an unbound (0) linear horizon with `episodes`.
EpsilonSchedule bind_horizon(EpsilonSchedule schedule, int episodes);

}  // namespace uavcov
