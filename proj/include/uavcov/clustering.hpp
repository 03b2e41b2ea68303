#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uavcov/gridworld.hpp"

namespace uavcov {

// Ground users on the horizontal plane [0, L_x] x [0, L_y].
struct GroundUserSet {
  Vec2 extent;
  std::vector<Vec2> positions;

  std::size_t size() const { return positions.size(); }
};

struct FixedCount {
  int count = 0;
};
// Intensity in users per square meter; the count is Poisson(lambda * area).
struct PppIntensity {
  double per_m2 = 0.0;
};
using UserDeployment = std::variant<FixedCount, PppIntensity>;

GroundUserSet generate_users(std::uint64_t seed, Vec2 extent_m, const UserDeployment& mode);

// JSON form: {"extent_m": [Lx, Ly], "positions": [[x, y], ...]}.
std::string users_to_json(const GroundUserSet& users);
GroundUserSet users_from_json(std::string_view text);

struct KMeansResult {
  std::vector<Vec2> centroids;
  std::vector<int> assignment;  // user -> cluster
  int iterations = 0;
  bool converged = false;
  // Within-cluster sum of squared distances after each assignment step.
  std::vector<double> sse_history;
};

// Lloyd iteration from uniformly random initial centroids. Empty clusters are
// re-seeded at the user farthest from its assigned centroid. Assignment ties
// go to the lowest cluster index.
KMeansResult kmeans(const GroundUserSet& users, int n_clusters, int max_iters, std::uint64_t seed);

// Nearest-centroid assignment, lowest index on ties.
std::vector<int> assign_nearest(std::span<const Vec2> centroids, std::span<const Vec2> points);

struct HoveringPoint {
  Vec2 position;
  int covered_count = 0;
  std::vector<int> members;
};

struct HoveringPlan {
  std::vector<HoveringPoint> points;
  double coverage_rate = 0.0;
  double swarm_radius_m = 0.0;
  std::size_t user_count = 0;
  bool below_threshold = false;

  std::vector<Vec2> positions() const;
};

// A user counts toward A_n only for the cluster it is assigned to, so the
// coverage rate never exceeds one.
HoveringPlan evaluate_coverage(std::span<const Vec2> centroids, const GroundUserSet& users,
                               double swarm_radius_m);

struct SelectionOptions {
  std::vector<int> candidate_ns;
  double coverage_threshold = 0.9;
  int restarts = 10;
  int max_iters = 100;
  std::uint64_t seed = 0;
};

// Best-of-restarts plan for a single N.
HoveringPlan best_plan_for_n(const GroundUserSet& users, double swarm_radius_m, int n,
                             int restarts, int max_iters, std::uint64_t seed);

// Smallest candidate N whose best restart reaches the threshold; otherwise the
// overall best plan with below_threshold set.
HoveringPlan select_hovering_plan(const GroundUserSet& users, double swarm_radius_m,
                                  const SelectionOptions& options);

}  // namespace uavcov
