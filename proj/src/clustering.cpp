#include "uavcov/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "uavcov/errors.hpp"
#include "uavcov/seeding.hpp"

namespace uavcov {

namespace {

double dist2(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double sse(std::span<const Vec2> centroids, std::span<const Vec2> points,
           const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += dist2(points[i], centroids[assignment[i]]);
  return total;
}

}  // namespace

GroundUserSet generate_users(std::uint64_t seed, Vec2 extent_m, const UserDeployment& mode) {
  if (!(extent_m.x > 0.0) || !(extent_m.y > 0.0))
    throw InvalidConfiguration("user deployment area must have positive extent");

  Rng rng(seed);
  std::size_t count = 0;
  if (const auto* fixed = std::get_if<FixedCount>(&mode)) {
    if (fixed->count < 1) throw InvalidConfiguration("user count must be >= 1");
    count = static_cast<std::size_t>(fixed->count);
  } else {
    const double lambda = std::get<PppIntensity>(mode).per_m2;
    if (!(lambda > 0.0)) throw InvalidConfiguration("PPP intensity must be > 0");
    std::poisson_distribution<long long> poisson(lambda * extent_m.x * extent_m.y);
    count = static_cast<std::size_t>(poisson(rng));
  }

  std::uniform_real_distribution<double> ux(0.0, extent_m.x);
  std::uniform_real_distribution<double> uy(0.0, extent_m.y);
  GroundUserSet users{extent_m, {}};
  users.positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = ux(rng);
    users.positions.push_back({x, uy(rng)});
  }
  return users;
}

std::string users_to_json(const GroundUserSet& users) {
  nlohmann::json j;
  j["extent_m"] = {users.extent.x, users.extent.y};
  auto& arr = j["positions"] = nlohmann::json::array();
  for (const Vec2& p : users.positions) arr.push_back({p.x, p.y});
  return j.dump();
}

GroundUserSet users_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    GroundUserSet users;
    for (const auto& p : j.at("positions")) users.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    if (j.contains("extent_m")) {
      users.extent = {j["extent_m"].at(0).get<double>(), j["extent_m"].at(1).get<double>()};
    } else {
      for (const Vec2& p : users.positions) {
        users.extent.x = std::max(users.extent.x, p.x);
        users.extent.y = std::max(users.extent.y, p.y);
      }
    }
    for (const Vec2& p : users.positions) {
      if (p.x < 0.0 || p.y < 0.0 || p.x > users.extent.x || p.y > users.extent.y)
        throw InvalidConfiguration("user position outside the deployment area");
    }
    return users;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfiguration(std::string("malformed user set: ") + e.what());
  }
}

std::vector<int> assign_nearest(std::span<const Vec2> centroids, std::span<const Vec2> points) {
  std::vector<int> out(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = dist2(points[i], centroids[c]);
      if (d < best) {
        best = d;
        out[i] = static_cast<int>(c);
      }
    }
  }
  return out;
}

KMeansResult kmeans(const GroundUserSet& users, int n_clusters, int max_iters, std::uint64_t seed) {
  const auto m = static_cast<int>(users.size());
  if (n_clusters < 1 || n_clusters > m)
    throw InvalidConfiguration("k-means requires 1 <= N <= M (N=" + std::to_string(n_clusters) +
                               ", M=" + std::to_string(m) + ")");
  if (max_iters < 1) throw InvalidConfiguration("k-means requires max_iters >= 1");

  const std::span<const Vec2> pts = users.positions;
  Rng rng(seed);
  std::uniform_real_distribution<double> ux(0.0, users.extent.x);
  std::uniform_real_distribution<double> uy(0.0, users.extent.y);

  KMeansResult r;
  r.centroids.resize(static_cast<std::size_t>(n_clusters));
  for (Vec2& c : r.centroids) {
    c.x = ux(rng);
    c.y = uy(rng);
  }
  r.assignment = assign_nearest(r.centroids, pts);
  r.sse_history.push_back(sse(r.centroids, pts, r.assignment));

  std::vector<Vec2> sum(r.centroids.size());
  std::vector<int> count(r.centroids.size());
  std::vector<char> taken(pts.size());
  while (r.iterations < max_iters) {
    ++r.iterations;
    std::fill(sum.begin(), sum.end(), Vec2{});
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sum[r.assignment[i]].x += pts[i].x;
      sum[r.assignment[i]].y += pts[i].y;
      ++count[r.assignment[i]];
    }
    bool repaired = false;
    for (std::size_t c = 0; c < r.centroids.size(); ++c)
      if (count[c] > 0) r.centroids[c] = {sum[c].x / count[c], sum[c].y / count[c]};

    std::fill(taken.begin(), taken.end(), 0);
    for (std::size_t c = 0; c < r.centroids.size(); ++c) {
      if (count[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (taken[i]) continue;
        const double d = dist2(pts[i], r.centroids[r.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[far] = 1;
      r.centroids[c] = pts[far];
      repaired = true;
    }

    std::vector<int> next = assign_nearest(r.centroids, pts);
    r.sse_history.push_back(sse(r.centroids, pts, next));
    const bool stable = next == r.assignment;
    r.assignment = std::move(next);
    if (stable && !repaired) {
      r.converged = true;
      break;
    }
  }
  return r;
}

std::vector<Vec2> HoveringPlan::positions() const {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.position);
  return out;
}

HoveringPlan evaluate_coverage(std::span<const Vec2> centroids, const GroundUserSet& users,
                               double swarm_radius_m) {
  if (centroids.empty()) throw InvalidConfiguration("coverage evaluation needs >= 1 centroid");
  if (!(swarm_radius_m > 0.0)) throw InvalidConfiguration("swarm radius must be > 0");

  HoveringPlan plan;
  plan.swarm_radius_m = swarm_radius_m;
  plan.user_count = users.size();
  plan.points.resize(centroids.size());
  for (std::size_t c = 0; c < centroids.size(); ++c) plan.points[c].position = centroids[c];

  const double r2 = swarm_radius_m * swarm_radius_m;
  const auto assignment = assign_nearest(centroids, users.positions);
  int covered = 0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto& hp = plan.points[assignment[i]];
    hp.members.push_back(static_cast<int>(i));
    if (dist2(users.positions[i], hp.position) <= r2) {
      ++hp.covered_count;
      ++covered;
    }
  }
  plan.coverage_rate = users.size() == 0 ? 0.0 : static_cast<double>(covered) / users.size();
  return plan;
}

HoveringPlan best_plan_for_n(const GroundUserSet& users, double swarm_radius_m, int n,
                             int restarts, int max_iters, std::uint64_t seed) {
  if (restarts < 1) throw InvalidConfiguration("restarts must be >= 1");
  HoveringPlan best;
  for (int r = 0; r < restarts; ++r) {
    const auto km = kmeans(users, n, max_iters, derive_seed(seed, "kmeans-restart", r));
    HoveringPlan plan = evaluate_coverage(km.centroids, users, swarm_radius_m);
    if (r == 0 || plan.coverage_rate > best.coverage_rate) best = std::move(plan);
  }
  return best;
}

HoveringPlan select_hovering_plan(const GroundUserSet& users, double swarm_radius_m,
                                  const SelectionOptions& options) {
  if (options.candidate_ns.empty()) throw InvalidConfiguration("candidate N list is empty");
  if (!(options.coverage_threshold > 0.0 && options.coverage_threshold <= 1.0))
    throw InvalidConfiguration("coverage threshold must lie in (0, 1]");

  std::vector<int> ns = options.candidate_ns;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  HoveringPlan overall;
  bool have_overall = false;
  for (int n : ns) {
    HoveringPlan plan = best_plan_for_n(users, swarm_radius_m, n, options.restarts,
                                        options.max_iters, derive_seed(options.seed, "n", n));
    if (plan.coverage_rate >= options.coverage_threshold) return plan;
    if (!have_overall || plan.coverage_rate > overall.coverage_rate) {
      overall = std::move(plan);
      have_overall = true;
    }
  }
  overall.below_threshold = true;
  return overall;
}

}  // namespace uavcov
