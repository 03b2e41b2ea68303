#include <doctest.h>

#include <cmath>
#include <set>

#include "uavcov/clustering.hpp"
#include "uavcov/errors.hpp"

using namespace uavcov;

namespace {

GroundUserSet users_at(std::vector<Vec2> pts, Vec2 extent = {100, 100}) { return {extent, std::move(pts)}; }

// Brute-force coverage recount against the plan's own centroids.
double recount(const HoveringPlan& plan, const GroundUserSet& users) {
  int covered = 0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t c = 0; c < plan.points.size(); ++c) {
      const double d = std::hypot(users.positions[i].x - plan.points[c].position.x,
                                  users.positions[i].y - plan.points[c].position.y);
      if (d < best_d) best_d = d, best = c;
    }
    (void)best;
    covered += best_d <= plan.swarm_radius_m;
  }
  return static_cast<double>(covered) / users.size();
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("fixed-count deployment") {
    const auto u = generate_users(1, {2000, 2000}, FixedCount{30});
    CHECK(u.size() == 30);
    for (const auto& p : u.positions) {
      CHECK(p.x >= 0);
      CHECK(p.x <= 2000);
      CHECK(p.y >= 0);
      CHECK(p.y <= 2000);
    }
    const auto again = generate_users(1, {2000, 2000}, FixedCount{30});
    CHECK(again.positions == u.positions);
    CHECK(generate_users(2, {2000, 2000}, FixedCount{30}).positions != u.positions);
    CHECK_THROWS_AS(generate_users(1, {0, 2000}, FixedCount{30}), InvalidConfiguration);
    CHECK_THROWS_AS(generate_users(1, {2000, 2000}, FixedCount{0}), InvalidConfiguration);
    CHECK_THROWS_AS(generate_users(1, {2000, 2000}, PppIntensity{0}), InvalidConfiguration);
  }

  TEST_CASE("PPP mean count") {
    const double lambda = 40.0 / (2000.0 * 2000.0);
    double total = 0;
    const int seeds = 2000;
    for (int s = 0; s < seeds; ++s) total += generate_users(s, {2000, 2000}, PppIntensity{lambda}).size();
    CHECK(std::abs(total / seeds - 40.0) <= 2.0);
  }

  TEST_CASE("user set JSON round trip") {
    const auto u = generate_users(4, {500, 300}, FixedCount{12});
    const auto back = users_from_json(users_to_json(u));
    CHECK(back.positions == u.positions);
    CHECK(back.extent == u.extent);
    CHECK_THROWS_AS(users_from_json("{\"positions\": 3}"), InvalidConfiguration);
    CHECK_THROWS_AS(users_from_json(R"({"extent_m":[10,10],"positions":[[11,1]]})"), InvalidConfiguration);
  }

  TEST_CASE("k-means geometry") {
    const auto square = users_at({{10, 10}, {30, 10}, {10, 30}, {30, 30}});
    const auto one = kmeans(square, 1, 50, 0);
    CHECK(one.centroids[0].x == doctest::Approx(20));
    CHECK(one.centroids[0].y == doctest::Approx(20));

    const auto pairs = users_at({{10, 10}, {12, 10}, {90, 90}, {90, 92}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = kmeans(pairs, 2, 50, seed);
      std::set<std::pair<double, double>> c;
      for (auto v : r.centroids) c.insert({v.x, v.y});
      CHECK(c == std::set<std::pair<double, double>>{{11, 10}, {90, 91}});
    }

    const auto spread = users_at({{5, 5}, {50, 50}, {95, 10}, {20, 80}, {70, 75}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = kmeans(spread, 5, 100, seed);
      std::set<std::pair<double, double>> c;
      for (auto v : r.centroids) c.insert({v.x, v.y});
      CHECK(c.size() == 5);
      for (auto p : spread.positions) CHECK(c.count({p.x, p.y}) == 1);
      CHECK(r.sse_history.back() == 0.0);
    }

    CHECK_THROWS_AS(kmeans(square, 5, 10, 0), InvalidConfiguration);
    CHECK_THROWS_AS(kmeans(square, 0, 10, 0), InvalidConfiguration);
  }

  TEST_CASE("Lloyd iterations never increase the within-cluster SSE") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto u = generate_users(seed, {2000, 2000}, FixedCount{40});
      const auto r = kmeans(u, 1 + static_cast<int>(seed % 10), 100, seed * 7 + 1);
      for (std::size_t i = 1; i < r.sse_history.size(); ++i)
        CHECK(r.sse_history[i] <= r.sse_history[i - 1] * (1 + 1e-12) + 1e-9);
    }
  }

  TEST_CASE("assignment ties go to the lowest index") {
    const std::vector<Vec2> c{{0, 0}, {10, 0}};
    const std::vector<Vec2> p{{5, 0}, {6, 0}, {4, 0}};
    CHECK(assign_nearest(c, p) == std::vector<int>{0, 1, 0});
  }

  TEST_CASE("coverage rate") {
    const auto u = users_at({{10, 10}, {20, 20}, {80, 80}});
    const std::vector<Vec2> c{{15, 15}, {80, 80}};
    CHECK(evaluate_coverage(c, u, 10).coverage_rate == 1.0);

    // 40 users, 30 inside r_s of their centroid (10 per cluster).
    GroundUserSet many{{1000, 1000}, {}};
    const std::vector<Vec2> hp{{100, 100}, {500, 500}, {900, 900}};
    for (const auto& h : hp)
      for (int i = 0; i < 10; ++i) many.positions.push_back({h.x + i, h.y});
    for (int i = 0; i < 10; ++i) many.positions.push_back({300.0 + i, 100});
    const auto plan = evaluate_coverage(hp, many, 50);
    CHECK(plan.coverage_rate == 0.75);
    CHECK(plan.points[0].covered_count == 10);
    CHECK(plan.points[0].members.size() == 20);
    CHECK_THROWS_AS(evaluate_coverage({}, u, 10), InvalidConfiguration);
    CHECK_THROWS_AS(evaluate_coverage(c, u, 0), InvalidConfiguration);
  }

  TEST_CASE("coverage partition and brute-force recount") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto u = generate_users(seed, {2000, 2000}, FixedCount{30 + static_cast<int>(seed % 21)});
      const int n = 1 + static_cast<int>(seed % 10);
      const auto plan = best_plan_for_n(u, 500, n, 3, 100, seed);
      CHECK(plan.points.size() == static_cast<std::size_t>(n));
      std::vector<int> seen(u.size(), 0);
      int covered = 0;
      for (const auto& hp : plan.points) {
        covered += hp.covered_count;
        for (int m : hp.members) ++seen[m];
      }
      for (int s : seen) CHECK(s == 1);
      CHECK(plan.coverage_rate == doctest::Approx(static_cast<double>(covered) / u.size()));
      CHECK(plan.coverage_rate == doctest::Approx(recount(plan, u)));
      CHECK(plan.coverage_rate <= 1.0);
    }
  }

  TEST_CASE("hovering plan selection") {
    const auto tight = users_at({{50, 50}, {51, 50}, {50, 52}});
    const auto plan = select_hovering_plan(tight, 10, {{1, 2, 3}, 0.9, 3, 100, 0});
    CHECK(plan.points.size() == 1);
    CHECK_FALSE(plan.below_threshold);

    GroundUserSet outlier{{10000, 10000}, {}};
    for (int i = 0; i < 20; ++i) outlier.positions.push_back({100.0 + i, 100.0});
    outlier.positions.push_back({9900, 9900});
    const auto flagged = select_hovering_plan(outlier, 30, {{1}, 1.0, 5, 100, 0});
    CHECK(flagged.below_threshold);
    CHECK(flagged.coverage_rate < 1.0);
    CHECK(flagged.coverage_rate == doctest::Approx(recount(flagged, outlier)));

    // Paper scale: N <= 6 in the typical case.
    int small = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto u = generate_users(seed, {2000, 2000}, FixedCount{40});
      const auto p = select_hovering_plan(u, 500, {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9, 10, 100, seed});
      small += p.points.size() <= 6;
    }
    CHECK(small >= 15);

    CHECK_THROWS_AS(select_hovering_plan(tight, 10, {{}, 0.9, 3, 100, 0}), InvalidConfiguration);
    CHECK_THROWS_AS(select_hovering_plan(tight, 10, {{1}, 1.5, 3, 100, 0}), InvalidConfiguration);
  }

  TEST_CASE("plans are deterministic") {
    const auto u = generate_users(3, {2000, 2000}, FixedCount{45});
    const auto a = best_plan_for_n(u, 500, 6, 10, 100, 42);
    const auto b = best_plan_for_n(u, 500, 6, 10, 100, 42);
    CHECK(a.positions() == b.positions());
    CHECK(a.coverage_rate == b.coverage_rate);
  }
}
