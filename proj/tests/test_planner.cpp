#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "uavcov/errors.hpp"
#include "uavcov/planner.hpp"

using namespace uavcov;

namespace {

GridSpace flat_grid(int nx, int ny) { return build_grid({20.0 * nx, 20.0 * ny, 20}, 20, {0, 20}); }

// 6 x 6 x 1 with a wall at ix = 2 covering iy 0..4; the gap is at iy = 5.
ObstacleMap detour_wall(const GridSpace& g) {
  std::vector<double> h(36, 0.0);
  for (int y = 0; y < 5; ++y) h[y * 6 + 2] = 20;
  return ObstacleMap(g, h);
}

PlannerConfig small_config(std::uint64_t seed) {
  PlannerConfig c;
  c.learning.episodes = 200;
  c.learning.max_episodes = 20000;
  c.learning.stable_checks = 10;
  c.qlutp_star = LinearDecay{0.5, 0.01, 200};
  c.qlutp = ExpDecay{0.5, 0.01, 0.02};
  c.random_walk_cap = 100000;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("planner") {
  TEST_CASE("breadth-first oracle") {
    const auto g = flat_grid(5, 5);
    const ObstacleMap none(g);
    CHECK(shortest_path_oracle(g, none, {0, 0, 0}, {4, 4, 0})->steps() == 8);
    CHECK(shortest_path_oracle(g, none, {3, 3, 0}, {3, 3, 0})->steps() == 0);

    const auto g6 = flat_grid(6, 6);
    const auto wall = detour_wall(g6);
    const auto detour = shortest_path_oracle(g6, wall, {0, 0, 0}, {4, 0, 0});
    REQUIRE(detour);
    CHECK(detour->steps() == 14);
    CHECK_NOTHROW(validate_trajectory(g6, wall, *detour));

    std::vector<double> seal(25, 0.0);
    seal[3 * 5 + 4] = seal[4 * 5 + 3] = 20;  // neighbours of (4,4)
    const ObstacleMap sealed(g, seal);
    CHECK_FALSE(shortest_path_oracle(g, sealed, {0, 0, 0}, {4, 4, 0}));
    CHECK(bfs_distances(g, sealed, {0, 0, 0})[g.flat({4, 4, 0})] == kUnreachable);
    CHECK_FALSE(shortest_path_oracle(g, sealed, {0, 0, 0}, {4, 3, 0}));  // colliding goal
  }

  TEST_CASE("BFS distances agree with Manhattan distance on an open grid") {
    const auto g = build_grid({100, 100, 60}, 20, {0, 60});
    const auto d = bfs_distances(g, ObstacleMap(g), {1, 2, 0});
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const auto c = g.unflat(i);
      CHECK(d[i] == std::abs(c.ix - 1) + std::abs(c.iy - 2) + c.iz);
    }
  }

  TEST_CASE("target ordering") {
    const auto g = build_grid({400, 400, 20}, 20, {0, 20});
    const ObstacleMap none(g);
    const std::vector<CellIndex> one{{5, 5, 0}};
    for (auto s : {OrderStrategy::NearestNeighbor, OrderStrategy::Exact, OrderStrategy::GivenOrder})
      CHECK(order_targets(g, none, {0, 0, 0}, one, s) == std::vector<std::size_t>{0});

    const std::vector<CellIndex> line{{12, 0, 0}, {3, 0, 0}, {18, 0, 0}, {7, 0, 0}};
    const std::vector<std::size_t> sorted{1, 3, 0, 2};
    CHECK(order_targets(g, none, {0, 0, 0}, line, OrderStrategy::NearestNeighbor) == sorted);
    CHECK(order_targets(g, none, {0, 0, 0}, line, OrderStrategy::Exact) == sorted);
    CHECK(order_targets(g, none, {0, 0, 0}, line, OrderStrategy::GivenOrder) ==
          std::vector<std::size_t>{0, 1, 2, 3});

    Rng rng(11);
    std::uniform_int_distribution<int> u(0, 19);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<CellIndex> t;
      for (int k = 0; k < 5; ++k) t.push_back({u(rng), u(rng), 0});
      const auto nn = order_targets(g, none, {0, 0, 0}, t, OrderStrategy::NearestNeighbor);
      const auto ex = order_targets(g, none, {0, 0, 0}, t, OrderStrategy::Exact);
      auto perm = ex;
      std::sort(perm.begin(), perm.end());
      CHECK(perm == std::vector<std::size_t>{0, 1, 2, 3, 4});
      CHECK(tour_length(g, none, {0, 0, 0}, t, ex) <= tour_length(g, none, {0, 0, 0}, t, nn));
    }

    std::vector<CellIndex> many;
    for (int k = 0; k < 9; ++k) many.push_back({k, k, 0});
    CHECK_THROWS_AS(order_targets(g, none, {0, 0, 0}, many, OrderStrategy::Exact), InvalidConfiguration);
  }

  TEST_CASE("random walk baseline") {
    const auto g = flat_grid(5, 5);
    const ObstacleMap none(g);
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto r = random_walk_baseline(g, none, {2, 2, 0}, {3, 2, 0}, 10000, seed);
      if (!r.reached) {
        ++failures;
        continue;
      }
      CHECK(r.trajectory.cells.back() == CellIndex{3, 2, 0});
    }
    CHECK(failures < 10);
    CHECK(random_walk_baseline(g, none, {1, 1, 0}, {1, 1, 0}, 10, 0).trajectory.steps() == 0);

    std::vector<double> seal(25, 0.0);
    seal[3 * 5 + 4] = seal[4 * 5 + 3] = 20;
    const ObstacleMap sealed(g, seal);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = random_walk_baseline(g, sealed, {0, 0, 0}, {4, 4, 0}, 2000, seed);
      CHECK_FALSE(r.reached);
      CHECK_FALSE(r.trajectory.feasible);
      CHECK(r.trajectory.steps() == 2000);
    }
    const auto a = random_walk_baseline(g, none, {0, 0, 0}, {4, 4, 0}, 10000, 5);
    const auto b = random_walk_baseline(g, none, {0, 0, 0}, {4, 4, 0}, 10000, 5);
    CHECK(a.trajectory.cells == b.trajectory.cells);
    CHECK_NOTHROW(validate_trajectory(g, none, a.trajectory));
  }

  TEST_CASE("oracle missions have minimal legs and stitch correctly") {
    const auto g = build_grid({300, 300, 60}, 20, {0, 60});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto obs = random_pillars(g, {10, 20, 60, 2}, seed);
      Rng rng(seed);
      std::uniform_int_distribution<int> u(0, 14), z(0, 2);
      std::vector<CellIndex> targets;
      while (targets.size() < 4) {
        const CellIndex c{u(rng), u(rng), z(rng)};
        if (!is_collision(g, obs, c) && shortest_path_oracle(g, obs, {0, 0, 0}, c)) targets.push_back(c);
      }
      if (is_collision(g, obs, {0, 0, 0})) continue;
      const auto m = plan_mission_cells(g, obs, targets, {0, 0, 0}, Method::BfsOracle, small_config(seed));
      REQUIRE(m.legs.size() == 4);
      std::size_t sum = 0;
      for (std::size_t k = 0; k < 4; ++k) {
        CHECK(m.trajectory.leg_steps(k) == m.legs[k].oracle_steps);
        CHECK(m.trajectory.cells[m.trajectory.leg_ends[k]] == m.ordered_targets[k]);
        sum += m.trajectory.leg_steps(k);
      }
      CHECK(sum == m.trajectory.steps());
      CHECK(m.loss_m(20) == doctest::Approx(20.0 * sum));
      CHECK_NOTHROW(validate_trajectory(g, obs, m.trajectory));

      for (Method method : {Method::QlutpStar, Method::FixedEpsQl}) {
        const auto learned = plan_mission_cells(g, obs, targets, {0, 0, 0}, method, small_config(seed));
        CHECK(learned.trajectory.steps() >= m.trajectory.steps());
        CHECK(learned.order == m.order);
        CHECK_NOTHROW(validate_trajectory(g, obs, learned.trajectory));
      }
    }
  }

  TEST_CASE("learned plan matches the oracle on small missions") {
    const auto g6 = flat_grid(6, 6);
    const auto wall = detour_wall(g6);
    const std::vector<CellIndex> targets{{4, 0, 0}, {5, 5, 0}};
    const auto oracle = plan_mission_cells(g6, wall, targets, {0, 0, 0}, Method::BfsOracle, small_config(1));
    const auto star = plan_mission_cells(g6, wall, targets, {0, 0, 0}, Method::QlutpStar, small_config(1));
    CHECK(star.loss_m(20) == oracle.loss_m(20));
    CHECK(star.trajectory.feasible);
  }

  TEST_CASE("adding a hovering point never shortens a given-order mission") {
    const auto g = build_grid({300, 300, 20}, 20, {0, 20});
    const ObstacleMap none(g);
    auto cfg = small_config(0);
    cfg.ordering = OrderStrategy::GivenOrder;
    Rng rng(3);
    std::uniform_int_distribution<int> u(0, 14);
    std::vector<CellIndex> targets;
    double prev = 0;
    for (int k = 0; k < 6; ++k) {
      targets.push_back({u(rng), u(rng), 0});
      const double loss = plan_mission_cells(g, none, targets, {0, 0, 0}, Method::BfsOracle, cfg).loss_m(20);
      CHECK(loss >= prev);
      prev = loss;
    }
  }

  TEST_CASE("infeasible missions name the target") {
    const auto g = flat_grid(5, 5);
    std::vector<double> seal(25, 0.0);
    seal[3 * 5 + 4] = seal[4 * 5 + 3] = 20;
    const ObstacleMap sealed(g, seal);
    const std::vector<CellIndex> targets{{1, 1, 0}, {4, 4, 0}};
    for (Method m : {Method::BfsOracle, Method::QlutpStar, Method::RandomWalk}) {
      try {
        plan_mission_cells(g, sealed, targets, {0, 0, 0}, m, small_config(0));
        FAIL("expected InfeasibleMission");
      } catch (const InfeasibleMission& e) {
        CHECK(std::string(e.what()).find("(4,4,0)") != std::string::npos);
      }
    }
    CHECK_THROWS_AS(plan_mission_cells(g, sealed, {}, {0, 0, 0}, Method::BfsOracle, small_config(0)),
                    InvalidConfiguration);
  }

  TEST_CASE("mission from a hovering plan") {
    const auto g = build_grid({400, 400, 200}, 20, {120, 180});
    const ObstacleMap none(g);
    HoveringPlan plan;
    plan.points = {{{50, 50}, 3, {}}, {{350, 90}, 2, {}}, {{210, 330}, 4, {}}};
    plan.coverage_rate = 0.95;
    const auto m = plan_mission(g, none, plan, {0, 0, 7}, Method::BfsOracle, small_config(0));
    CHECK(m.ordered_targets.size() == 3);
    for (const auto& c : m.ordered_targets) CHECK(c.iz == 7);
    CHECK(m.meets_coverage_threshold);
    CHECK(m.substituted == std::vector<bool>{false, false, false});
    CHECK(m.method == Method::BfsOracle);
  }

  TEST_CASE("trajectory CSV and method names") {
    const auto g = flat_grid(5, 5);
    const auto path = shortest_path_oracle(g, ObstacleMap(g), {0, 0, 0}, {2, 0, 0});
    const std::string csv = trajectory_csv(g, *path);
    CHECK(csv.rfind("leg,step,ix,iy,iz,x_m,y_m,z_m\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    for (Method m : {Method::Qlutp, Method::QlutpStar, Method::FixedEpsQl, Method::BfsOracle, Method::RandomWalk})
      CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("dijkstra"), InvalidConfiguration);
    CHECK_THROWS_AS(schedule_for(PlannerConfig{}, Method::BfsOracle), InvalidConfiguration);
  }
}
