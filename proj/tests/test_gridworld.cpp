#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "uavcov/errors.hpp"
#include "uavcov/gridworld.hpp"
#include "uavcov/seeding.hpp"

using namespace uavcov;

namespace {

GridSpace paper_grid() { return build_grid({2000, 2000, 200}, 20, {120, 180}); }
GridSpace full_band(Vec3 extent, double cell) { return build_grid(extent, cell, {0, extent.z}); }

}  // namespace

TEST_SUITE("gridworld") {
  TEST_CASE("cell counts use the ceiling of extent over cell size") {
    auto g = paper_grid();
    CHECK(g.nx() == 100);
    CHECK(g.ny() == 100);
    CHECK(g.nz() == 10);
    auto h = build_grid({2010, 2000, 200}, 20, {120, 180});
    CHECK(h.nx() == 101);
    CHECK(h.ny() == 100);
    auto one = full_band({20, 20, 20}, 20);
    CHECK(one.nx() == 1);
    CHECK(one.ny() == 1);
    CHECK(one.nz() == 1);
  }

  TEST_CASE("ceiling characterization over random extents") {
    Rng rng(11);
    std::uniform_real_distribution<double> len(0.5, 3000.0), cell(0.3, 80.0);
    for (int i = 0; i < 2000; ++i) {
      const double lx = len(rng), ly = len(rng), c = cell(rng);
      const double lz = std::max(lx, c);
      const auto g = build_grid({lx, ly, lz}, c, {0, lz});
      for (auto [n, l] : {std::pair{g.nx(), lx}, {g.ny(), ly}, {g.nz(), lz}}) {
        CHECK(c * n >= l);
        CHECK(l > c * (n - 1));
      }
    }
  }

  TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(build_grid({0, 10, 10}, 1, {0, 10}), InvalidConfiguration);
    CHECK_THROWS_AS(build_grid({10, 10, 10}, 0, {0, 10}), InvalidConfiguration);
    CHECK_THROWS_AS(build_grid({10, 10, 10}, -1, {0, 10}), InvalidConfiguration);
    CHECK_THROWS_AS(build_grid({10, 10, 10}, 1, {5, 11}), InvalidConfiguration);
    CHECK_THROWS_AS(build_grid({10, 10, 10}, 1, {-1, 5}), InvalidConfiguration);
    CHECK_THROWS_AS(build_grid({10, 10, 10}, 1, {6, 5}), InvalidConfiguration);
    // Band between two cell centers.
    CHECK_THROWS_AS(build_grid({100, 100, 100}, 20, {31, 49}), InvalidConfiguration);
  }

  TEST_CASE("paper altitude band covers layers 6 to 8") {
    auto g = paper_grid();
    CHECK(g.band_lo() == 6);
    CHECK(g.band_hi() == 8);
    CHECK_FALSE(g.in_band({0, 0, 5}));
    CHECK(g.in_band({0, 0, 6}));
    CHECK(g.in_band({0, 0, 8}));
    CHECK_FALSE(g.in_band({0, 0, 9}));
  }

  TEST_CASE("cell centers") {
    auto g = paper_grid();
    CHECK(cell_center(g, {0, 0, 0}) == Vec3{10, 10, 10});
    CHECK(cell_center(g, {99, 99, 9}) == Vec3{1990, 1990, 190});
    auto fine = full_band({100, 100, 100}, 10);
    CHECK(cell_center(fine, {3, 0, 0}) == Vec3{35, 5, 5});
    CHECK_THROWS_AS(cell_center(g, {100, 0, 0}), BoundsError);
    CHECK_THROWS_AS(cell_center(g, {0, -1, 0}), BoundsError);
    CHECK_THROWS_AS(cell_center(g, {0, 0, 10}), BoundsError);
  }

  TEST_CASE("cell centers are injective and flat indices round-trip") {
    auto g = build_grid({140, 100, 60}, 20, {0, 60});
    std::set<std::tuple<double, double, double>> seen;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const CellIndex c = g.unflat(i);
      CHECK(g.flat(c) == i);
      const Vec3 p = g.center(c);
      CHECK(seen.insert({p.x, p.y, p.z}).second);
    }
    CHECK(seen.size() == g.cell_count());
  }

  TEST_CASE("collision compares the center altitude with the column height") {
    auto g = paper_grid();
    const ObstacleMap empty(g);
    for (int iz = 0; iz < g.nz(); ++iz) CHECK_FALSE(is_collision(g, empty, {5, 5, iz}));

    std::vector<double> h(100 * 100, 0.0);
    h[7 * 100 + 3] = 200;  // (3, 7): full-height pillar
    h[2 * 100 + 2] = 100;  // (2, 2)
    const ObstacleMap obs(g, h);
    for (int iz = 0; iz < g.nz(); ++iz) CHECK(is_collision(g, obs, {3, 7, iz}));
    CHECK_FALSE(is_collision(g, obs, {2, 2, 6}));  // center 130 m
    CHECK(is_collision(g, obs, {2, 2, 4}));        // center 90 m
    CHECK_THROWS_AS(is_collision(g, obs, {100, 0, 0}), BoundsError);
  }

  TEST_CASE("obstacle height field validation") {
    auto g = build_grid({100, 100, 100}, 20, {0, 100});
    CHECK_THROWS_AS(ObstacleMap(g, std::vector<double>(24, 0.0)), InvalidConfiguration);
    std::vector<double> bad(25, 0.0);
    bad[3] = -1;
    CHECK_THROWS_AS(ObstacleMap(g, bad), InvalidConfiguration);
    bad[3] = 101;
    CHECK_THROWS_AS(ObstacleMap(g, bad), InvalidConfiguration);
    std::vector<double> ok(25, 0.0);
    ok[0] = ok[1] = 50;
    CHECK(ObstacleMap(g, ok).column_density() == doctest::Approx(2.0 / 25));
  }

  TEST_CASE("neighbour counts") {
    auto g = full_band({100, 100, 100}, 20);
    const ObstacleMap empty(g);
    CHECK(legal_neighbors(g, empty, {2, 2, 2}).size() == 6);
    CHECK(legal_neighbors(g, empty, {0, 0, 0}).size() == 3);
    CHECK(legal_neighbors(g, empty, {4, 4, 4}).size() == 3);

    std::vector<double> h(25, 0.0);
    h[2 * 5 + 3] = 100;  // pillar at (3, 2)
    const ObstacleMap obs(g, h);
    const auto n = legal_neighbors(g, obs, {2, 2, 2});
    CHECK(n.size() == 5);
    for (const auto& m : n) CHECK(m.cell != CellIndex{3, 2, 2});

    // The band removes vertical moves out of it.
    auto banded = paper_grid();
    const ObstacleMap none(banded);
    const auto top = legal_neighbors(banded, none, {5, 5, 8});
    CHECK(top.size() == 5);
    CHECK_FALSE(legal_actions(banded, none, {5, 5, 8}).contains(Action::Up));
    CHECK(legal_actions(banded, none, {5, 5, 6}).size() == 5);
    CHECK_FALSE(legal_actions(banded, none, {5, 5, 6}).contains(Action::Down));
  }

  TEST_CASE("neighbours come back in action order") {
    auto g = full_band({100, 100, 100}, 20);
    const ObstacleMap empty(g);
    const auto n = legal_neighbors(g, empty, {2, 2, 2});
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n[i].action == kAllActions[i]);
    CHECK(n[0].cell == CellIndex{3, 2, 2});
    CHECK(n[5].cell == CellIndex{2, 2, 1});
  }

  TEST_CASE("legal neighbours stay in bounds, in band and collision-free, and are reversible") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto g = build_grid({200, 160, 200}, 20, {50, 150});
      const auto obs = random_columns(g, 0.25, 120.0, seed);
      for (std::size_t i = 0; i < g.cell_count(); ++i) {
        const CellIndex a = g.unflat(i);
        if (!g.in_band(a) || is_collision(g, obs, a)) continue;
        for (const auto& m : legal_neighbors(g, obs, a)) {
          REQUIRE(g.contains(m.cell));
          CHECK(g.in_band(m.cell));
          CHECK_FALSE(is_collision(g, obs, m.cell));
          const Vec3 c = g.center(m.cell);
          CHECK(c.z >= 50);
          CHECK(c.z <= 150);
          const auto back = legal_neighbors(g, obs, m.cell);
          CHECK(std::any_of(back.begin(), back.end(), [&](const Move& b) { return b.cell == a; }));
        }
      }
    }
  }

  TEST_CASE("action masks") {
    ActionMask m;
    CHECK(m.empty());
    m.insert(Action::Left);
    m.insert(Action::Forward);
    CHECK(m.size() == 2);
    CHECK(m.nth(0) == Action::Forward);
    CHECK(m.nth(1) == Action::Left);
    CHECK_THROWS_AS(m.nth(2), BoundsError);
    CHECK(m.to_vector() == std::vector<Action>{Action::Forward, Action::Left});
  }

  TEST_CASE("procedural obstacles are deterministic per seed") {
    auto g = paper_grid();
    const PillarParams p{40, 60, 200, 3};
    const auto a = random_pillars(g, p, 5), b = random_pillars(g, p, 5), c = random_pillars(g, p, 6);
    CHECK(std::equal(a.heights().begin(), a.heights().end(), b.heights().begin()));
    CHECK_FALSE(std::equal(a.heights().begin(), a.heights().end(), c.heights().begin()));
    for (double h : a.heights()) CHECK((h == 0.0 || (h >= 60 && h <= 200)));
    CHECK(a.column_density() > 0.0);
    CHECK(a.column_density() <= 40.0 * 9 / 10000);
    CHECK_THROWS_AS(random_pillars(g, {1, 50, 40, 1}, 0), InvalidConfiguration);
    CHECK_THROWS_AS(random_columns(g, 1.5, 10, 0), InvalidConfiguration);
  }

  TEST_CASE("obstacle map JSON round trip") {
    auto g = build_grid({200, 100, 100}, 20, {0, 100});
    const auto obs = random_columns(g, 0.3, 70, 3);
    const auto back = obstacle_map_from_json(g, obstacle_map_to_json(g, obs));
    CHECK(std::equal(obs.heights().begin(), obs.heights().end(), back.heights().begin()));

    const auto path = std::filesystem::temp_directory_path() / "uavcov_obstacles_test.json";
    save_obstacle_map(path, g, obs);
    const auto loaded = load_obstacle_map(path, g);
    CHECK(std::equal(obs.heights().begin(), obs.heights().end(), loaded.heights().begin()));
    std::filesystem::remove(path);

    auto other = build_grid({100, 100, 100}, 20, {0, 100});
    CHECK_THROWS_AS(obstacle_map_from_json(other, obstacle_map_to_json(g, obs)), InvalidConfiguration);
    CHECK_THROWS_AS(obstacle_map_from_json(g, "{not json"), InvalidConfiguration);
    CHECK_THROWS_AS(load_obstacle_map("/nonexistent/map.json", g), InvalidConfiguration);
  }
}
