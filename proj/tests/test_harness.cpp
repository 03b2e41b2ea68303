#include <doctest.h>

#include <fstream>
#include <sstream>

#include "uavcov/config.hpp"
#include "uavcov/studies.hpp"
#include "uavcov/svg.hpp"

using namespace uavcov;

namespace {

constexpr const char* kTiny = R"({
  "master_seed": 5,
  "grid": {"extent_m": [300, 300, 200], "cell_size_m": 20, "altitude_band_m": [120, 180]},
  "obstacles": {"pillars": {"count": 4, "min_height_m": 60, "max_height_m": 200, "footprint_cells": 2}},
  "users": {"counts": [8, 16], "seeds": 3},
  "radio": {"swarm_radius_m": 120},
  "clustering": {"candidate_ns": [1, 2, 3, 4, 5, 6], "restarts": 3},
  "learning": {"episodes": 40, "max_episodes": 20000, "seeds": 2},
  "planner": {"hp_counts": [2, 3], "user_count": 10, "random_walk_cap": 200000},
  "convergence": {"scenarios": 2, "extent_m": [240, 240, 200], "episodes": 200, "min_leg_steps": 6,
                  "pillars": {"count": 3, "min_height_m": 100, "max_height_m": 200, "footprint_cells": 2}}
})";

StudyOptions serial() { return {1}; }

bool every_row_has_hash(const std::string& csv, const std::string& hash) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  if (line.rfind("config_hash,", 0) != 0) return false;
  while (std::getline(in, line))
    if (line.rfind(hash + ",", 0) != 0) return false;
  return true;
}

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("empty config yields the default preset") {
    const auto c = parse_config("");
    CHECK(c.grid.extent_m.x == 2000);
    CHECK(c.grid.cell_size_m == 20);
    CHECK(c.grid.altitude_band_m.min_m == 120);
    CHECK(c.learning.alpha == 0.6);
    CHECK(c.learning.gamma == 0.6);
    CHECK(c.learning.episodes == 40);
    CHECK(*c.radio.swarm_radius_m == 500);
    CHECK(c.clustering.coverage_threshold == 0.9);
    CHECK(c.users.counts == std::vector<int>{30, 35, 40, 45, 50});
    CHECK(c.planner.hp_counts == std::vector<int>{3, 6, 9});
    CHECK(validate_config_text("{}").empty());
    CHECK(resolve_swarm_radius(c) == 500);
  }

  TEST_CASE("config errors carry field paths") {
    const auto issues = validate_config_text(R"({"grid": {"cell_size_m": 0}, "learning": {"alpha": 1.5}})");
    REQUIRE(issues.size() == 2);
    CHECK(issues[0].path == "grid.cell_size_m");
    CHECK(issues[1].path == "learning.alpha");
    CHECK(validate_config_text(R"({"extras": 1})")[0].path == "extras");
    CHECK(validate_config_text(R"({"learning": {"gama": 0.5}})")[0].path == "learning.gama");
    CHECK(validate_config_text(R"({"learning": {"schedules": {"qlutp": {"kind": "cosine"}}}})")[0].path ==
          "learning.schedules.qlutp.kind");
    CHECK(validate_config_text(R"({"planner": {"start_cell": [0, 0, 0]}})")[0].path == "planner.start_cell");
    CHECK(validate_config_text(R"({"radio": {"swarm_radius_m": 300, "a2a": {}}})")[0].path == "radio");
    CHECK(validate_config_text("{ not json")[0].path == "<root>");
    CHECK_THROWS_AS(parse_config(R"({"users": {"seeds": -1}})"), ConfigError);
  }

  TEST_CASE("config JSON round trip and hash") {
    const auto c = parse_config(kTiny);
    const auto again = parse_config(to_json(c).dump());
    CHECK(to_json(again) == to_json(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 16);

    auto moved = c;
    moved.output.directory = "/elsewhere";
    moved.output.svg = false;
    CHECK(config_hash(moved) == config_hash(c));
    auto changed = c;
    changed.learning.gamma = 0.7;
    CHECK(config_hash(changed) != config_hash(c));
  }

  TEST_CASE("derived radio section") {
    std::ifstream in(UAVCOV_SOURCE_DIR "/configs/radio_example.json");
    std::stringstream text;
    text << in.rdbuf();
    const auto c = parse_config(text.str());
    CHECK_FALSE(c.radio.swarm_radius_m);
    CHECK(resolve_swarm_radius(c) == doctest::Approx(500).epsilon(1e-9));
  }

  TEST_CASE("linear horizon binding") {
    const auto bound = std::get<LinearDecay>(bind_horizon(LinearDecay{0.1, 0.005, 0}, 2000));
    CHECK(bound.horizon_episodes == 2000);
    CHECK(std::get<LinearDecay>(bind_horizon(LinearDecay{0.1, 0.005, 7}, 2000)).horizon_episodes == 7);
    CHECK(std::holds_alternative<ExpDecay>(bind_horizon(ExpDecay{}, 10)));
  }

  TEST_CASE("convergence index") {
    auto curve = [](std::vector<int> steps) {
      LearningCurve c;
      for (int s : steps) c.push_back({s, 0.0, 0.0, true});
      return c;
    };
    CHECK(episodes_to_converge(curve({30, 20, 10, 10, 11, 10}), 10, 0.1, 3) == 2);
    CHECK(episodes_to_converge(curve({10, 10, 30, 10, 10}), 10, 0.1, 3) == 5);
    CHECK(episodes_to_converge(curve({10, 12}), 10, 0.1, 1) == 0);
    CHECK(episodes_to_converge(curve({12, 12}), 10, 0.1, 1) == 2);
    auto missed = curve({10, 10, 10});
    missed[1].reached_target = false;
    CHECK(episodes_to_converge(missed, 10, 0.1, 2) == 3);
  }

  TEST_CASE("coverage sweep: schema, determinism and shape") {
    const auto c = parse_config(kTiny);
    const auto a = run_coverage_sweep(c, serial());
    const auto b = run_coverage_sweep(c, StudyOptions{3});
    const std::string runs = coverage_runs_csv(a);
    CHECK(runs == coverage_runs_csv(b));
    CHECK(header(runs) == "config_hash,seed,method,N,M,coverage,steps,loss_m,episodes_to_converge,users");
    CHECK(every_row_has_hash(runs, a.config_hash));
    const std::string summary = coverage_summary_csv(a);
    CHECK(header(summary) == "config_hash,M,N,seeds,mean_coverage,std_coverage");
    CHECK(a.runs.size() == 2 * 3 * 6);
    CHECK(a.summary.size() == 2 * 6);
    for (const auto& r : a.runs) {
      CHECK(r.coverage >= 0.0);
      CHECK(r.coverage <= 1.0);
    }
    for (int n = 2; n <= 6; ++n) CHECK(a.mean_at(n) >= a.mean_at(n - 1) - 0.05);
    CHECK(a.mean_at(6) > a.mean_at(1));
  }

  TEST_CASE("one hovering point per user with a huge radius covers everyone") {
    auto c = parse_config(kTiny);
    c.radio.swarm_radius_m = 1e6;
    c.users.counts = {5};
    c.clustering.candidate_ns = {5};
    c.acceptance.coverage_at_n = 5;
    for (const auto& r : run_coverage_sweep(c, serial()).runs) CHECK(r.coverage == 1.0);
  }

  TEST_CASE("convergence study: schema and sanity") {
    const auto c = parse_config(kTiny);
    const auto s = run_convergence_study(c, serial());
    CHECK(s.failures.empty());
    CHECK(s.scenarios.size() == 2);
    CHECK(s.runs.size() == 2 * 2 * 3);
    for (const auto& r : s.runs) {
      CHECK(r.curve.size() == 200);
      if (r.curve.front().reached_target) CHECK(r.first_steps >= r.optimal_steps);
      CHECK(r.optimal_steps >= 6);
      if (r.converged) CHECK(r.episodes_to_converge < 200);
      CHECK(r.final_quartile_mean >= r.optimal_steps);
    }
    const std::string runs = convergence_runs_csv(s);
    CHECK(every_row_has_hash(runs, s.config_hash));
    CHECK(every_row_has_hash(convergence_curves_csv(s), s.config_hash));
    CHECK(every_row_has_hash(convergence_summary_csv(s), s.config_hash));
    CHECK(runs == convergence_runs_csv(run_convergence_study(c, StudyOptions{2})));
    CHECK(s.find(Method::QlutpStar) != nullptr);
    CHECK(s.find(Method::RandomWalk) == nullptr);
  }

  TEST_CASE("loss study: schema, lower bound and monotone oracle") {
    const auto c = parse_config(kTiny);
    const auto s = run_loss_comparison(c, serial());
    CHECK(s.failures.empty());
    CHECK(s.runs.size() == 2 * 2 * 5);
    for (const auto& r : s.runs) {
      if (!r.feasible) continue;
      const auto* oracle = s.find(r.n, Method::BfsOracle);
      REQUIRE(oracle);
      CHECK(r.loss_m == doctest::Approx(20.0 * r.steps));
    }
    for (int n : {2, 3})
      for (Method m : {Method::QlutpStar, Method::Qlutp, Method::FixedEpsQl, Method::RandomWalk})
        CHECK(s.find(n, m)->mean_loss_m >= s.find(n, Method::BfsOracle)->mean_loss_m);
    CHECK(check_loss_monotone(s).passed);
    const std::string runs = loss_runs_csv(s);
    CHECK(header(runs) ==
          "config_hash,seed,method,N,M,coverage,steps,loss_m,episodes_to_converge,feasible,error");
    CHECK(every_row_has_hash(runs, s.config_hash));
    CHECK(header(loss_summary_csv(s)) == "config_hash,N,method,runs,matched_runs,mean_loss_m,mean_steps");
    CHECK(runs == loss_runs_csv(run_loss_comparison(c, StudyOptions{2})));
  }

  TEST_CASE("figures are re-rendered identically from CSV") {
    const auto c = parse_config(kTiny);
    const auto cov = coverage_summary_csv(run_coverage_sweep(c, serial()));
    const std::string svg = coverage_svg_from_csv(cov);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg == coverage_svg_from_csv(cov));
    CHECK(svg.find("M=8") != std::string::npos);

    const auto loss = loss_summary_csv(run_loss_comparison(c, serial()));
    CHECK(loss_svg_from_csv(loss) == loss_svg_from_csv(loss));
    CHECK(loss_svg_from_csv(loss).find("bfs-oracle") != std::string::npos);

    const auto table = svg::CsvTable::parse("a,b\n1,2\n3,\n");
    CHECK(table.rows() == 2);
    CHECK(table.number(0, "b") == 2);
    CHECK(std::isnan(table.number(1, "b")));
    CHECK_THROWS_AS(table.at(0, "c"), InvalidConfiguration);
    CHECK_THROWS_AS(svg::CsvTable::parse("a,b\n1\n"), InvalidConfiguration);
  }

  TEST_CASE("bound checks") {
    LossStudy s;
    s.summary = {{3, Method::BfsOracle, 1, 1, 100, 5}, {3, Method::QlutpStar, 1, 1, 120, 6},
                 {6, Method::BfsOracle, 1, 1, 90, 5}, {6, Method::QlutpStar, 1, 1, 150, 6}};
    CHECK_FALSE(check_loss_monotone(s).passed);
    s.summary[2].mean_loss_m = 200;
    s.summary[3].mean_loss_m = 220;
    CHECK(check_loss_monotone(s).passed);
    CHECK(check_loss_ordering(s).passed);
    s.summary[3].mean_loss_m = 150;
    CHECK_FALSE(check_loss_ordering(s).passed);
  }
}
