#include "uavcov/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include "uavcov/errors.hpp"
#include "uavcov/seeding.hpp"

namespace uavcov {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& i : issues) out += "\n  " + i.path + ": " + i.message;
  return out;
}

class Reader {
 public:
  explicit Reader(std::vector<ConfigIssue>& issues) : issues_(issues) {}

  void fail(const std::string& path, const std::string& message) { issues_.push_back({path, message}); }

  // Returns the object at `key`, or null when absent. Non-objects are reported.
  const json* section(const json& parent, const std::string& key, const std::string& path) {
    auto it = parent.find(key);
    if (it == parent.end() || it->is_null()) return nullptr;
    if (!it->is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& obj, const std::string& key, const std::string& path, double& out,
              const std::function<bool(double)>& ok = {}, const char* rule = "") {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      check(path, out, ok, rule);
      return;
    }
    if (!it->is_number()) return fail(path, "expected a number");
    out = it->get<double>();
    check(path, out, ok, rule);
  }

  void integer(const json& obj, const std::string& key, const std::string& path, int& out,
               int min_value, const char* rule) {
    auto it = obj.find(key);
    if (it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer()) return fail(path, "expected an integer");
      const auto v = it->get<long long>();
      if (v > std::numeric_limits<int>::max() || v < std::numeric_limits<int>::min())
        return fail(path, "out of range");
      out = static_cast<int>(v);
    }
    if (out < min_value) fail(path, rule);
  }

  void int64(const json& obj, const std::string& key, const std::string& path, long long& out,
             long long min_value, const char* rule) {
    auto it = obj.find(key);
    if (it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer()) return fail(path, "expected an integer");
      out = it->get<long long>();
    }
    if (out < min_value) fail(path, rule);
  }

  void u64(const json& obj, const std::string& key, const std::string& path, std::uint64_t& out) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    if (it->is_number_unsigned()) {
      out = it->get<std::uint64_t>();
    } else if (it->is_number_integer()) {
      fail(path, "must be non-negative");
    } else {
      fail(path, "expected an unsigned integer");
    }
  }

  void boolean(const json& obj, const std::string& key, const std::string& path, bool& out) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    if (!it->is_boolean()) return fail(path, "expected true or false");
    out = it->get<bool>();
  }

  bool string(const json& obj, const std::string& key, const std::string& path, std::string& out) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return false;
    if (!it->is_string()) {
      fail(path, "expected a string");
      return false;
    }
    out = it->get<std::string>();
    return true;
  }

  void numbers(const json& obj, const std::string& key, const std::string& path, std::vector<double>& out,
               std::size_t exact_size) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    if (!it->is_array() || it->size() != exact_size)
      return fail(path, "expected an array of " + std::to_string(exact_size) + " numbers");
    std::vector<double> v;
    for (const auto& e : *it) {
      if (!e.is_number()) return fail(path, "expected an array of numbers");
      v.push_back(e.get<double>());
    }
    out = std::move(v);
  }

  void integers(const json& obj, const std::string& key, const std::string& path, std::vector<int>& out,
                int min_value) {
    auto it = obj.find(key);
    if (it != obj.end() && !it->is_null()) {
      if (!it->is_array()) return fail(path, "expected an array of integers");
      std::vector<int> v;
      for (const auto& e : *it) {
        if (!e.is_number_integer()) return fail(path, "expected an array of integers");
        v.push_back(e.get<int>());
      }
      out = std::move(v);
    }
    if (out.empty()) return fail(path, "must not be empty");
    for (int v : out)
      if (v < min_value) return fail(path, "entries must be >= " + std::to_string(min_value));
  }

 private:
  void check(const std::string& path, double v, const std::function<bool(double)>& ok, const char* rule) {
    if (!std::isfinite(v)) return fail(path, "must be finite");
    if (ok && !ok(v)) fail(path, rule);
  }

  std::vector<ConfigIssue>& issues_;
};

auto positive = [](double v) { return v > 0.0; };

Vec3 to_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

void read_pillars(Reader& r, const json& parent, const std::string& path, PillarParams& p) {
  const json* s = r.section(parent, "pillars", path);
  if (s) {
    r.integer(*s, "count", path + ".count", p.count, 0, "must be >= 0");
    r.number(*s, "min_height_m", path + ".min_height_m", p.min_height_m, [](double v) { return v >= 0.0; },
             "must be >= 0");
    r.number(*s, "max_height_m", path + ".max_height_m", p.max_height_m, [](double v) { return v >= 0.0; },
             "must be >= 0");
    r.integer(*s, "footprint_cells", path + ".footprint_cells", p.footprint_cells, 1, "must be >= 1");
  }
  if (p.max_height_m < p.min_height_m) r.fail(path + ".max_height_m", "must be >= min_height_m");
}

EpsilonSchedule read_schedule(Reader& r, const json& parent, const std::string& key,
                              const std::string& path, EpsilonSchedule fallback) {
  const json* s = r.section(parent, key, path);
  if (!s) return fallback;
  std::string kind;
  if (!r.string(*s, "kind", path + ".kind", kind)) {
    r.fail(path + ".kind", "required: constant, linear or exp");
    return fallback;
  }
  auto unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (kind == "constant") {
    ConstantEpsilon c;
    r.number(*s, "epsilon", path + ".epsilon", c.epsilon, unit, "must lie in (0, 1)");
    return c;
  }
  if (kind == "linear" || kind == "exp") {
    double start = 0.1, floor = 0.005;
    r.number(*s, "start", path + ".start", start, unit, "must lie in (0, 1)");
    r.number(*s, "floor", path + ".floor", floor, unit, "must lie in (0, 1)");
    if (floor > start) r.fail(path + ".floor", "must be <= start");
    if (kind == "linear") {
      LinearDecay d{start, floor, 0};
      r.integer(*s, "horizon_episodes", path + ".horizon_episodes", d.horizon_episodes, 0, "must be >= 0");
      return d;
    }
    ExpDecay d{start, floor, 0.002};
    r.number(*s, "rate", path + ".rate", d.rate, [](double v) { return v >= 0.0; }, "must be >= 0");
    return d;
  }
  r.fail(path + ".kind", "unknown schedule '" + kind + "' (constant, linear, exp)");
  return fallback;
}

json schedule_json(const EpsilonSchedule& schedule) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantEpsilon>)
          return {{"kind", "constant"}, {"epsilon", s.epsilon}};
        else if constexpr (std::is_same_v<T, LinearDecay>)
          return {{"kind", "linear"}, {"start", s.start}, {"floor", s.floor}, {"horizon_episodes", s.horizon_episodes}};
        else
          return {{"kind", "exp"}, {"start", s.start}, {"floor", s.floor}, {"rate", s.rate}};
      },
      schedule);
}

json pillars_json(const PillarParams& p) {
  return {{"count", p.count},
          {"min_height_m", p.min_height_m},
          {"max_height_m", p.max_height_m},
          {"footprint_cells", p.footprint_cells}};
}

// Every field of the input must survive normalization.
void report_unknown_fields(const json& given, const json& normalized, const std::string& prefix, Reader& r) {
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!normalized.contains(key)) {
      r.fail(path, "unknown field");
    } else if (value.is_object() && normalized[key].is_object()) {
      report_unknown_fields(value, normalized[key], path, r);
    }
  }
}

ExperimentConfig parse_impl(std::string_view text, const std::filesystem::path& base_dir,
                            std::vector<ConfigIssue>& issues) {
  ExperimentConfig c;
  Reader r(issues);

  json root;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (!blank) {
    try {
      root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
      r.fail("<root>", std::string("not valid JSON: ") + e.what());
      return c;
    }
  }
  if (root.is_null()) root = json::object();
  if (!root.is_object()) {
    r.fail("<root>", "expected an object");
    return c;
  }

  static const std::set<std::string> known{"master_seed", "grid",     "obstacles",   "users",
                                           "radio",       "clustering", "learning",  "planner",
                                           "convergence", "output",   "acceptance"};
  for (const auto& [key, _] : root.items())
    if (!known.count(key)) r.fail(key, "unknown section");

  r.u64(root, "master_seed", "master_seed", c.master_seed);

  if (const json* g = r.section(root, "grid", "grid")) {
    std::vector<double> ext{c.grid.extent_m.x, c.grid.extent_m.y, c.grid.extent_m.z};
    r.numbers(*g, "extent_m", "grid.extent_m", ext, 3);
    c.grid.extent_m = to_vec3(ext);
    r.number(*g, "cell_size_m", "grid.cell_size_m", c.grid.cell_size_m, positive, "must be > 0");
    std::vector<double> band{c.grid.altitude_band_m.min_m, c.grid.altitude_band_m.max_m};
    r.numbers(*g, "altitude_band_m", "grid.altitude_band_m", band, 2);
    c.grid.altitude_band_m = {band[0], band[1]};
  }
  const Vec3 e = c.grid.extent_m;
  if (!(e.x > 0 && e.y > 0 && e.z > 0)) r.fail("grid.extent_m", "all extents must be > 0");
  const auto band = c.grid.altitude_band_m;
  if (!(band.min_m >= 0 && band.min_m <= band.max_m && band.max_m <= e.z))
    r.fail("grid.altitude_band_m", "must satisfy 0 <= min <= max <= extent z");

  if (const json* o = r.section(root, "obstacles", "obstacles")) {
    std::string file;
    if (r.string(*o, "file", "obstacles.file", file)) {
      std::filesystem::path p(file);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.obstacles.file = p;
      if (!std::filesystem::exists(p)) r.fail("obstacles.file", "no such file: " + p.string());
    }
    read_pillars(r, *o, "obstacles.pillars", c.obstacles.pillars);
    r.u64(*o, "seed", "obstacles.seed", c.obstacles.seed);
  }

  if (const json* u = r.section(root, "users", "users")) {
    std::string mode;
    if (r.string(*u, "mode", "users.mode", mode)) {
      if (mode == "fixed")
        c.users.mode = UserSection::Mode::Fixed;
      else if (mode == "ppp")
        c.users.mode = UserSection::Mode::Ppp;
      else
        r.fail("users.mode", "must be 'fixed' or 'ppp'");
    }
    r.integers(*u, "counts", "users.counts", c.users.counts, 1);
    r.integer(*u, "seeds", "users.seeds", c.users.seeds, 1, "must be >= 1");
  }

  if (const json* rs = r.section(root, "radio", "radio")) {
    const bool has_link = rs->contains("a2a") || rs->contains("a2g");
    if (rs->contains("swarm_radius_m")) {
      if (has_link) r.fail("radio", "give either swarm_radius_m or a2a/a2g parameters, not both");
      double v = 0.0;
      r.number(*rs, "swarm_radius_m", "radio.swarm_radius_m", v, positive, "must be > 0");
      c.radio.swarm_radius_m = v;
    } else if (has_link) {
      c.radio.swarm_radius_m.reset();
      link::A2AParams a;
      if (const json* s = r.section(*rs, "a2a", "radio.a2a")) {
        r.number(*s, "tx_power_dbm", "radio.a2a.tx_power_dbm", a.tx_power_dbm);
        r.number(*s, "tx_gain_db", "radio.a2a.tx_gain_db", a.tx_gain_db);
        r.number(*s, "rx_gain_db", "radio.a2a.rx_gain_db", a.rx_gain_db);
        r.number(*s, "threshold_dbm", "radio.a2a.threshold_dbm", a.threshold_dbm);
        r.number(*s, "pathloss_exponent", "radio.a2a.pathloss_exponent", a.pathloss_exponent, positive,
                 "must be > 0");
        r.number(*s, "carrier_hz", "radio.a2a.carrier_hz", a.carrier_hz, positive, "must be > 0");
      }
      link::A2GParams g;
      if (const json* s = r.section(*rs, "a2g", "radio.a2g")) {
        const auto pos = [&](const char* k, double& v) {
          r.number(*s, k, std::string("radio.a2g.") + k, v, positive, "must be > 0");
        };
        pos("ref_channel_gain", g.ref_channel_gain);
        pos("gu_tx_power_w", g.gu_tx_power_w);
        pos("bandwidth_hz", g.bandwidth_hz);
        pos("noise_density_w_per_hz", g.noise_density_w_per_hz);
        pos("rate_threshold_bps", g.rate_threshold_bps);
      }
      c.radio.a2a = a;
      c.radio.a2g = g;
    }
    if (rs->contains("altitude_m") && !(*rs)["altitude_m"].is_null()) {
      double h = 0.0;
      r.number(*rs, "altitude_m", "radio.altitude_m", h, positive, "must be > 0");
      c.radio.altitude_m = h;
    }
  }

  if (const json* s = r.section(root, "clustering", "clustering")) {
    r.integers(*s, "candidate_ns", "clustering.candidate_ns", c.clustering.candidate_ns, 1);
    r.number(*s, "coverage_threshold", "clustering.coverage_threshold", c.clustering.coverage_threshold,
             [](double v) { return v >= 0.0 && v <= 1.0; }, "must lie in [0, 1]");
    r.integer(*s, "restarts", "clustering.restarts", c.clustering.restarts, 1, "must be >= 1");
    r.integer(*s, "max_iters", "clustering.max_iters", c.clustering.max_iters, 1, "must be >= 1");
  }

  auto& L = c.learning;
  if (const json* s = r.section(root, "learning", "learning")) {
    r.number(*s, "alpha", "learning.alpha", L.alpha, [](double v) { return v > 0.0 && v <= 1.0; },
             "must lie in (0, 1]");
    r.number(*s, "gamma", "learning.gamma", L.gamma, [](double v) { return v >= 0.0 && v <= 1.0; },
             "must lie in [0, 1]");
    r.integer(*s, "episodes", "learning.episodes", L.episodes, 1, "must be >= 1");
    r.integer(*s, "max_steps_per_episode", "learning.max_steps_per_episode", L.max_steps_per_episode, 0,
              "must be >= 0 (0 selects the default cap)");
    r.integer(*s, "extension_block", "learning.extension_block", L.extension_block, 1, "must be >= 1");
    r.integer(*s, "max_episodes", "learning.max_episodes", L.max_episodes, 0, "must be >= 0");
    r.integer(*s, "stable_checks", "learning.stable_checks", L.stable_checks, 1, "must be >= 1");
    r.integer(*s, "seeds", "learning.seeds", L.seeds, 1, "must be >= 1");
    std::string handling;
    if (r.string(*s, "obstacle_handling", "learning.obstacle_handling", handling)) {
      if (handling == "penalize")
        L.obstacle_handling = ObstacleHandling::Penalize;
      else if (handling == "mask")
        L.obstacle_handling = ObstacleHandling::Mask;
      else
        r.fail("learning.obstacle_handling", "must be 'penalize' or 'mask'");
    }
    if (const json* sc = r.section(*s, "schedules", "learning.schedules")) {
      for (const auto& [key, _] : sc->items())
        if (key != "fixed-eps-ql" && key != "qlutp" && key != "qlutp-star")
          r.fail("learning.schedules." + key, "unknown method (fixed-eps-ql, qlutp, qlutp-star)");
      L.fixed_eps = read_schedule(r, *sc, "fixed-eps-ql", "learning.schedules.fixed-eps-ql", L.fixed_eps);
      L.qlutp = read_schedule(r, *sc, "qlutp", "learning.schedules.qlutp", L.qlutp);
      L.qlutp_star = read_schedule(r, *sc, "qlutp-star", "learning.schedules.qlutp-star", L.qlutp_star);
    }
  }

  auto& P = c.planner;
  if (const json* s = r.section(root, "planner", "planner")) {
    if (auto it = s->find("methods"); it != s->end()) {
      if (!it->is_array() || it->empty()) {
        r.fail("planner.methods", "expected a non-empty array of method names");
      } else {
        P.methods.clear();
        for (const auto& m : *it) {
          try {
            if (!m.is_string()) throw InvalidConfiguration("expected a method name");
            const Method parsed = parse_method(m.get<std::string>());
            if (std::find(P.methods.begin(), P.methods.end(), parsed) != P.methods.end())
              throw InvalidConfiguration("duplicate method '" + m.get<std::string>() + "'");
            P.methods.push_back(parsed);
          } catch (const InvalidConfiguration& ex) {
            r.fail("planner.methods", ex.what());
          }
        }
      }
    }
    std::string ordering;
    if (r.string(*s, "ordering", "planner.ordering", ordering)) {
      try {
        P.ordering = parse_order_strategy(ordering);
      } catch (const InvalidConfiguration& ex) {
        r.fail("planner.ordering", ex.what());
      }
    }
    if (auto it = s->find("start_cell"); it != s->end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 3 ||
          !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number_integer(); }))
        r.fail("planner.start_cell", "expected [ix, iy, iz]");
      else
        P.start_cell = CellIndex{(*it)[0].get<int>(), (*it)[1].get<int>(), (*it)[2].get<int>()};
    }
    if (s->contains("flight_altitude_m") && !(*s)["flight_altitude_m"].is_null()) {
      double h = 0.0;
      r.number(*s, "flight_altitude_m", "planner.flight_altitude_m", h);
      P.flight_altitude_m = h;
      if (h < band.min_m || h > band.max_m) r.fail("planner.flight_altitude_m", "must lie inside the altitude band");
    }
    r.int64(*s, "random_walk_cap", "planner.random_walk_cap", P.random_walk_cap, 1, "must be >= 1");
    r.integers(*s, "hp_counts", "planner.hp_counts", P.hp_counts, 1);
    r.integer(*s, "user_count", "planner.user_count", P.user_count, 1, "must be >= 1");
  }
  if (P.ordering == OrderStrategy::Exact)
    for (int n : P.hp_counts)
      if (n > kMaxExactTargets)
        r.fail("planner.hp_counts", "exact ordering supports at most " + std::to_string(kMaxExactTargets) +
                                        " hovering points");
  for (int n : P.hp_counts)
    if (n > P.user_count) r.fail("planner.hp_counts", "entries must not exceed planner.user_count");

  auto& C = c.convergence;
  if (const json* s = r.section(root, "convergence", "convergence")) {
    r.integer(*s, "scenarios", "convergence.scenarios", C.scenarios, 1, "must be >= 1");
    std::vector<double> ext{C.extent_m.x, C.extent_m.y, C.extent_m.z};
    r.numbers(*s, "extent_m", "convergence.extent_m", ext, 3);
    C.extent_m = to_vec3(ext);
    read_pillars(r, *s, "convergence.pillars", C.pillars);
    r.integer(*s, "episodes", "convergence.episodes", C.episodes, 1, "must be >= 1");
    r.integer(*s, "min_leg_steps", "convergence.min_leg_steps", C.min_leg_steps, 1, "must be >= 1");
    r.number(*s, "tolerance", "convergence.tolerance", C.tolerance, [](double v) { return v >= 0.0; },
             "must be >= 0");
    r.integer(*s, "window", "convergence.window", C.window, 1, "must be >= 1");
  }
  if (!(C.extent_m.x > 0 && C.extent_m.y > 0 && C.extent_m.z >= band.max_m))
    r.fail("convergence.extent_m", "extents must be > 0 and the height must contain the altitude band");

  if (const json* s = r.section(root, "output", "output")) {
    std::string dir;
    if (r.string(*s, "directory", "output.directory", dir)) {
      if (dir.empty())
        r.fail("output.directory", "must not be empty");
      else
        c.output.directory = dir;
    }
    std::string format;
    if (r.string(*s, "format", "output.format", format)) {
      if (format == "csv")
        c.output.svg = false;
      else if (format == "csv+svg")
        c.output.svg = true;
      else
        r.fail("output.format", "must be 'csv' or 'csv+svg'");
    }
  }

  if (const json* s = r.section(root, "acceptance", "acceptance")) {
    if (s->contains("coverage_min") && !(*s)["coverage_min"].is_null()) {
      double v = 0.0;
      r.number(*s, "coverage_min", "acceptance.coverage_min", v, [](double x) { return x >= 0.0 && x <= 1.0; },
               "must lie in [0, 1]");
      c.acceptance.coverage_min = v;
    }
    r.integer(*s, "coverage_at_n", "acceptance.coverage_at_n", c.acceptance.coverage_at_n, 1, "must be >= 1");
    r.boolean(*s, "convergence_ordering", "acceptance.convergence_ordering", c.acceptance.convergence_ordering);
    r.boolean(*s, "loss_ordering", "acceptance.loss_ordering", c.acceptance.loss_ordering);
  }
  if (c.acceptance.coverage_min) {
    const auto& ns = c.clustering.candidate_ns;
    if (std::find(ns.begin(), ns.end(), c.acceptance.coverage_at_n) == ns.end())
      r.fail("acceptance.coverage_at_n", "must be one of clustering.candidate_ns");
  }

  // Cross-section checks that need a built grid.
  if (issues.empty()) {
    try {
      const GridSpace grid = make_grid(c);
      if (P.start_cell && (!grid.contains(*P.start_cell) || !grid.in_band(*P.start_cell)))
        r.fail("planner.start_cell", "must be a cell inside the grid and the altitude band");
      build_grid(C.extent_m, c.grid.cell_size_m, c.grid.altitude_band_m);
    } catch (const InvalidConfiguration& ex) {
      r.fail("grid", ex.what());
    }
    if (!c.radio.swarm_radius_m) {
      try {
        resolve_swarm_radius(c);
      } catch (const Error& ex) {
        r.fail("radio", ex.what());
      }
    }
  }
  if (issues.empty()) report_unknown_fields(root, to_json(c), "", r);
  return c;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : InvalidConfiguration(join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ConfigIssue> issues;
  ExperimentConfig c = parse_impl(text, base_dir, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"<file>", "cannot read " + path.string()}});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::vector<ConfigIssue> validate_config_text(std::string_view text) {
  std::vector<ConfigIssue> issues;
  parse_impl(text, {}, issues);
  return issues;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["master_seed"] = c.master_seed;
  j["grid"] = {{"extent_m", {c.grid.extent_m.x, c.grid.extent_m.y, c.grid.extent_m.z}},
               {"cell_size_m", c.grid.cell_size_m},
               {"altitude_band_m", {c.grid.altitude_band_m.min_m, c.grid.altitude_band_m.max_m}}};
  j["obstacles"] = {{"file", c.obstacles.file ? json(c.obstacles.file->string()) : json(nullptr)},
                    {"pillars", pillars_json(c.obstacles.pillars)},
                    {"seed", c.obstacles.seed}};
  j["users"] = {{"mode", c.users.mode == UserSection::Mode::Fixed ? "fixed" : "ppp"},
                {"counts", c.users.counts},
                {"seeds", c.users.seeds}};
  json radio = json::object();
  if (c.radio.swarm_radius_m) {
    radio["swarm_radius_m"] = *c.radio.swarm_radius_m;
  } else {
    const auto& a = *c.radio.a2a;
    const auto& g = *c.radio.a2g;
    radio["a2a"] = {{"tx_power_dbm", a.tx_power_dbm},   {"tx_gain_db", a.tx_gain_db},
                    {"rx_gain_db", a.rx_gain_db},       {"threshold_dbm", a.threshold_dbm},
                    {"pathloss_exponent", a.pathloss_exponent}, {"carrier_hz", a.carrier_hz}};
    radio["a2g"] = {{"ref_channel_gain", g.ref_channel_gain},
                    {"gu_tx_power_w", g.gu_tx_power_w},
                    {"bandwidth_hz", g.bandwidth_hz},
                    {"noise_density_w_per_hz", g.noise_density_w_per_hz},
                    {"rate_threshold_bps", g.rate_threshold_bps}};
  }
  radio["altitude_m"] = c.radio.altitude_m ? json(*c.radio.altitude_m) : json(nullptr);
  j["radio"] = radio;
  j["clustering"] = {{"candidate_ns", c.clustering.candidate_ns},
                     {"coverage_threshold", c.clustering.coverage_threshold},
                     {"restarts", c.clustering.restarts},
                     {"max_iters", c.clustering.max_iters}};
  const auto& L = c.learning;
  j["learning"] = {{"alpha", L.alpha},
                   {"gamma", L.gamma},
                   {"episodes", L.episodes},
                   {"max_steps_per_episode", L.max_steps_per_episode},
                   {"extension_block", L.extension_block},
                   {"max_episodes", L.max_episodes},
                   {"stable_checks", L.stable_checks},
                   {"seeds", L.seeds},
                   {"obstacle_handling", L.obstacle_handling == ObstacleHandling::Penalize ? "penalize" : "mask"},
                   {"schedules",
                    {{"fixed-eps-ql", schedule_json(L.fixed_eps)},
                     {"qlutp", schedule_json(L.qlutp)},
                     {"qlutp-star", schedule_json(L.qlutp_star)}}}};
  const auto& P = c.planner;
  json methods = json::array();
  for (Method m : P.methods) methods.push_back(std::string(to_string(m)));
  j["planner"] = {{"methods", methods},
                  {"ordering", std::string(to_string(P.ordering))},
                  {"start_cell", P.start_cell ? json{P.start_cell->ix, P.start_cell->iy, P.start_cell->iz}
                                              : json(nullptr)},
                  {"flight_altitude_m", P.flight_altitude_m ? json(*P.flight_altitude_m) : json(nullptr)},
                  {"random_walk_cap", P.random_walk_cap},
                  {"hp_counts", P.hp_counts},
                  {"user_count", P.user_count}};
  const auto& C = c.convergence;
  j["convergence"] = {{"scenarios", C.scenarios},
                      {"extent_m", {C.extent_m.x, C.extent_m.y, C.extent_m.z}},
                      {"pillars", pillars_json(C.pillars)},
                      {"episodes", C.episodes},
                      {"min_leg_steps", C.min_leg_steps},
                      {"tolerance", C.tolerance},
                      {"window", C.window}};
  j["output"] = {{"directory", c.output.directory.string()}, {"format", c.output.svg ? "csv+svg" : "csv"}};
  j["acceptance"] = {{"coverage_min", c.acceptance.coverage_min ? json(*c.acceptance.coverage_min) : json(nullptr)},
                     {"coverage_at_n", c.acceptance.coverage_at_n},
                     {"convergence_ordering", c.acceptance.convergence_ordering},
                     {"loss_ordering", c.acceptance.loss_ordering}};
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output");
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
  return os.str();
}

GridSpace make_grid(const ExperimentConfig& c) {
  return build_grid(c.grid.extent_m, c.grid.cell_size_m, c.grid.altitude_band_m);
}

ObstacleMap make_obstacles(const ExperimentConfig& c, const GridSpace& grid) {
  if (c.obstacles.file) return load_obstacle_map(*c.obstacles.file, grid);
  return random_pillars(grid, c.obstacles.pillars, derive_seed(c.master_seed, "obstacles", c.obstacles.seed));
}

double resolve_swarm_radius(const ExperimentConfig& c) {
  if (c.radio.swarm_radius_m) return *c.radio.swarm_radius_m;
  const double h = c.radio.altitude_m.value_or(0.5 * (c.grid.altitude_band_m.min_m + c.grid.altitude_band_m.max_m));
  return link::derive_geometry(*c.radio.a2a, *c.radio.a2g, h).swarm_radius_m;
}

EpsilonSchedule bind_horizon(EpsilonSchedule schedule, int episodes) {
  if (auto* lin = std::get_if<LinearDecay>(&schedule); lin && lin->horizon_episodes == 0)
    lin->horizon_episodes = std::max(1, episodes);
  return schedule;
}

PlannerConfig make_planner_config(const ExperimentConfig& c, std::uint64_t seed) {
  PlannerConfig p;
  const auto& L = c.learning;
  p.learning.alpha = L.alpha;
  p.learning.gamma = L.gamma;
  p.learning.episodes = L.episodes;
  p.learning.max_steps_per_episode = L.max_steps_per_episode;
  p.learning.extension_block = L.extension_block;
  p.learning.max_episodes = L.max_episodes;
  p.learning.stable_checks = L.stable_checks;
  p.fixed_eps = bind_horizon(L.fixed_eps, L.episodes);
  p.qlutp = bind_horizon(L.qlutp, L.episodes);
  p.qlutp_star = bind_horizon(L.qlutp_star, L.episodes);
  p.obstacle_handling = L.obstacle_handling;
  p.ordering = c.planner.ordering;
  p.flight_altitude_m = c.planner.flight_altitude_m;
  p.random_walk_cap = c.planner.random_walk_cap;
  p.coverage_threshold = c.clustering.coverage_threshold;
  p.seed = seed;
  return p;
}

}  // namespace uavcov
