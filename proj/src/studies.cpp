#include "uavcov/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "uavcov/clustering.hpp"
#include "uavcov/errors.hpp"
#include "uavcov/search.hpp"
#include "uavcov/seeding.hpp"
#include "uavcov/svg.hpp"

namespace uavcov {

namespace {

// Runs f(i) for i in [0, n) on a small worker pool. Results must be written
// to slot i so ordering does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(1, n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

bool is_learner(Method m) {
  return m == Method::Qlutp || m == Method::QlutpStar || m == Method::FixedEpsQl;
}

std::vector<Method> learners(const ExperimentConfig& c) {
  std::vector<Method> out;
  for (Method m : c.planner.methods)
    if (is_learner(m)) out.push_back(m);
  return out;
}

UserDeployment deployment(const ExperimentConfig& c, int m) {
  if (c.users.mode == UserSection::Mode::Fixed) return FixedCount{m};
  return PppIntensity{m / (c.grid.extent_m.x * c.grid.extent_m.y)};
}

EpsilonSchedule schedule_of(const LearningSection& L, Method m) {
  switch (m) {
    case Method::Qlutp: return L.qlutp;
    case Method::QlutpStar: return L.qlutp_star;
    default: return L.fixed_eps;
  }
}

}  // namespace

// ---- coverage ----

double CoverageStudy::mean_at(int n) const {
  std::vector<double> v;
  for (const auto& r : runs)
    if (r.n == n) v.push_back(r.coverage);
  return mean(v);
}

CoverageStudy run_coverage_sweep(const ExperimentConfig& config, const StudyOptions& options) {
  CoverageStudy study;
  study.config_hash = config_hash(config);
  const double r_s = resolve_swarm_radius(config);
  const Vec2 area{config.grid.extent_m.x, config.grid.extent_m.y};
  const auto& ns = config.clustering.candidate_ns;

  struct Cell {
    int m;
    int seed;
  };
  std::vector<Cell> cells;
  for (int m : config.users.counts)
    for (int s = 0; s < config.users.seeds; ++s) cells.push_back({m, s});

  std::vector<std::vector<CoverageRun>> out(cells.size());
  parallel_for(cells.size(), options.threads, [&](std::size_t i) {
    const auto [m, s] = cells[i];
    const std::string tag = "m" + std::to_string(m);
    const GroundUserSet users =
        generate_users(derive_seed(config.master_seed, "users-" + tag, s), area, deployment(config, m));
    const int count = static_cast<int>(users.size());
    for (int n : ns) {
      CoverageRun run{m, static_cast<std::uint64_t>(s), n, count, 1.0};
      if (count > 0) {
        if (n >= count) {
          run.coverage = evaluate_coverage(users.positions, users, r_s).coverage_rate;
        } else {
          run.coverage = best_plan_for_n(users, r_s, n, config.clustering.restarts, config.clustering.max_iters,
                                         derive_seed(config.master_seed, "clustering-" + tag + "-n" + std::to_string(n), s))
                             .coverage_rate;
        }
      }
      out[i].push_back(run);
    }
  });
  for (auto& v : out) study.runs.insert(study.runs.end(), v.begin(), v.end());

  for (int m : config.users.counts)
    for (int n : ns) {
      std::vector<double> v;
      for (const auto& r : study.runs)
        if (r.m == m && r.n == n) v.push_back(r.coverage);
      study.summary.push_back({m, n, static_cast<int>(v.size()), mean(v), stddev(v)});
    }
  return study;
}

// ---- convergence ----

int episodes_to_converge(const LearningCurve& curve, int optimal_steps, double tolerance, int window) {
  const double limit = (1.0 + tolerance) * optimal_steps + 1e-9;
  int run = 0;
  for (std::size_t e = 0; e < curve.size(); ++e) {
    const bool ok = curve[e].reached_target && curve[e].steps <= limit;
    run = ok ? run + 1 : 0;
    if (run >= window) return static_cast<int>(e) + 1 - window;
  }
  return static_cast<int>(curve.size());
}

const ConvergenceSummaryRow* ConvergenceStudy::find(Method m) const {
  for (const auto& r : summary)
    if (r.method == m) return &r;
  return nullptr;
}

ConvergenceStudy run_convergence_study(const ExperimentConfig& config, const StudyOptions& options) {
  ConvergenceStudy study;
  study.config_hash = config_hash(config);
  const auto& C = config.convergence;
  const auto& L = config.learning;
  const GridSpace grid = build_grid(C.extent_m, config.grid.cell_size_m, config.grid.altitude_band_m);

  std::vector<ObstacleMap> maps;
  for (int k = 0; k < C.scenarios; ++k) {
    ObstacleMap obstacles =
        random_pillars(grid, C.pillars, derive_seed(config.master_seed, "convergence-obstacles", k));
    Rng rng(derive_seed(config.master_seed, "convergence-leg", k));
    std::uniform_int_distribution<int> px(0, grid.nx() - 1), py(0, grid.ny() - 1),
        pz(grid.band_lo(), grid.band_hi());
    auto draw = [&] {
      for (int tries = 0; tries < 10000; ++tries) {
        const CellIndex c{px(rng), py(rng), pz(rng)};
        if (!is_collision(grid, obstacles, c)) return std::optional<CellIndex>(c);
      }
      return std::optional<CellIndex>();
    };
    std::optional<ConvergenceScenario> found;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      const auto a = draw(), b = draw();
      if (!a || !b) break;
      const int d = bfs_distances(grid, obstacles, *a)[grid.flat(*b)];
      if (d != kUnreachable && d >= C.min_leg_steps) found = ConvergenceScenario{k, *a, *b, d};
    }
    if (!found) {
      study.failures.push_back("convergence scenario " + std::to_string(k) +
                               ": no reachable start/target pair at least " + std::to_string(C.min_leg_steps) +
                               " steps apart");
      continue;
    }
    study.scenarios.push_back(*found);
    maps.push_back(std::move(obstacles));
  }

  const auto methods = learners(config);
  struct Task {
    std::size_t scenario;
    int seed;
    Method method;
  };
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < study.scenarios.size(); ++k)
    for (int s = 0; s < L.seeds; ++s)
      for (Method m : methods) tasks.push_back({k, s, m});

  study.runs.resize(tasks.size());
  parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    const ConvergenceScenario& sc = study.scenarios[t.scenario];
    const CoverageEnv env(grid, maps[t.scenario], L.obstacle_handling);
    LearningConfig lc;
    lc.alpha = L.alpha;
    lc.gamma = L.gamma;
    lc.episodes = C.episodes;
    lc.max_steps_per_episode = L.max_steps_per_episode;
    lc.max_episodes = 0;
    lc.schedule = bind_horizon(schedule_of(L, t.method), C.episodes);
    // Same stream for every method: matched exploration noise per cell.
    lc.seed = derive_seed(config.master_seed, "convergence-run-" + std::to_string(sc.index), t.seed);
    TrainingResult tr = train(env, sc.start, sc.target, lc);

    ConvergenceRun& run = study.runs[i];
    run.scenario = sc.index;
    run.seed = static_cast<std::uint64_t>(t.seed);
    run.method = t.method;
    run.optimal_steps = sc.optimal_steps;
    run.first_steps = tr.curve.front().steps;
    const std::size_t q = tr.curve.size() - std::max<std::size_t>(1, tr.curve.size() / 4);
    std::vector<double> tail;
    for (std::size_t e = q; e < tr.curve.size(); ++e) tail.push_back(tr.curve[e].steps);
    run.final_quartile_mean = mean(tail);
    run.episodes_to_converge = episodes_to_converge(tr.curve, sc.optimal_steps, C.tolerance, C.window);
    run.converged = run.episodes_to_converge < static_cast<int>(tr.curve.size());
    run.curve = std::move(tr.curve);
  });

  for (Method m : methods) {
    ConvergenceSummaryRow row{m};
    std::vector<double> etc, first, tail;
    for (const auto& r : study.runs) {
      if (r.method != m) continue;
      ++row.runs;
      row.converged_runs += r.converged;
      etc.push_back(r.episodes_to_converge);
      first.push_back(r.first_steps);
      tail.push_back(r.final_quartile_mean);
    }
    row.mean_episodes_to_converge = mean(etc);
    row.mean_first_steps = mean(first);
    row.mean_final_quartile = mean(tail);
    study.summary.push_back(row);
  }
  return study;
}

// ---- loss ----

const LossSummaryRow* LossStudy::find(int n, Method m) const {
  for (const auto& r : summary)
    if (r.n == n && r.method == m) return &r;
  return nullptr;
}

LossStudy run_loss_comparison(const ExperimentConfig& config, const StudyOptions& options) {
  LossStudy study;
  study.config_hash = config_hash(config);
  const GridSpace grid = make_grid(config);
  const ObstacleMap obstacles = make_obstacles(config, grid);
  const double r_s = resolve_swarm_radius(config);
  const Vec2 area{config.grid.extent_m.x, config.grid.extent_m.y};
  const auto& P = config.planner;
  const int seeds = config.learning.seeds;

  PlannerConfig base = make_planner_config(config, 0);
  const CellIndex start = P.start_cell ? *P.start_cell : default_start_cell(grid, obstacles, base);

  struct Scenario {
    int n;
    int seed;
    int users;
    HoveringPlan plan;
  };
  std::vector<Scenario> scenarios;
  for (int n : P.hp_counts)
    for (int s = 0; s < seeds; ++s) {
      const GroundUserSet users = generate_users(derive_seed(config.master_seed, "loss-users", s), area,
                                                 deployment(config, P.user_count));
      const int count = static_cast<int>(users.size());
      HoveringPlan plan =
          n >= count ? evaluate_coverage(users.positions, users, r_s)
                     : best_plan_for_n(users, r_s, n, config.clustering.restarts, config.clustering.max_iters,
                                       derive_seed(config.master_seed, "loss-clustering-n" + std::to_string(n), s));
      scenarios.push_back({n, s, count, std::move(plan)});
    }

  std::vector<std::pair<std::size_t, Method>> tasks;
  for (std::size_t k = 0; k < scenarios.size(); ++k)
    for (Method m : P.methods) tasks.push_back({k, m});

  study.runs.resize(tasks.size());
  parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    const auto& [k, method] = tasks[i];
    const Scenario& sc = scenarios[k];
    LossRun& run = study.runs[i];
    run.n = sc.n;
    run.seed = static_cast<std::uint64_t>(sc.seed);
    run.method = method;
    run.users = sc.users;
    run.coverage = sc.plan.coverage_rate;
    const PlannerConfig pc = make_planner_config(
        config, derive_seed(config.master_seed, "loss-plan-n" + std::to_string(sc.n), sc.seed));
    try {
      const MissionPlan mission = plan_mission(grid, obstacles, sc.plan, start, method, pc);
      run.steps = static_cast<long long>(mission.trajectory.steps());
      run.loss_m = mission.loss_m(grid.cell_size());
      run.episodes = mission.total_episodes();
      run.feasible = mission.trajectory.feasible;
    } catch (const Error& e) {
      run.error = e.what();
    }
  });

  for (const auto& r : study.runs)
    if (!r.error.empty())
      study.failures.push_back("loss N=" + std::to_string(r.n) + " seed=" + std::to_string(r.seed) + " " +
                               std::string(to_string(r.method)) + ": " + r.error);

  for (int n : P.hp_counts) {
    std::set<std::uint64_t> matched;
    for (int s = 0; s < seeds; ++s) matched.insert(s);
    for (const auto& r : study.runs)
      if (r.n == n && !r.feasible) matched.erase(r.seed);
    for (Method m : P.methods) {
      LossSummaryRow row{n, m};
      std::vector<double> loss, steps;
      for (const auto& r : study.runs) {
        if (r.n != n || r.method != m) continue;
        ++row.runs;
        if (!matched.count(r.seed)) continue;
        loss.push_back(r.loss_m);
        steps.push_back(static_cast<double>(r.steps));
      }
      row.matched_runs = static_cast<int>(loss.size());
      row.mean_loss_m = mean(loss);
      row.mean_steps = mean(steps);
      study.summary.push_back(row);
    }
  }
  return study;
}

// ---- CSV ----

namespace {
constexpr const char* kRunColumns = "config_hash,seed,method,N,M,coverage,steps,loss_m,episodes_to_converge";
}

std::string coverage_runs_csv(const CoverageStudy& s) {
  std::ostringstream os;
  os << kRunColumns << ",users\n";
  for (const auto& r : s.runs)
    os << s.config_hash << ',' << r.seed << ",kmeans," << r.n << ',' << r.m << ',' << num(r.coverage) << ",,,,"
       << r.users << '\n';
  return os.str();
}

std::string coverage_summary_csv(const CoverageStudy& s) {
  std::ostringstream os;
  os << "config_hash,M,N,seeds,mean_coverage,std_coverage\n";
  for (const auto& r : s.summary)
    os << s.config_hash << ',' << r.m << ',' << r.n << ',' << r.seeds << ',' << num(r.mean) << ','
       << num(r.stddev) << '\n';
  return os.str();
}

std::string convergence_runs_csv(const ConvergenceStudy& s) {
  std::ostringstream os;
  os << kRunColumns << ",scenario,optimal_steps,first_steps,final_quartile_mean,converged\n";
  for (const auto& r : s.runs) {
    const int last = r.curve.empty() ? 0 : r.curve.back().steps;
    os << s.config_hash << ',' << r.seed << ',' << to_string(r.method) << ",1,,," << last << ",,"
       << r.episodes_to_converge << ',' << r.scenario << ',' << r.optimal_steps << ',' << r.first_steps << ','
       << num(r.final_quartile_mean) << ',' << (r.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string convergence_curves_csv(const ConvergenceStudy& s) {
  std::ostringstream os;
  os << "config_hash,scenario,seed,method,episode,steps,epsilon,reached\n";
  for (const auto& r : s.runs)
    for (std::size_t e = 0; e < r.curve.size(); ++e)
      os << s.config_hash << ',' << r.scenario << ',' << r.seed << ',' << to_string(r.method) << ',' << e << ','
         << r.curve[e].steps << ',' << num(r.curve[e].epsilon) << ',' << (r.curve[e].reached_target ? 1 : 0)
         << '\n';
  return os.str();
}

std::string convergence_mean_csv(const ConvergenceStudy& s) {
  std::ostringstream os;
  os << "config_hash,method,episode,mean_steps\n";
  std::vector<Method> methods;
  for (const auto& row : s.summary) methods.push_back(row.method);
  double optimal = 0;
  for (const auto& sc : s.scenarios) optimal += sc.optimal_steps;
  if (!s.scenarios.empty()) optimal /= s.scenarios.size();
  std::size_t episodes = 0;
  for (const auto& r : s.runs) episodes = std::max(episodes, r.curve.size());
  for (Method m : methods) {
    std::vector<double> sum(episodes, 0.0);
    std::vector<int> count(episodes, 0);
    for (const auto& r : s.runs) {
      if (r.method != m) continue;
      for (std::size_t e = 0; e < r.curve.size(); ++e) {
        sum[e] += r.curve[e].steps;
        ++count[e];
      }
    }
    for (std::size_t e = 0; e < episodes; ++e)
      if (count[e]) os << s.config_hash << ',' << to_string(m) << ',' << e << ',' << num(sum[e] / count[e]) << '\n';
  }
  if (!s.scenarios.empty())
    for (std::size_t e = 0; e < episodes; ++e)
      os << s.config_hash << ",bfs-oracle," << e << ',' << num(optimal) << '\n';
  return os.str();
}

std::string convergence_summary_csv(const ConvergenceStudy& s) {
  std::ostringstream os;
  os << "config_hash,method,runs,converged_runs,mean_episodes_to_converge,mean_first_steps,mean_final_quartile_steps\n";
  for (const auto& r : s.summary)
    os << s.config_hash << ',' << to_string(r.method) << ',' << r.runs << ',' << r.converged_runs << ','
       << num(r.mean_episodes_to_converge) << ',' << num(r.mean_first_steps) << ','
       << num(r.mean_final_quartile) << '\n';
  return os.str();
}

std::string loss_runs_csv(const LossStudy& s) {
  std::ostringstream os;
  os << kRunColumns << ",feasible,error\n";
  for (const auto& r : s.runs) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << s.config_hash << ',' << r.seed << ',' << to_string(r.method) << ',' << r.n << ',' << r.users << ','
       << num(r.coverage) << ',' << r.steps << ',' << num(r.loss_m) << ',' << r.episodes << ','
       << (r.feasible ? 1 : 0) << ',' << err << '\n';
  }
  return os.str();
}

std::string loss_summary_csv(const LossStudy& s) {
  std::ostringstream os;
  os << "config_hash,N,method,runs,matched_runs,mean_loss_m,mean_steps\n";
  for (const auto& r : s.summary)
    os << s.config_hash << ',' << r.n << ',' << to_string(r.method) << ',' << r.runs << ',' << r.matched_runs
       << ',' << num(r.mean_loss_m) << ',' << num(r.mean_steps) << '\n';
  return os.str();
}

// ---- plots ----

std::string coverage_svg_from_csv(const std::string& summary_csv) {
  const auto t = svg::CsvTable::parse(summary_csv);
  std::map<int, svg::Series> by_m;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const int m = static_cast<int>(t.number(i, "M"));
    auto& s = by_m[m];
    s.name = "M=" + std::to_string(m);
    s.x.push_back(t.number(i, "N"));
    s.y.push_back(t.number(i, "mean_coverage"));
    s.err.push_back(t.number(i, "std_coverage"));
  }
  std::vector<svg::Series> series;
  for (auto& [_, s] : by_m) series.push_back(std::move(s));
  return svg::line_chart({"Coverage rate vs number of hovering points", "N", "coverage rate"}, series);
}

std::string convergence_svg_from_csv(const std::string& mean_csv) {
  const auto t = svg::CsvTable::parse(mean_csv);
  std::vector<svg::Series> series;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const std::string& m = t.at(i, "method");
    auto [it, fresh] = index.try_emplace(m, series.size());
    if (fresh) series.push_back({m, {}, {}, {}});
    series[it->second].x.push_back(t.number(i, "episode"));
    series[it->second].y.push_back(t.number(i, "mean_steps"));
  }
  return svg::line_chart({"Steps per episode", "episode", "mean steps"}, series);
}

std::string loss_svg_from_csv(const std::string& summary_csv) {
  const auto t = svg::CsvTable::parse(summary_csv);
  std::vector<std::string> groups, names;
  std::map<std::string, std::size_t> gi, si;
  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const std::string g = "N=" + t.at(i, "N");
    const std::string& m = t.at(i, "method");
    if (gi.try_emplace(g, groups.size()).second) groups.push_back(g), values.emplace_back();
    if (si.try_emplace(m, names.size()).second) names.push_back(m);
    auto& row = values[gi[g]];
    row.resize(std::max(row.size(), si[m] + 1), std::numeric_limits<double>::quiet_NaN());
    row[si[m]] = t.number(i, "mean_loss_m");
  }
  return svg::grouped_bar_chart({"Trajectory loss by method", "hovering points", "loss (m)", true}, groups, names,
                                values);
}

// ---- bounds ----

BoundCheck check_coverage_at(const CoverageStudy& study, int n, double minimum) {
  const double v = study.mean_at(n);
  return {"coverage at N=" + std::to_string(n), v >= minimum,
          "mean " + num(v) + " vs minimum " + num(minimum)};
}

BoundCheck check_convergence_ordering(const ConvergenceStudy& study) {
  const auto* star = study.find(Method::QlutpStar);
  const auto* fixed = study.find(Method::FixedEpsQl);
  if (!star || !fixed) return {"convergence ordering", false, "needs qlutp-star and fixed-eps-ql"};
  return {"convergence ordering", star->mean_episodes_to_converge < fixed->mean_episodes_to_converge,
          "qlutp-star " + num(star->mean_episodes_to_converge) + " vs fixed-eps-ql " +
              num(fixed->mean_episodes_to_converge) + " mean episodes to converge"};
}

BoundCheck check_loss_monotone(const LossStudy& study) {
  std::map<Method, std::vector<std::pair<int, double>>> by_method;
  for (const auto& r : study.summary) by_method[r.method].push_back({r.n, r.mean_loss_m});
  BoundCheck out{"loss non-decreasing in N", true, ""};
  for (auto& [m, v] : by_method) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i].second >= v[i - 1].second)) {
        out.passed = false;
        out.detail += std::string(to_string(m)) + " N=" + std::to_string(v[i - 1].first) + "->" +
                      std::to_string(v[i].first) + ": " + num(v[i - 1].second) + " > " + num(v[i].second) + "; ";
      }
  }
  if (out.passed) out.detail = "all methods";
  return out;
}

BoundCheck check_loss_ordering(const LossStudy& study) {
  const Method chain[] = {Method::BfsOracle, Method::QlutpStar, Method::FixedEpsQl, Method::RandomWalk};
  std::set<int> ns;
  for (const auto& r : study.summary) ns.insert(r.n);
  BoundCheck out{"loss ordering", true, ""};
  for (int n : ns) {
    const LossSummaryRow* prev = nullptr;
    std::string row = "N=" + std::to_string(n) + ":";
    for (Method m : chain) {
      const auto* cur = study.find(n, m);
      if (!cur) continue;
      row += " " + std::string(to_string(m)) + "=" + num(cur->mean_loss_m);
      if (prev && !(prev->mean_loss_m <= cur->mean_loss_m)) {
        out.passed = false;
        row += "(!)";
      }
      prev = cur;
    }
    out.detail += row + "; ";
  }
  return out;
}

std::vector<BoundCheck> evaluate_bounds(const ExperimentConfig& config, const CoverageStudy* coverage,
                                        const ConvergenceStudy* convergence, const LossStudy* loss) {
  std::vector<BoundCheck> out;
  const auto& A = config.acceptance;
  if (coverage && A.coverage_min) out.push_back(check_coverage_at(*coverage, A.coverage_at_n, *A.coverage_min));
  if (convergence && A.convergence_ordering) out.push_back(check_convergence_ordering(*convergence));
  if (loss && A.loss_ordering) {
    out.push_back(check_loss_monotone(*loss));
    out.push_back(check_loss_ordering(*loss));
  }
  return out;
}

}  // namespace uavcov
