#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavcov/config.hpp"
#include "uavcov/errors.hpp"
#include "uavcov/studies.hpp"

namespace fs = std::filesystem;
using namespace uavcov;

namespace {

constexpr const char* kOutEnv = "UAVCOV_OUT_DIR";

struct Options {
  std::string config_path;
  std::string out;
  std::optional<int> seeds;
  std::optional<std::uint64_t> master_seed;
  std::string format;
  int threads = 0;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = o.config_path.empty() ? parse_config("") : load_config(o.config_path);
  if (o.seeds) {
    c.users.seeds = *o.seeds;
    c.learning.seeds = *o.seeds;
  }
  if (o.master_seed) c.master_seed = *o.master_seed;
  if (!o.format.empty()) c.output.svg = o.format == "csv+svg";
  if (!o.out.empty()) {
    c.output.directory = o.out;
  } else if (const char* env = std::getenv(kOutEnv); env && *env) {
    c.output.directory = env;
  }
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run(const std::string& which, const Options& o) {
  const ExperimentConfig config = load(o);
  const fs::path dir = config.output.directory;
  fs::create_directories(dir);
  const StudyOptions study_options{o.threads};
  const bool svg = config.output.svg;

  nlohmann::json meta;
  meta["config_hash"] = config_hash(config);
  meta["config"] = to_json(config);
  std::vector<std::string> failures;
  std::optional<CoverageStudy> coverage;
  std::optional<ConvergenceStudy> convergence;
  std::optional<LossStudy> loss;

  if (which == "coverage" || which == "all") {
    const auto t0 = std::chrono::steady_clock::now();
    coverage = run_coverage_sweep(config, study_options);
    const std::string summary = coverage_summary_csv(*coverage);
    write_file(dir / "coverage_runs.csv", coverage_runs_csv(*coverage));
    write_file(dir / "coverage_summary.csv", summary);
    if (svg) write_file(dir / "coverage.svg", coverage_svg_from_csv(summary));
    meta["wall_time_s"]["coverage"] = seconds_since(t0);
    std::cout << "coverage: " << coverage->runs.size() << " runs\n";
    for (int n : config.clustering.candidate_ns)
      std::cout << "  N=" << n << " mean coverage " << coverage->mean_at(n) << '\n';
  }
  if (which == "convergence" || which == "all") {
    const auto t0 = std::chrono::steady_clock::now();
    convergence = run_convergence_study(config, study_options);
    const std::string mean = convergence_mean_csv(*convergence);
    write_file(dir / "convergence_runs.csv", convergence_runs_csv(*convergence));
    write_file(dir / "convergence_curves.csv", convergence_curves_csv(*convergence));
    write_file(dir / "convergence_mean.csv", mean);
    write_file(dir / "convergence_summary.csv", convergence_summary_csv(*convergence));
    if (svg) write_file(dir / "convergence.svg", convergence_svg_from_csv(mean));
    meta["wall_time_s"]["convergence"] = seconds_since(t0);
    failures.insert(failures.end(), convergence->failures.begin(), convergence->failures.end());
    std::cout << "convergence: " << convergence->runs.size() << " runs\n";
    for (const auto& r : convergence->summary)
      std::cout << "  " << to_string(r.method) << " mean episodes to converge " << r.mean_episodes_to_converge
                << " (" << r.converged_runs << "/" << r.runs << " converged)\n";
  }
  if (which == "loss" || which == "all") {
    const auto t0 = std::chrono::steady_clock::now();
    loss = run_loss_comparison(config, study_options);
    const std::string summary = loss_summary_csv(*loss);
    write_file(dir / "loss_runs.csv", loss_runs_csv(*loss));
    write_file(dir / "loss_summary.csv", summary);
    if (svg) write_file(dir / "loss.svg", loss_svg_from_csv(summary));
    meta["wall_time_s"]["loss"] = seconds_since(t0);
    failures.insert(failures.end(), loss->failures.begin(), loss->failures.end());
    std::cout << "loss: " << loss->runs.size() << " runs\n";
    for (const auto& r : loss->summary)
      std::cout << "  N=" << r.n << " " << to_string(r.method) << " mean loss " << r.mean_loss_m << " m ("
                << r.matched_runs << "/" << r.runs << " matched)\n";
  }

  const auto bounds = evaluate_bounds(config, coverage ? &*coverage : nullptr,
                                      convergence ? &*convergence : nullptr, loss ? &*loss : nullptr);
  bool ok = failures.empty();
  for (const auto& f : failures) std::cerr << "failed: " << f << '\n';
  for (const auto& b : bounds) {
    std::cout << (b.passed ? "bound ok: " : "bound violated: ") << b.name << " (" << b.detail << ")\n";
    ok = ok && b.passed;
    meta["bounds"].push_back({{"name", b.name}, {"passed", b.passed}, {"detail", b.detail}});
  }
  meta["failures"] = failures;
  write_file(dir / "run_meta.json", meta.dump(2) + "\n");
  std::cout << "results in " << dir.string() << '\n';
  return ok ? 0 : 1;
}

int validate(const Options& o) {
  if (o.config_path.empty()) {
    std::cerr << "validate needs --config\n";
    return 2;
  }
  const ExperimentConfig c = load(o);
  std::cout << to_json(c).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV swarm coverage experiment harness"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "experiment configuration (JSON)");
    sub->add_option("--out", o.out, std::string("output directory (overrides $") + kOutEnv + " and the config)");
    sub->add_option("--seeds", o.seeds, "seeds per cell")->check(CLI::PositiveNumber);
    sub->add_option("--master-seed", o.master_seed, "master seed");
    sub->add_option("--format", o.format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  };
  for (const char* name : {"coverage", "convergence", "loss"})
    add_common(app.add_subcommand(name, std::string("run the ") + name + " study"));
  add_common(app.add_subcommand("all", "run all three studies"));
  add_common(app.add_subcommand("validate", "check a configuration and print it normalized"));

  CLI11_PARSE(app, argc, argv);
  const std::string which = app.get_subcommands().front()->get_name();
  try {
    return which == "validate" ? validate(o) : run(which, o);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
