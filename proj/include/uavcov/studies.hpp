#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavcov/config.hpp"

namespace uavcov {

struct StudyOptions {
  int threads = 0;  // 0: hardware concurrency
};

// One row per (M, seed, N).
struct CoverageRun {
  int m = 0;  // configured count (expected count in PPP mode)
  std::uint64_t seed = 0;
  int n = 0;
  int users = 0;  // realized count
  double coverage = 0.0;
};

struct CoverageSummaryRow {
  int m = 0;
  int n = 0;
  int seeds = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct CoverageStudy {
  std::string config_hash;
  std::vector<CoverageRun> runs;
  std::vector<CoverageSummaryRow> summary;
  // Mean coverage over every M at a given N.
  double mean_at(int n) const;
};

CoverageStudy run_coverage_sweep(const ExperimentConfig& config, const StudyOptions& options = {});

struct ConvergenceScenario {
  int index = 0;
  CellIndex start;
  CellIndex target;
  int optimal_steps = 0;
};

// One row per (scenario, seed, method).
struct ConvergenceRun {
  int scenario = 0;
  std::uint64_t seed = 0;
  Method method = Method::QlutpStar;
  int optimal_steps = 0;
  int first_steps = 0;
  double final_quartile_mean = 0.0;
  // First episode of the first window in which every episode reaches the
  // target within (1 + tolerance) * optimal. Equals the episode count when
  // no such window exists (censored).
  int episodes_to_converge = 0;
  bool converged = false;
  std::vector<EpisodeRecord> curve;
};

struct ConvergenceSummaryRow {
  Method method = Method::QlutpStar;
  int runs = 0;
  int converged_runs = 0;
  double mean_episodes_to_converge = 0.0;
  double mean_first_steps = 0.0;
  double mean_final_quartile = 0.0;
};

struct ConvergenceStudy {
  std::string config_hash;
  std::vector<ConvergenceScenario> scenarios;
  std::vector<ConvergenceRun> runs;
  std::vector<ConvergenceSummaryRow> summary;
  std::vector<std::string> failures;  // scenarios that could not be built
  const ConvergenceSummaryRow* find(Method m) const;
};

// Convergence index as defined on ConvergenceRun.
int episodes_to_converge(const LearningCurve& curve, int optimal_steps, double tolerance, int window);

ConvergenceStudy run_convergence_study(const ExperimentConfig& config, const StudyOptions& options = {});

// One row per (N, seed, method).
struct LossRun {
  int n = 0;
  std::uint64_t seed = 0;
  Method method = Method::BfsOracle;
  int users = 0;
  double coverage = 0.0;
  long long steps = 0;
  double loss_m = 0.0;
  int episodes = 0;
  bool feasible = false;  // every leg reached its target
  std::string error;      // non-empty when planning threw
};

struct LossSummaryRow {
  int n = 0;
  Method method = Method::BfsOracle;
  int runs = 0;
  int matched_runs = 0;  // seeds on which every method was feasible
  double mean_loss_m = 0.0;  // over matched seeds
  double mean_steps = 0.0;
};

struct LossStudy {
  std::string config_hash;
  std::vector<LossRun> runs;
  std::vector<LossSummaryRow> summary;
  std::vector<std::string> failures;
  const LossSummaryRow* find(int n, Method m) const;
};

LossStudy run_loss_comparison(const ExperimentConfig& config, const StudyOptions& options = {});

// CSV writers. Every row starts with the config hash.
std::string coverage_runs_csv(const CoverageStudy& study);
std::string coverage_summary_csv(const CoverageStudy& study);
std::string convergence_runs_csv(const ConvergenceStudy& study);
std::string convergence_curves_csv(const ConvergenceStudy& study);
std::string convergence_mean_csv(const ConvergenceStudy& study);
std::string convergence_summary_csv(const ConvergenceStudy& study);
std::string loss_runs_csv(const LossStudy& study);
std::string loss_summary_csv(const LossStudy& study);

// SVG renderers that read only the CSV text produced above.
std::string coverage_svg_from_csv(const std::string& summary_csv);
std::string convergence_svg_from_csv(const std::string& mean_csv);
std::string loss_svg_from_csv(const std::string& summary_csv);

struct BoundCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Shape checks shared by the CLI and the acceptance suite.
BoundCheck check_coverage_at(const CoverageStudy& study, int n, double minimum);
BoundCheck check_convergence_ordering(const ConvergenceStudy& study);
BoundCheck check_loss_monotone(const LossStudy& study);
BoundCheck check_loss_ordering(const LossStudy& study);

// Bounds requested by the config's acceptance section, for whichever studies
// were run.
std::vector<BoundCheck> evaluate_bounds(const ExperimentConfig& config, const CoverageStudy* coverage,
                                        const ConvergenceStudy* convergence, const LossStudy* loss);

}  // namespace uavcov
