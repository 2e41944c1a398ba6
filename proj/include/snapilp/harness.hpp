#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snapilp/baselines.hpp"
#include "snapilp/costs.hpp"
#include "snapilp/ensemble.hpp"
#include "snapilp/parse.hpp"
#include "snapilp/stats.hpp"

namespace snapilp {

struct Split {
  ExampleSet train;
  ExampleSet valid;
  ExampleSet test;
  std::uint64_t seed = 0;
};

// Shuffles each class with the seeded generator and cuts it 7:2:1 using
// largest-remainder rounding (ties go to train, then valid). Throws DataError
// when either class would leave the test part empty.
Split split_examples(const ExampleSet& e, std::uint64_t seed);

// Parts of n in proportion 7:2:1, largest remainder.
std::array<std::size_t, 3> split_sizes(std::size_t n);

// Fraction of equal positions. Throws std::invalid_argument on a length
// mismatch or empty input.
double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels);

struct ExperimentConfig {
  CostFunctionId cost = CostFunctionId::Mdl;
  double timeout = 10.0;  // phase-1 search and each bag
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  PoolFilter filter = PoolFilter::Full;
  std::uint64_t seed = 1;  // split seed
  bool bagging = true;
  BagConfig bag;  // per_bag_timeout is overwritten with `timeout`
  EvalOptions eval;
  Clock clock;  // phase-1 clock; defaults to the steady clock
};

struct PhaseTimings {
  double phase1 = 0.0;    // pool collection
  double phase2 = 0.0;    // weighting
  double phase3 = 0.0;    // ensemble prediction on the test atoms
  double bagging = 0.0;   // all bags, search plus prediction
  double total = 0.0;     // whole run_task call
};

struct PhaseWork {
  std::uint64_t phase1 = 0;
  std::uint64_t phase2 = 0;
  std::uint64_t phase3 = 0;
};

struct TaskResult {
  std::string task;
  CostFunctionId cost = CostFunctionId::Mdl;
  std::uint64_t seed = 0;
  double acc_base = 0.0;
  double acc_snap = 0.0;
  std::optional<double> acc_bag;
  double acc_test_opt = 0.0;
  double acc_test_worst = 0.0;
  double overfit_gap = 0.0;       // acc_test_opt - acc_base
  double snap_improvement = 0.0;  // acc_snap - acc_base
  // 100 * (phase2 + phase3) / phase1 in evaluator work units, so reports stay
  // reproducible; wall-clock phases are in `timings`.
  double overhead_pct = 0.0;
  std::size_t pool_size = 0;
  std::size_t candidates_evaluated = 0;
  std::string baseline;  // canonical form of the final hypothesis
  PhaseTimings timings;
  PhaseWork work;

  double wall_overhead_pct() const {
    return timings.phase1 > 0 ? 100.0 * (timings.phase2 + timings.phase3) / timings.phase1 : 0.0;
  }
};

// Everything run_task computed, for callers that need more than the summary.
struct TaskRun {
  TaskResult result;
  Split split;
  SnapshotPool pool;
  WeightedEnsemble ensemble;
  Hypothesis baseline;
  std::vector<std::uint8_t> test_labels;
  std::vector<std::uint8_t> snap_predictions;
  std::vector<std::uint8_t> base_predictions;
};

// Errors are rethrown with the task name prepended.
TaskRun run_task_detailed(const Task& task, const ExperimentConfig& cfg);
TaskResult run_task(const Task& task, const ExperimentConfig& cfg);
TaskResult run_task(const std::filesystem::path& task_dir, const ExperimentConfig& cfg);

struct SweepPoint {
  double alpha = 0.0;
  double valid_accuracy = 0.0;
};

inline constexpr double kAlphaGrid[] = {0.0005, 0.001, 0.0013, 0.0017, 0.005, 0.03, 0.06};

// Collects one pool on the training part and scores the weighted ensemble on
// the validation part for each alpha.
std::vector<SweepPoint> sweep_alpha(const Task& task, const ExperimentConfig& cfg,
                                    std::span<const double> grid = kAlphaGrid);
// Highest validation accuracy; the earliest grid value wins ties.
double best_alpha(std::span<const SweepPoint> sweep);

struct BenchConfig {
  std::vector<std::filesystem::path> tasks;
  std::vector<CostFunctionId> costs{CostFunctionId::Mdl, CostFunctionId::ErrorSize,
                                    CostFunctionId::Lexfnsize};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  ExperimentConfig base;
  std::size_t jobs = 1;
};

// Runs every (task, cost, seed) combination on up to `jobs` threads and returns
// the results in report order.
std::vector<TaskResult> run_bench(const BenchConfig& cfg);

// Report order: task, cost function name, seed.
void sort_results(std::vector<TaskResult>& results);

enum class ReportFormat : std::uint8_t { Csv, Json };

// Stable columns: task, cost_fn, acc_base, acc_snap, acc_bag, acc_test_opt,
// acc_test_worst, overfit_gap, snap_improvement, overhead_pct, seed.
// Reals use 6 decimals; a missing acc_bag is "NA" (CSV) or null (JSON).
void write_report(std::ostream& out, std::vector<TaskResult> results, ReportFormat fmt);
void write_report(const std::filesystem::path& path, std::vector<TaskResult> results,
                  ReportFormat fmt);
std::vector<TaskResult> read_report_csv(std::istream& in);

// Wall-clock phase timings, one row per result.
void write_timings(std::ostream& out, std::span<const TaskResult> results);

struct CostSummary {
  CostFunctionId cost;
  stats::Summary improvement;  // over snap_improvement
  double mean_overfit_gap = 0.0;
};

struct ReportSummary {
  std::vector<CostSummary> per_cost;
  // Spearman rho of overfit_gap vs snap_improvement over (task, cost) means.
  std::optional<double> spearman_rho;
  std::size_t groups = 0;
};

ReportSummary summarize_results(std::span<const TaskResult> results);
void write_summary(std::ostream& out, const ReportSummary& s);

}  // namespace snapilp
