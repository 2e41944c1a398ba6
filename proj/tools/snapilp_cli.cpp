// snapilp: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 task/data error, 3 resource limit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snapilp/baselines.hpp"
#include "snapilp/ensemble.hpp"
#include "snapilp/error.hpp"
#include "snapilp/harness.hpp"
#include "snapilp/learner.hpp"
#include "snapilp/parse.hpp"
#include "snapilp/tasks.hpp"

namespace fs = std::filesystem;
using namespace snapilp;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitResource = 3;

struct Globals {
  std::uint64_t seed = 1;
  double timeout = 10.0;
  std::size_t jobs = 1;
  std::string out;
};

struct TaskOptions {
  std::string task;
  std::string cost = "mdl";
};

CostFunctionId cost_or_throw(const std::string& name) {
  if (auto c = parse_cost_function(name)) return *c;
  throw CLI::ValidationError("--cost", "unknown cost function '" + name + "'");
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Writes to --out when given, else to stdout.
template <class Fn>
void emit(const std::string& out, Fn&& fn) {
  if (out.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw DataError("cannot write " + out);
  fn(f);
  if (!f.flush()) throw DataError("cannot write " + out);
}

void add_task_options(CLI::App* cmd, TaskOptions& t) {
  cmd->add_option("--task", t.task, "Task directory (bk.pl, exs.pl, bias.toml)")->required();
  cmd->add_option("--cost", t.cost, "Cost function: mdl, errorsize or lexfnsize")
      ->check(CLI::IsMember({"mdl", "errorsize", "lexfnsize"}));
}

int cmd_learn(const Globals& g, const TaskOptions& t) {
  const Task task = load_task(t.task);
  Evaluator ev(task.background);
  const SearchOutcome out =
      search(ev, to_multiset(task.examples), task.bias, cost_or_throw(t.cost), g.timeout);
  const auto& c = out.final_confusion;
  std::cout << "task: " << task.name << "\n"
            << "hypothesis: " << out.final_hypothesis.canonical() << "\n"
            << "cost: " << out.final_cost.str() << "\n"
            << "confusion: tp=" << c.tp << " tn=" << c.tn << " fp=" << c.fp << " fn=" << c.fn
            << "\n"
            << "candidates: " << out.candidates_evaluated << " (" << out.candidates_failed
            << " over the atom cap)\n"
            << "wall_time_s: " << fmt6(out.wall_time) << "\n";
  if (!g.out.empty()) {
    emit(g.out, [&](std::ostream& os) {
      for (const auto& cl : out.final_hypothesis.clauses()) os << to_string(cl) << "\n";
    });
  }
  return 0;
}

int cmd_ensemble(const Globals& g, const TaskOptions& t, double alpha, double beta,
                 const std::string& filter) {
  const Task task = load_task(t.task);
  ExperimentConfig cfg;
  cfg.cost = cost_or_throw(t.cost);
  cfg.timeout = g.timeout;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.filter = *parse_pool_filter(filter);
  cfg.seed = g.seed;
  cfg.bagging = false;
  const TaskRun run = run_task_detailed(task, cfg);
  const auto& r = run.result;
  std::cout << "task: " << task.name << " cost: " << t.cost << " filter: " << filter
            << " seed: " << g.seed << "\n"
            << "pool: " << run.pool.size() << " snapshots, " << run.ensemble.pool.size()
            << " weighted\n";
  const auto& snaps = run.ensemble.pool.snapshots();
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    std::cout << "  w=" << fmt6(run.ensemble.weights[i]) << " cov=" << fmt6(snaps[i].coverage)
              << " mdl=" << snaps[i].mdl << " cost=" << snaps[i].cost.str() << "  "
              << snaps[i].hypothesis.canonical() << "\n";
  }
  std::cout << "baseline: " << r.baseline << "\n"
            << "acc_base: " << fmt6(r.acc_base) << "\n"
            << "acc_snap: " << fmt6(r.acc_snap) << "\n"
            << "acc_test_opt: " << fmt6(r.acc_test_opt) << "\n"
            << "acc_test_worst: " << fmt6(r.acc_test_worst) << "\n"
            << "overhead_pct (wall): " << fmt6(r.wall_overhead_pct()) << "\n";
  if (!g.out.empty()) emit(g.out, [&](std::ostream& os) { write_pool(os, run.pool); });
  return 0;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--seeds", "not a seed list: '" + text + "'");
    }
  }
  return out;
}

int cmd_bag(const Globals& g, const TaskOptions& t, std::size_t bags, const std::string& seeds) {
  const Task task = load_task(t.task);
  BagConfig bc;
  bc.n_bags = bags;
  bc.seeds = parse_seed_list(seeds);
  bc.per_bag_timeout = g.timeout;
  const Split split = split_examples(task.examples, g.seed);
  Evaluator ev(task.background);
  std::vector<SearchOutcome> outcomes;
  const BaggedEnsemble ens =
      run_bagging(ev, to_multiset(split.train), task.bias, cost_or_throw(t.cost), bc, {}, &outcomes);
  const ExampleMultiset test = to_multiset(split.test);
  std::vector<Atom> atoms;
  std::vector<std::uint8_t> labels;
  for (const auto& x : test) {
    atoms.push_back(x.atom);
    labels.push_back(x.positive ? 1 : 0);
  }
  std::cout << "task: " << task.name << " bags: " << bags << "\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    std::cout << "  bag " << i << " seed=" << bc.seeds[i]
              << " cost=" << outcomes[i].final_cost.str() << "  "
              << outcomes[i].final_hypothesis.canonical() << "\n";
  }
  std::cout << "acc_bag: " << fmt6(accuracy(predict_all(ens, ev, atoms), labels)) << "\n";
  return 0;
}

std::vector<fs::path> resolve_tasks(const std::vector<std::string>& given) {
  std::vector<fs::path> out;
  for (const auto& p : given) {
    if (fs::exists(fs::path(p) / "bias.toml")) {
      out.emplace_back(p);
      continue;
    }
    if (!fs::is_directory(p)) throw DataError("not a task directory: " + p);
    std::vector<fs::path> sub;
    for (const auto& entry : fs::directory_iterator(p))
      if (fs::exists(entry.path() / "bias.toml")) sub.push_back(entry.path());
    if (sub.empty()) throw DataError("no task directories under " + p);
    std::sort(sub.begin(), sub.end());
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

int cmd_bench(const Globals& g, const std::vector<std::string>& tasks,
              const std::vector<std::string>& costs, const std::string& seeds,
              const std::string& format, bool no_bagging, const std::string& timings) {
  BenchConfig bc;
  bc.tasks = resolve_tasks(tasks);
  bc.costs.clear();
  for (const auto& c : costs) bc.costs.push_back(cost_or_throw(c));
  bc.seeds = parse_seed_list(seeds);
  bc.base.timeout = g.timeout;
  bc.base.bagging = !no_bagging;
  bc.jobs = g.jobs;
  const auto results = run_bench(bc);
  const ReportFormat fmt = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
  emit(g.out, [&](std::ostream& os) { write_report(os, results, fmt); });
  if (!timings.empty()) {
    std::ofstream f(timings);
    if (!f) throw DataError("cannot write " + timings);
    write_timings(f, results);
  }
  return 0;
}

int cmd_sweep(const Globals& g, const TaskOptions& t, double beta) {
  const Task task = load_task(t.task);
  ExperimentConfig cfg;
  cfg.cost = cost_or_throw(t.cost);
  cfg.timeout = g.timeout;
  cfg.beta = beta;
  cfg.seed = g.seed;
  const auto sweep = sweep_alpha(task, cfg);
  emit(g.out, [&](std::ostream& os) {
    os << "alpha,valid_accuracy\n";
    for (const auto& p : sweep) os << p.alpha << "," << fmt6(p.valid_accuracy) << "\n";
  });
  std::cerr << "best alpha: " << best_alpha(sweep) << "\n";
  return 0;
}

int cmd_report(const Globals& g, const std::string& in, const std::string& format) {
  std::ifstream f(in);
  if (!f) throw DataError("cannot read " + in);
  const auto results = read_report_csv(f);
  if (format == "summary") {
    emit(g.out, [&](std::ostream& os) { write_summary(os, summarize_results(results)); });
  } else {
    const ReportFormat fmt = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
    emit(g.out, [&](std::ostream& os) { write_report(os, results, fmt); });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Snapshot-ensemble inductive logic programming toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--seed", g.seed, "Split seed")->capture_default_str();
  app.add_option("--timeout", g.timeout, "Search timeout per run, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for bench")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Output file (default: stdout)");

  TaskOptions learn_t, ens_t, bag_t, sweep_t;
  auto* learn = app.add_subcommand("learn", "Search for the least-cost hypothesis");
  add_task_options(learn, learn_t);

  auto* ens = app.add_subcommand("ensemble", "Collect a snapshot pool and evaluate the ensemble");
  add_task_options(ens, ens_t);
  double alpha = kDefaultAlpha, beta = kDefaultBeta;
  std::string filter = "full";
  ens->add_option("--alpha", alpha)->check(CLI::NonNegativeNumber)->capture_default_str();
  ens->add_option("--beta", beta)->check(CLI::NonNegativeNumber)->capture_default_str();
  ens->add_option("--filter", filter)
      ->check(CLI::IsMember({"full", "optimal", "final"}))
      ->capture_default_str();

  auto* bag = app.add_subcommand("bag", "Bagging baseline");
  add_task_options(bag, bag_t);
  std::size_t bags = 3;
  std::string bag_seeds = "43,44,45";
  bag->add_option("--bags", bags)->check(CLI::PositiveNumber)->capture_default_str();
  bag->add_option("--seeds", bag_seeds, "Comma-separated seed per bag")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Run tasks x cost functions x seeds");
  std::vector<std::string> bench_tasks{"data/tasks"};
  std::vector<std::string> bench_costs{"mdl", "errorsize", "lexfnsize"};
  std::string bench_seeds = "1,2,3", bench_format = "csv", bench_timings;
  bool no_bagging = false;
  bench->add_option("--tasks", bench_tasks, "Task directories or directories of tasks")
      ->capture_default_str();
  bench->add_option("--costs", bench_costs)
      ->check(CLI::IsMember({"mdl", "errorsize", "lexfnsize"}))
      ->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "Comma-separated split seeds")->capture_default_str();
  bench->add_option("--format", bench_format)->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--no-bagging", no_bagging);
  bench->add_option("--timings", bench_timings, "Also write wall-clock timings CSV here");

  auto* sweep = app.add_subcommand("sweep-alpha", "Validation accuracy over the alpha grid");
  add_task_options(sweep, sweep_t);
  double sweep_beta = kDefaultBeta;
  sweep->add_option("--beta", sweep_beta)->check(CLI::NonNegativeNumber)->capture_default_str();

  auto* report = app.add_subcommand("report", "Summaries and format conversion of bench CSV");
  std::string report_in, report_format = "summary";
  report->add_option("--in", report_in, "Bench CSV")->required();
  report->add_option("--format", report_format)
      ->check(CLI::IsMember({"summary", "csv", "json"}))
      ->capture_default_str();

  auto* gen = app.add_subcommand("gen-tasks", "Regenerate the bundled tasks");
  std::string gen_root = "data/tasks";
  gen->add_option("--root", gen_root)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*learn) return cmd_learn(g, learn_t);
    if (*ens) return cmd_ensemble(g, ens_t, alpha, beta, filter);
    if (*bag) return cmd_bag(g, bag_t, bags, bag_seeds);
    if (*bench)
      return cmd_bench(g, bench_tasks, bench_costs, bench_seeds, bench_format, no_bagging,
                       bench_timings);
    if (*sweep) return cmd_sweep(g, sweep_t, sweep_beta);
    if (*report) return cmd_report(g, report_in, report_format);
    if (*gen) {
      write_bundled_tasks(gen_root);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
