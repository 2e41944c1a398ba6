#include "snapilp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "snapilp/error.hpp"
#include "snapilp/random.hpp"

namespace snapilp {

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::vector<std::uint8_t> labels_of(const ExampleMultiset& xs) {
  std::vector<std::uint8_t> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.positive ? 1 : 0);
  return out;
}

std::vector<Atom> atoms_of(const ExampleMultiset& xs) {
  std::vector<Atom> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.atom);
  return out;
}

std::vector<std::uint8_t> to_bytes(const kernels::BitVector& bits, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = bits.test(i) ? 1 : 0;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Splits and accuracy

std::array<std::size_t, 3> split_sizes(std::size_t n) {
  constexpr std::size_t ratio[3] = {7, 2, 1};
  std::array<std::size_t, 3> size{};
  std::array<std::size_t, 3> frac{};
  std::size_t used = 0;
  for (int i = 0; i < 3; ++i) {
    size[i] = n * ratio[i] / 10;
    frac[i] = n * ratio[i] % 10;
    used += size[i];
  }
  for (std::size_t left = n - used; left > 0; --left) {
    int pick = 0;
    for (int i = 1; i < 3; ++i)
      if (frac[i] > frac[pick]) pick = i;
    ++size[pick];
    frac[pick] = 0;
  }
  return size;
}

Split split_examples(const ExampleSet& e, std::uint64_t seed) {
  Rng rng(seed);
  Split s;
  s.seed = seed;
  for (auto* part : {&s.train, &s.valid, &s.test}) part->target = e.target;
  auto cut = [&](std::vector<Atom> atoms, const char* cls, auto member) {
    const auto sizes = split_sizes(atoms.size());
    if (sizes[2] == 0)
      throw DataError(std::string("split: too few ") + cls + " examples (" +
                      std::to_string(atoms.size()) + ") for a non-empty test part");
    rng.shuffle(atoms);
    auto it = atoms.begin();
    ExampleSet* parts[3] = {&s.train, &s.valid, &s.test};
    for (int i = 0; i < 3; ++i) {
      auto& dst = parts[i]->*member;
      dst.assign(it, it + static_cast<std::ptrdiff_t>(sizes[i]));
      it += static_cast<std::ptrdiff_t>(sizes[i]);
    }
  };
  cut(e.pos, "positive", &ExampleSet::pos);
  cut(e.neg, "negative", &ExampleSet::neg);
  return s;
}

double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("accuracy: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += (predictions[i] != 0) == (labels[i] != 0);
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

// ---------------------------------------------------------------------------
// One task

namespace {

TaskRun run_task_impl(const Task& task, const ExperimentConfig& cfg) {
  const double start = now_seconds();
  TaskRun run;
  TaskResult& r = run.result;
  r.task = task.name;
  r.cost = cfg.cost;
  r.seed = cfg.seed;

  run.split = split_examples(task.examples, cfg.seed);
  const Evaluator ev(task.background, cfg.eval);
  const ExampleMultiset train = to_multiset(run.split.train);
  const ExampleMultiset test = to_multiset(run.split.test);
  const std::vector<Atom> test_atoms = atoms_of(test);
  run.test_labels = labels_of(test);

  // Phase 1.
  std::uint64_t w0 = ev.work();
  double t0 = now_seconds();
  CandidateStream stream(task.bias, &ev);
  CollectStats cs;
  run.pool = collect_pool(stream, ev, train, cfg.cost, cfg.timeout, cfg.clock, &cs);
  r.timings.phase1 = now_seconds() - t0;
  r.work.phase1 = ev.work() - w0;
  r.candidates_evaluated = cs.candidates_evaluated;
  r.pool_size = run.pool.size();
  run.baseline = filter_pool(run.pool, PoolFilter::FinalOnly).snapshots().front().hypothesis;
  r.baseline = run.baseline.canonical();

  // Phase 2.
  t0 = now_seconds();
  run.ensemble = assign_weights(filter_pool(run.pool, cfg.filter), cfg.alpha, cfg.beta);
  r.timings.phase2 = now_seconds() - t0;
  r.work.phase2 = run.ensemble.pool.size();

  // Phase 3.
  w0 = ev.work();
  t0 = now_seconds();
  run.snap_predictions = predict_all(run.ensemble, ev, test_atoms);
  r.timings.phase3 = now_seconds() - t0;
  r.work.phase3 = ev.work() - w0 + run.ensemble.pool.size() * test_atoms.size();

  run.base_predictions = to_bytes(ev.entailed(run.baseline, test_atoms), test_atoms.size());
  r.acc_base = accuracy(run.base_predictions, run.test_labels);
  r.acc_snap = accuracy(run.snap_predictions, run.test_labels);
  r.acc_test_opt = 0.0;
  r.acc_test_worst = 1.0;
  for (const auto& s : run.pool.snapshots()) {
    const double a =
        accuracy(to_bytes(ev.entailed(s.hypothesis, test_atoms), test_atoms.size()), run.test_labels);
    r.acc_test_opt = std::max(r.acc_test_opt, a);
    r.acc_test_worst = std::min(r.acc_test_worst, a);
  }
  r.overfit_gap = r.acc_test_opt - r.acc_base;
  r.snap_improvement = r.acc_snap - r.acc_base;
  r.overhead_pct = r.work.phase1 > 0 ? 100.0 * static_cast<double>(r.work.phase2 + r.work.phase3) /
                                           static_cast<double>(r.work.phase1)
                                     : 0.0;

  if (cfg.bagging) {
    BagConfig bag = cfg.bag;
    bag.per_bag_timeout = cfg.timeout;
    SearchOptions opts;
    opts.eval = cfg.eval;
    t0 = now_seconds();
    const BaggedEnsemble bagged = run_bagging(ev, train, task.bias, cfg.cost, bag, opts);
    const auto bag_predictions = predict_all(bagged, ev, test_atoms);
    r.timings.bagging = now_seconds() - t0;
    r.acc_bag = accuracy(bag_predictions, run.test_labels);
  }
  r.timings.total = now_seconds() - start;
  return run;
}

}  // namespace

TaskRun run_task_detailed(const Task& task, const ExperimentConfig& cfg) {
  try {
    return run_task_impl(task, cfg);
  } catch (const DataError& e) {
    throw DataError(task.name + ": " + e.what());
  } catch (const ResourceLimitError& e) {
    throw ResourceLimitError(task.name + ": " + e.what());
  }
}

TaskResult run_task(const Task& task, const ExperimentConfig& cfg) {
  return run_task_detailed(task, cfg).result;
}

TaskResult run_task(const std::filesystem::path& task_dir, const ExperimentConfig& cfg) {
  return run_task(load_task(task_dir), cfg);
}

// ---------------------------------------------------------------------------
// Alpha sweep

std::vector<SweepPoint> sweep_alpha(const Task& task, const ExperimentConfig& cfg,
                                    std::span<const double> grid) {
  try {
    const Split split = split_examples(task.examples, cfg.seed);
    const Evaluator ev(task.background, cfg.eval);
    CandidateStream stream(task.bias, &ev);
    const SnapshotPool pool =
        filter_pool(collect_pool(stream, ev, to_multiset(split.train), cfg.cost, cfg.timeout,
                                 cfg.clock),
                    cfg.filter);
    const ExampleMultiset valid = to_multiset(split.valid);
    const auto atoms = atoms_of(valid);
    const auto labels = labels_of(valid);
    std::vector<SweepPoint> out;
    for (double a : grid) {
      const auto ens = assign_weights(pool, a, cfg.beta);
      out.push_back({a, accuracy(predict_all(ens, ev, atoms), labels)});
    }
    return out;
  } catch (const DataError& e) {
    throw DataError(task.name + ": " + e.what());
  }
}

double best_alpha(std::span<const SweepPoint> sweep) {
  if (sweep.empty()) throw std::invalid_argument("best_alpha: empty sweep");
  const SweepPoint* best = &sweep.front();
  for (const auto& p : sweep)
    if (p.valid_accuracy > best->valid_accuracy) best = &p;
  return best->alpha;
}

// ---------------------------------------------------------------------------
// Bench

void sort_results(std::vector<TaskResult>& results) {
  std::stable_sort(results.begin(), results.end(), [](const TaskResult& a, const TaskResult& b) {
    if (a.task != b.task) return a.task < b.task;
    if (a.cost != b.cost) return to_string(a.cost) < to_string(b.cost);
    return a.seed < b.seed;
  });
}

std::vector<TaskResult> run_bench(const BenchConfig& cfg) {
  std::vector<Task> tasks;
  for (const auto& dir : cfg.tasks) tasks.push_back(load_task(dir));

  struct Job {
    const Task* task;
    CostFunctionId cost;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& t : tasks)
    for (auto c : cfg.costs)
      for (auto s : cfg.seeds) jobs.push_back({&t, c, s});

  std::vector<TaskResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      ExperimentConfig ec = cfg.base;
      ec.cost = jobs[i].cost;
      ec.seed = jobs[i].seed;
      try {
        results[i] = run_task(*jobs[i].task, ec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.jobs, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  sort_results(results);
  return results;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

constexpr const char* kColumns[] = {"task",           "cost_fn",        "acc_base",
                                    "acc_snap",       "acc_bag",        "acc_test_opt",
                                    "acc_test_worst", "overfit_gap",    "snap_improvement",
                                    "overhead_pct",   "seed"};

std::string fixed6(double v) {
  if (std::fabs(v) < 5e-7) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> row_values(const TaskResult& r) {
  return {r.task,
          std::string(to_string(r.cost)),
          fixed6(r.acc_base),
          fixed6(r.acc_snap),
          r.acc_bag ? fixed6(*r.acc_bag) : "NA",
          fixed6(r.acc_test_opt),
          fixed6(r.acc_test_worst),
          fixed6(r.overfit_gap),
          fixed6(r.snap_improvement),
          fixed6(r.overhead_pct),
          std::to_string(r.seed)};
}

}  // namespace

void write_report(std::ostream& out, std::vector<TaskResult> results, ReportFormat fmt) {
  if (results.empty()) throw DataError("report: no results");
  sort_results(results);
  if (fmt == ReportFormat::Csv) {
    for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
    out << '\n';
    for (const auto& r : results) {
      const auto v = row_values(r);
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
      out << '\n';
    }
    return;
  }
  out << "[\n";
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto v = row_values(results[k]);
    out << "  {";
    for (std::size_t i = 0; i < v.size(); ++i) {
      out << (i ? ", " : "") << '"' << kColumns[i] << "\": ";
      if (i < 2) {
        out << json_string(v[i]);
      } else if (v[i] == "NA") {
        out << "null";
      } else {
        out << v[i];
      }
    }
    out << (k + 1 < results.size() ? "},\n" : "}\n");
  }
  out << "]\n";
}

void write_report(const std::filesystem::path& path, std::vector<TaskResult> results,
                  ReportFormat fmt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_report(out, std::move(results), fmt);
  if (!out.flush()) throw DataError("cannot write " + path.string());
}

std::vector<TaskResult> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("report: empty file");
  std::string header;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) header += (i ? "," : "") + std::string(kColumns[i]);
  if (line != header) throw DataError("report: unexpected header '" + line + "'");
  std::vector<TaskResult> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    const std::string where = "report line " + std::to_string(line_no) + ": ";
    if (f.size() != std::size(kColumns)) throw DataError(where + "wrong column count");
    TaskResult r;
    r.task = f[0];
    const auto cost = parse_cost_function(f[1]);
    if (!cost) throw DataError(where + "unknown cost function '" + f[1] + "'");
    r.cost = *cost;
    try {
      r.acc_base = std::stod(f[2]);
      r.acc_snap = std::stod(f[3]);
      if (f[4] != "NA") r.acc_bag = std::stod(f[4]);
      r.acc_test_opt = std::stod(f[5]);
      r.acc_test_worst = std::stod(f[6]);
      r.overfit_gap = std::stod(f[7]);
      r.snap_improvement = std::stod(f[8]);
      r.overhead_pct = std::stod(f[9]);
      r.seed = std::stoull(f[10]);
    } catch (const std::exception&) {
      throw DataError(where + "malformed number");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_timings(std::ostream& out, std::span<const TaskResult> results) {
  out << "task,cost_fn,seed,phase1_s,phase2_s,phase3_s,bagging_s,total_s,wall_overhead_pct,"
         "pool_size,candidates\n";
  char buf[256];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", r.timings.phase1,
                  r.timings.phase2, r.timings.phase3, r.timings.bagging, r.timings.total,
                  r.wall_overhead_pct());
    out << r.task << ',' << to_string(r.cost) << ',' << r.seed << ',' << buf << ','
        << r.pool_size << ',' << r.candidates_evaluated << '\n';
  }
}

ReportSummary summarize_results(std::span<const TaskResult> results) {
  ReportSummary s;
  std::map<std::string, std::vector<double>> by_cost;
  std::map<std::string, std::vector<double>> gaps_by_cost;
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& r : results) {
    const std::string c(to_string(r.cost));
    by_cost[c].push_back(r.snap_improvement);
    gaps_by_cost[c].push_back(r.overfit_gap);
    auto& g = groups[{r.task, c}];
    g.first.push_back(r.overfit_gap);
    g.second.push_back(r.snap_improvement);
  }
  for (const auto& [name, diffs] : by_cost) {
    CostSummary cs{*parse_cost_function(name), stats::summarize(diffs),
                   stats::mean(gaps_by_cost[name])};
    s.per_cost.push_back(cs);
  }
  std::vector<double> gap, imp;
  for (const auto& [key, g] : groups) {
    gap.push_back(stats::mean(g.first));
    imp.push_back(stats::mean(g.second));
  }
  s.groups = groups.size();
  s.spearman_rho = stats::spearman(gap, imp);
  return s;
}

void write_summary(std::ostream& out, const ReportSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? fixed6(*v) : std::string("NA"); };
  out << "cost_fn,n,mean_improvement,ci95_halfwidth,ttest_p,wilcoxon_p,mean_overfit_gap\n";
  for (const auto& c : s.per_cost) {
    out << to_string(c.cost) << ',' << c.improvement.n << ',' << fixed6(c.improvement.mean) << ','
        << opt(c.improvement.ci95_halfwidth) << ',' << opt(c.improvement.ttest_p) << ','
        << opt(c.improvement.wilcoxon_p) << ',' << fixed6(c.mean_overfit_gap) << '\n';
  }
  out << "spearman_overfit_gap_vs_improvement," << s.groups << ',' << opt(s.spearman_rho) << '\n';
}

}  // namespace snapilp
