#include "snapilp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>

#include "snapilp/error.hpp"
#include "snapilp/parse.hpp"

namespace snapilp {

Snapshot Snapshot::make(Hypothesis h, CostKey cost, ConfusionCounts confusion,
                        double discovered_at) {
  const std::uint64_t mdl = mdl_score(confusion, h.size());
  const double cov = snapilp::coverage(confusion);
  return Snapshot{std::move(h), cost, confusion, mdl, cov, discovered_at};
}

bool SnapshotPool::insert(Snapshot s) {
  if (!forms_.insert(s.hypothesis.canonical()).second) return false;
  if (!best_ || s.cost < *best_) best_ = s.cost;
  snapshots_.push_back(std::move(s));
  return true;
}

// ---------------------------------------------------------------------------
// Phase 1

SnapshotPool collect_pool(const ScoredSource& next, double timeout, const Clock& clock_in,
                          CollectStats* stats) {
  if (!(timeout > 0)) throw DataError("collect_pool: timeout must be positive");
  const Clock clock = clock_in ? clock_in : steady_clock_seconds();
  SnapshotPool pool;
  std::optional<CostKey> best_cost;  // empty = +infinity
  CollectStats local;

  const double t0 = clock();
  while (clock() - t0 < timeout) {
    std::optional<ScoredCandidate> c;
    try {
      c = next();
    } catch (const ResourceLimitError&) {
      ++local.candidates_failed;
      continue;
    }
    if (!c) break;
    ++local.candidates_evaluated;
    if (!best_cost || c->cost <= *best_cost) {
      const bool improves = !best_cost || c->cost < *best_cost;
      pool.insert(Snapshot::make(std::move(c->hypothesis), c->cost, c->confusion, clock() - t0));
      if (improves) best_cost = c->cost;
    }
  }
  local.wall_time = clock() - t0;
  if (stats) *stats = local;
  if (pool.empty()) throw DataError("collect_pool: no candidate was produced before the timeout");
  return pool;
}

SnapshotPool collect_pool(CandidateStream& stream, const Evaluator& evaluator,
                          const ExampleMultiset& examples, CostFunctionId cost, double timeout,
                          const Clock& clock, CollectStats* stats) {
  if (examples.empty()) throw DataError("collect_pool: empty example set");
  CandidateScorer scorer(evaluator, examples);
  ScoredSource source = [&]() -> std::optional<ScoredCandidate> {
    auto c = stream.next();
    if (!c) return std::nullopt;
    const ConfusionCounts conf = scorer.score(*c);
    const CostKey key = cost_key(cost, conf, c->hypothesis.size());
    return ScoredCandidate{std::move(c->hypothesis), key, conf};
  };
  return collect_pool(source, timeout, clock, stats);
}

// ---------------------------------------------------------------------------
// Pool filters

std::string_view to_string(PoolFilter f) {
  switch (f) {
    case PoolFilter::Full: return "full";
    case PoolFilter::OptimalOnly: return "optimal";
    case PoolFilter::FinalOnly: return "final";
  }
  return "?";
}

std::optional<PoolFilter> parse_pool_filter(std::string_view name) {
  if (name == "full") return PoolFilter::Full;
  if (name == "optimal") return PoolFilter::OptimalOnly;
  if (name == "final") return PoolFilter::FinalOnly;
  return std::nullopt;
}

SnapshotPool filter_pool(const SnapshotPool& pool, PoolFilter f) {
  if (pool.empty()) throw DataError("filter_pool: empty pool");
  if (f == PoolFilter::Full) return pool;
  const CostKey& best = *pool.best_cost();
  SnapshotPool out;
  if (f == PoolFilter::OptimalOnly) {
    for (const auto& s : pool.snapshots()) {
      if (s.cost == best) out.insert(s);
    }
    return out;
  }
  const Snapshot* first = nullptr;
  for (const auto& s : pool.snapshots()) {
    if (s.cost == best && (first == nullptr || s.discovered_at < first->discovered_at)) first = &s;
  }
  out.insert(*first);
  return out;
}

// ---------------------------------------------------------------------------
// Phase 2

WeightedEnsemble assign_weights(const SnapshotPool& pool, double alpha, double beta) {
  if (pool.empty()) throw DataError("assign_weights: empty pool");
  if (!(alpha >= 0) || !(beta >= 0))
    throw DataError("assign_weights: alpha and beta must be non-negative");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  const auto& snaps = pool.snapshots();
  std::vector<double> log_raw(snaps.size());
  double shift = kNegInf;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const double cov = snaps[i].coverage;
    // 0^0 = 1: with beta = 0 coverage carries no information.
    const double likelihood = beta == 0.0 ? 0.0 : (cov > 0.0 ? beta * std::log(cov) : kNegInf);
    log_raw[i] = likelihood - alpha * static_cast<double>(snaps[i].mdl);
    shift = std::max(shift, log_raw[i]);
  }

  WeightedEnsemble ens{pool, std::vector<double>(snaps.size(), 0.0), alpha, beta, false};
  if (shift == kNegInf) {
    std::clog << "warning: every snapshot has zero training coverage; using uniform weights\n";
    std::fill(ens.weights.begin(), ens.weights.end(), 1.0 / static_cast<double>(snaps.size()));
    ens.uniform_fallback = true;
    return ens;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    ens.weights[i] = log_raw[i] == kNegInf ? 0.0 : std::exp(log_raw[i] - shift);
    total += ens.weights[i];
  }
  for (auto& w : ens.weights) w /= total;
  return ens;
}

// ---------------------------------------------------------------------------
// Phase 3

void require_declared(std::span<const Hypothesis> members, const Evaluator& evaluator,
                      std::span<const Atom> xs) {
  for (const auto& x : xs) {
    const bool declared =
        evaluator.is_declared(x.predicate) ||
        std::any_of(members.begin(), members.end(), [&](const Hypothesis& h) {
          return std::any_of(h.clauses().begin(), h.clauses().end(),
                             [&](const Clause& c) { return c.head.predicate == x.predicate; });
        });
    if (!declared)
      throw DataError("undeclared predicate " + symbol_name(x.predicate) + "/" +
                      std::to_string(x.arity()));
  }
}

std::vector<std::uint8_t> weighted_predictions(std::span<const Hypothesis> members,
                                               std::span<const double> weights,
                                               const Evaluator& evaluator,
                                               std::span<const Atom> xs) {
  if (weights.size() != members.size())
    throw std::invalid_argument("weighted_predictions: one weight per member required");
  require_declared(members, evaluator, xs);
  std::vector<kernels::BitVector> votes;
  votes.reserve(members.size());
  for (const auto& h : members) votes.push_back(evaluator.entailed(h, xs));
  std::vector<const kernels::BitVector*> ptrs;
  for (const auto& v : votes) ptrs.push_back(&v);
  const auto scores = kernels::weighted_vote(weights, ptrs, xs.size());
  std::vector<std::uint8_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = scores[i] >= 0.5 ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> predict_all(const WeightedEnsemble& ens, const Evaluator& evaluator,
                                      std::span<const Atom> xs) {
  std::vector<Hypothesis> members;
  members.reserve(ens.pool.size());
  for (const auto& s : ens.pool.snapshots()) members.push_back(s.hypothesis);
  return weighted_predictions(members, ens.weights, evaluator, xs);
}

std::uint8_t predict(const WeightedEnsemble& ens, const Evaluator& evaluator, const Atom& x) {
  const Atom one[] = {x};
  return predict_all(ens, evaluator, one)[0];
}

double coverage_cost_ratio(double cov_min, double cov_max, double mdl_min, double mdl_max,
                           double alpha, double beta) {
  if (!(cov_min > 0)) throw DataError("coverage_cost_ratio: cov_min must be positive");
  if (!(alpha > 0)) throw DataError("coverage_cost_ratio: alpha must be positive");
  if (!(mdl_max > mdl_min)) throw DataError("coverage_cost_ratio: empty mdl range");
  return beta * std::log(cov_max / cov_min) / (alpha * (mdl_max - mdl_min));
}

// ---------------------------------------------------------------------------
// Serialization

void write_pool(std::ostream& out, const SnapshotPool& pool) {
  for (const auto& s : pool.snapshots()) {
    char time[32];
    std::snprintf(time, sizeof time, "%.3f", s.discovered_at);
    out << s.hypothesis.canonical() << '\t' << s.cost.str() << '\t' << s.confusion.tp << ','
        << s.confusion.tn << ',' << s.confusion.fp << ',' << s.confusion.fn << '\t' << s.mdl
        << '\t' << time << '\n';
  }
}

SnapshotPool read_pool(std::istream& in) {
  SnapshotPool pool;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 5)
      throw DataError("pool line " + std::to_string(line_no) + ": expected 5 tab-separated fields");
    try {
      Hypothesis h = parse_hypothesis(fields[0]);
      const CostKey cost = CostKey::parse(fields[1]);
      ConfusionCounts c;
      char extra = 0;
      if (std::sscanf(fields[2].c_str(), "%lu,%lu,%lu,%lu%c", &c.tp, &c.tn, &c.fp, &c.fn,
                      &extra) != 4)
        throw DataError("bad confusion counts '" + fields[2] + "'");
      Snapshot s = Snapshot::make(std::move(h), cost, c, std::stod(fields[4]));
      if (s.mdl != std::stoull(fields[3]))
        throw DataError("mdl " + fields[3] + " disagrees with counts and size");
      pool.insert(std::move(s));
    } catch (const DataError& e) {
      throw DataError("pool line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw DataError("pool line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument&) {
      throw DataError("pool line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return pool;
}

}  // namespace snapilp
