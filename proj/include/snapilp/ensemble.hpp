#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "snapilp/costs.hpp"
#include "snapilp/evaluator.hpp"
#include "snapilp/learner.hpp"
#include "snapilp/logic.hpp"

namespace snapilp {

inline constexpr double kDefaultAlpha = 0.0017;
inline constexpr double kDefaultBeta = 2.0;

struct Snapshot {
  Hypothesis hypothesis;
  CostKey cost;
  ConfusionCounts confusion;  // on the training examples
  std::uint64_t mdl = 0;      // fp + fn + size(hypothesis), whatever the search cost
  double coverage = 0.0;      // (tp + tn) / total
  double discovered_at = 0.0; // seconds since the search started

  static Snapshot make(Hypothesis h, CostKey cost, ConfusionCounts confusion,
                       double discovered_at);
};

// Snapshots keyed by canonical hypothesis form; the first discovery of a form
// is kept. Iteration order is insertion order.
class SnapshotPool {
 public:
  // Returns false (and keeps the pool unchanged) when the form is present.
  bool insert(Snapshot s);

  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  // Minimum snapshot cost; nullopt for an empty pool.
  const std::optional<CostKey>& best_cost() const { return best_; }

 private:
  std::vector<Snapshot> snapshots_;
  std::unordered_set<std::string> forms_;
  std::optional<CostKey> best_;
};

struct ScoredCandidate {
  Hypothesis hypothesis;
  CostKey cost;
  ConfusionCounts confusion;
};

// NextCandidate followed by cost(h, B, E). nullopt when the stream is drained;
// may throw ResourceLimitError for a single candidate.
using ScoredSource = std::function<std::optional<ScoredCandidate>()>;

struct CollectStats {
  std::size_t candidates_evaluated = 0;
  std::size_t candidates_failed = 0;
  double wall_time = 0.0;
};

// Snapshot pool collection. bestCost starts at +infinity; a candidate whose
// cost is <= bestCost joins the pool and a strictly smaller cost lowers
// bestCost. Runs until the timeout (checked at the loop head) or until the
// source is drained. Throws DataError when no candidate was admitted.
SnapshotPool collect_pool(const ScoredSource& next, double timeout, const Clock& clock = {},
                          CollectStats* stats = nullptr);

// The same loop over the learner's candidate stream, scored on `examples`.
SnapshotPool collect_pool(CandidateStream& stream, const Evaluator& evaluator,
                          const ExampleMultiset& examples, CostFunctionId cost, double timeout,
                          const Clock& clock = {}, CollectStats* stats = nullptr);

enum class PoolFilter : std::uint8_t { Full, OptimalOnly, FinalOnly };

std::string_view to_string(PoolFilter f);
std::optional<PoolFilter> parse_pool_filter(std::string_view name);  // full|optimal|final

// Full: unchanged. OptimalOnly: snapshots whose cost equals the best cost.
// FinalOnly: the earliest-discovered minimum-cost snapshot (the single-run
// baseline). Throws DataError on an empty pool.
SnapshotPool filter_pool(const SnapshotPool& pool, PoolFilter f);

struct WeightedEnsemble {
  SnapshotPool pool;
  std::vector<double> weights;  // parallel to pool.snapshots(); sums to 1
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  bool uniform_fallback = false;  // every snapshot had zero coverage
};

// raw_i = coverage_i^beta * exp(-alpha * mdl_i), normalised to sum to 1.
// Computed as log-weights shifted by their maximum before exponentiation.
// Zero coverage yields weight 0 (for beta > 0); if that holds for every
// snapshot the weights fall back to uniform and a warning is logged.
WeightedEnsemble assign_weights(const SnapshotPool& pool, double alpha = kDefaultAlpha,
                                double beta = kDefaultBeta);

// 1 iff sum_h w_h * y_h(x) >= 0.5, with y_h(x) = entails(B, h, x).
std::uint8_t predict(const WeightedEnsemble& ens, const Evaluator& evaluator, const Atom& x);
std::vector<std::uint8_t> predict_all(const WeightedEnsemble& ens, const Evaluator& evaluator,
                                      std::span<const Atom> xs);

// Throws DataError for an atom whose predicate neither the background nor a
// member head declares.
void require_declared(std::span<const Hypothesis> members, const Evaluator& evaluator,
                      std::span<const Atom> xs);

// Weighted vote of arbitrary hypotheses (used by the bagging baseline too).
std::vector<std::uint8_t> weighted_predictions(std::span<const Hypothesis> members,
                                               std::span<const double> weights,
                                               const Evaluator& evaluator,
                                               std::span<const Atom> xs);

// R = beta * ln(cov_max / cov_min) / (alpha * (mdl_max - mdl_min)).
// Throws DataError when cov_min <= 0, alpha <= 0 or mdl_max <= mdl_min.
double coverage_cost_ratio(double cov_min, double cov_max, double mdl_min, double mdl_max,
                           double alpha, double beta);

// Line format, one snapshot per record, tab separated:
//   canonical hypothesis, cost key, tp,tn,fp,fn, mdl, discovery seconds (3 dp)
void write_pool(std::ostream& out, const SnapshotPool& pool);
SnapshotPool read_pool(std::istream& in);

}  // namespace snapilp
