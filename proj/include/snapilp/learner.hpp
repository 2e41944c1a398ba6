#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "snapilp/costs.hpp"
#include "snapilp/evaluator.hpp"
#include "snapilp/kernels.hpp"
#include "snapilp/logic.hpp"

namespace snapilp {

// Seconds on a monotonic clock; injectable so anytime behaviour can be tested
// without real waiting.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

// Every canonical clause the bias admits, ordered by (size, canonical form).
struct ClauseSpace {
  std::vector<Clause> clauses;
  std::vector<std::string> forms;
};

// Heads use distinct variables; bodies are sets of 1..max_body literals over
// the declared body predicates with at most max_vars variables per clause.
// Only range-restricted clauses are kept, one per canonical form.
ClauseSpace enumerate_clauses(const Bias& bias);

struct Candidate {
  Hypothesis hypothesis;
  std::vector<std::uint32_t> clause_ids;  // indices into the stream's ClauseSpace
};

struct StreamOptions {
  // Drop clauses that can never fire under the background model. Any
  // hypothesis containing one is costlier than the same hypothesis without it.
  bool prune = true;
};

// Deterministic, exhaustive enumeration of the bias-bounded hypothesis space:
// every set of 1..max_clauses distinct canonical clauses, ordered by total size
// and then by canonical string.
class CandidateStream {
 public:
  // `pruning` supplies the background model used for pruning; without it (or
  // with prune=false) the full space is enumerated.
  explicit CandidateStream(const Bias& bias, const Evaluator* pruning = nullptr,
                           StreamOptions options = {});

  // nullopt once the space is drained.
  std::optional<Candidate> next();

  const Bias& bias() const { return bias_; }
  const ClauseSpace& space() const { return space_; }
  std::size_t emitted() const { return emitted_; }
  std::size_t pruned_clause_count() const { return space_.clauses.size() - active_.size(); }

 private:
  void build_level(std::size_t size);

  struct Entry {
    std::vector<std::uint32_t> ids;
    std::string form;
  };

  Bias bias_;
  ClauseSpace space_;
  std::vector<std::uint32_t> active_;  // non-pruned clause ids, in space order
  std::size_t max_size_ = 0;
  std::size_t level_ = 0;
  std::vector<Entry> entries_;
  std::size_t cursor_ = 0;
  std::size_t emitted_ = 0;
};

// Confusion counts of candidates against a labelled multiset. Hypotheses that
// clause queries cannot decide exactly fall back to a full least model.
class CandidateScorer {
 public:
  CandidateScorer(const Evaluator& evaluator, ExampleMultiset examples);

  // Throws ResourceLimitError from the fixpoint fallback.
  ConfusionCounts score(const Candidate& c);
  ConfusionCounts score(const Hypothesis& h);

  const ExampleMultiset& examples() const { return examples_; }

 private:
  const kernels::BitVector& clause_mask(std::uint32_t id, const Clause& c);

  const Evaluator& evaluator_;
  ExampleMultiset examples_;
  std::vector<Atom> atoms_;
  kernels::BitVector positive_;
  kernels::BitVector valid_;
  kernels::BitVector background_;  // slots entailed by B alone
  std::uint64_t pos_count_ = 0;
  std::uint64_t neg_count_ = 0;
  std::unordered_map<std::uint32_t, kernels::BitVector> cache_;
};

struct SearchOptions {
  StreamOptions stream;
  EvalOptions eval;
  Clock clock;  // defaults to the steady clock
};

struct SearchOutcome {
  Hypothesis final_hypothesis;
  CostKey final_cost{CostFunctionId::Mdl, {0}};
  ConfusionCounts final_confusion;
  std::size_t candidates_evaluated = 0;
  std::size_t candidates_failed = 0;  // aborted by the derived-atom cap
  double wall_time = 0.0;             // seconds
};

// Anytime generate-and-test: evaluates candidates until the timeout elapses or
// the stream is drained and returns the least-cost hypothesis seen (earliest
// wins ties). The timeout is checked between evaluations only.
SearchOutcome search(const Evaluator& evaluator, const ExampleMultiset& examples,
                     const Bias& bias, CostFunctionId cost, double timeout,
                     const SearchOptions& options = {});
SearchOutcome search(const Program& b, const ExampleSet& e, const Bias& bias,
                     CostFunctionId cost, double timeout, const SearchOptions& options = {});

}  // namespace snapilp
