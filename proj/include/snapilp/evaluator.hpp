#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "snapilp/kernels.hpp"
#include "snapilp/logic.hpp"

namespace snapilp {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Append-only set of ground tuples of one predicate, indexed by first argument.
// Row ids are dense and increase with insertion order, so a generation of the
// fixpoint is a contiguous row range.
class Relation {
 public:
  explicit Relation(std::uint32_t arity = 0) : arity_(arity) {}

  std::uint32_t arity() const { return arity_; }
  std::size_t size() const { return rows_; }

  // Returns true when the tuple was not present.
  bool insert(std::span<const Symbol> tuple);
  bool contains(std::span<const Symbol> tuple) const;

  std::span<const Symbol> row(std::size_t i) const {
    return {data_.data() + i * arity_, arity_};
  }
  // Ascending ids of the rows whose first argument is `first`.
  std::span<const std::uint32_t> rows_with_first(Symbol first) const;

 private:
  std::size_t find_slot(std::span<const Symbol> tuple, std::size_t hash) const;
  void grow();

  std::uint32_t arity_;
  std::size_t rows_ = 0;
  std::vector<Symbol> data_;
  std::vector<std::uint32_t> slots_;  // open addressing: row id + 1, 0 = empty
  std::unordered_map<Symbol, std::vector<std::uint32_t>> by_first_;
};

// The least Herbrand model of a program. A model derived from a memoized
// background model shares it and only owns the relations it extends.
class Model {
 public:
  Model() = default;

  bool contains(const Atom& ground) const;
  const Relation* relation(Symbol predicate) const;
  std::size_t atom_count() const;
  // All atoms, ordered by printed form.
  std::vector<Atom> atoms() const;

 private:
  friend class FixpointEngine;
  friend class Evaluator;

  std::shared_ptr<const Model> base_;
  std::unordered_map<Symbol, Relation> owned_;
};

struct EvalOptions {
  // Cap on atoms derived by one fixpoint (beyond the starting model).
  std::size_t max_derived_atoms = 10'000'000;
};

// Evaluates hypotheses against a fixed background program. The model of the
// background alone is computed once at construction and seeds every
// hypothesis evaluation. Thread-safe for concurrent const use.
class Evaluator {
 public:
  explicit Evaluator(Program background, EvalOptions options = {});

  const Program& background() const { return background_; }
  const Model& base_model() const { return *base_; }
  const EvalOptions& options() const { return options_; }

  // Throws ResourceLimitError when the derived-atom cap is exceeded.
  Model least_model(const Hypothesis& h) const;

  // Throws DataError when e's predicate is declared neither by the background
  // nor by a head of h.
  bool entails(const Hypothesis& h, const Atom& e) const;

  ConfusionCounts confusion(const Hypothesis& h, const ExampleSet& e) const;
  ConfusionCounts confusion(const Hypothesis& h, const ExampleMultiset& e) const;

  // Bit i set iff atoms[i] is entailed by B and h. Non-recursive hypotheses over
  // a background that never reads their head predicates are decided clause by
  // clause with bound head queries; anything else goes through least_model.
  kernels::BitVector entailed(const Hypothesis& h, std::span<const Atom> atoms) const;

  // True when clause-at-a-time evaluation of h is exact.
  bool supports_clause_queries(const Hypothesis& h) const;
  // True when clause-at-a-time evaluation is exact for any non-recursive
  // hypothesis with head predicate `target`.
  bool supports_clause_queries(Symbol target) const;
  // Body of `c` has a solution in the background model with the head bound to
  // `goal` (c must not read predicates derived outside the background).
  bool clause_derives(const Clause& c, const Atom& goal) const;
  // Body of `c` has any solution in the background model.
  bool clause_has_solution(const Clause& c) const;

  bool is_declared(Symbol predicate) const;

  // Rows examined by joins plus example lookups since construction.
  std::uint64_t work() const { return work_.load(std::memory_order_relaxed); }
  // Adds work done on behalf of this evaluator elsewhere (bitset kernels).
  void charge(std::uint64_t units) const { work_.fetch_add(units, std::memory_order_relaxed); }

 private:
  Program background_;
  EvalOptions options_;
  std::shared_ptr<const Model> base_;
  std::vector<Symbol> background_body_preds_;
  mutable std::atomic<std::uint64_t> work_{0};
};

Model least_model(const Program& b, const Hypothesis& h, EvalOptions options = {});
bool entails(const Program& b, const Hypothesis& h, const Atom& e);
ConfusionCounts confusion(const Program& b, const Hypothesis& h, const ExampleSet& e);

}  // namespace snapilp
