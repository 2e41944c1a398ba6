#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "snapilp/costs.hpp"
#include "snapilp/evaluator.hpp"
#include "snapilp/learner.hpp"
#include "snapilp/logic.hpp"

namespace snapilp {

struct BagConfig {
  std::size_t n_bags = 3;
  std::vector<std::uint64_t> seeds{43, 44, 45};
  double per_bag_timeout = 10.0;

  // Throws DataError unless seeds.size() == n_bags >= 1 and the timeout is positive.
  void validate() const;
};

struct BaggedEnsemble {
  std::vector<Hypothesis> hypotheses;  // one per bag, in bag order

  std::vector<double> weights() const;  // uniform 1/n
};

// K draws with replacement from the K labelled examples (positives then
// negatives). Throws DataError on an empty set.
ExampleMultiset bootstrap_sample(const ExampleMultiset& e, std::uint64_t seed);
ExampleMultiset bootstrap_sample(const ExampleSet& e, std::uint64_t seed);

// One bootstrap sample and one search per bag, run in bag order. A failing bag
// rethrows with its index prepended. `outcomes`, when given, receives the
// per-bag search outcomes.
BaggedEnsemble run_bagging(const Evaluator& evaluator, const ExampleMultiset& train,
                           const Bias& bias, CostFunctionId cost, const BagConfig& cfg,
                           const SearchOptions& options = {},
                           std::vector<SearchOutcome>* outcomes = nullptr);
BaggedEnsemble run_bagging(const Program& b, const ExampleSet& e, const Bias& bias,
                           CostFunctionId cost, const BagConfig& cfg,
                           const SearchOptions& options = {});

// 1 iff the fraction of members entailing x is >= 0.5.
std::vector<std::uint8_t> predict_all(const BaggedEnsemble& ens, const Evaluator& evaluator,
                                      std::span<const Atom> xs);

}  // namespace snapilp
