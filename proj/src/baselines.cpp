#include "snapilp/baselines.hpp"

#include "snapilp/ensemble.hpp"
#include "snapilp/error.hpp"
#include "snapilp/random.hpp"

namespace snapilp {

void BagConfig::validate() const {
  if (n_bags == 0) throw DataError("bagging: need at least one bag");
  if (seeds.size() != n_bags)
    throw DataError("bagging: " + std::to_string(n_bags) + " bags but " +
                    std::to_string(seeds.size()) + " seeds");
  if (!(per_bag_timeout > 0)) throw DataError("bagging: timeout must be positive");
}

std::vector<double> BaggedEnsemble::weights() const {
  return std::vector<double>(hypotheses.size(), 1.0 / static_cast<double>(hypotheses.size()));
}

ExampleMultiset bootstrap_sample(const ExampleMultiset& e, std::uint64_t seed) {
  if (e.empty()) throw DataError("bootstrap_sample: empty example set");
  Rng rng(seed);
  ExampleMultiset out;
  out.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) out.push_back(e[rng.below(e.size())]);
  return out;
}

ExampleMultiset bootstrap_sample(const ExampleSet& e, std::uint64_t seed) {
  return bootstrap_sample(to_multiset(e), seed);
}

BaggedEnsemble run_bagging(const Evaluator& evaluator, const ExampleMultiset& train,
                           const Bias& bias, CostFunctionId cost, const BagConfig& cfg,
                           const SearchOptions& options, std::vector<SearchOutcome>* outcomes) {
  cfg.validate();
  BaggedEnsemble ens;
  for (std::size_t i = 0; i < cfg.n_bags; ++i) {
    const std::string tag = "bag " + std::to_string(i) + ": ";
    try {
      const ExampleMultiset sample = bootstrap_sample(train, cfg.seeds[i]);
      SearchOutcome out = search(evaluator, sample, bias, cost, cfg.per_bag_timeout, options);
      ens.hypotheses.push_back(out.final_hypothesis);
      if (outcomes) outcomes->push_back(std::move(out));
    } catch (const DataError& e) {
      throw DataError(tag + e.what());
    } catch (const ResourceLimitError& e) {
      throw ResourceLimitError(tag + e.what());
    }
  }
  return ens;
}

BaggedEnsemble run_bagging(const Program& b, const ExampleSet& e, const Bias& bias,
                           CostFunctionId cost, const BagConfig& cfg,
                           const SearchOptions& options) {
  Evaluator ev(b, options.eval);
  return run_bagging(ev, to_multiset(e), bias, cost, cfg, options);
}

std::vector<std::uint8_t> predict_all(const BaggedEnsemble& ens, const Evaluator& evaluator,
                                      std::span<const Atom> xs) {
  // Integer vote count keeps the 1/2 boundary exact for any bag count.
  if (ens.hypotheses.empty()) throw DataError("bagging: empty ensemble");
  require_declared(ens.hypotheses, evaluator, xs);
  std::vector<std::size_t> votes(xs.size(), 0);
  for (const auto& h : ens.hypotheses) {
    const auto bits = evaluator.entailed(h, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) votes[i] += bits.test(i) ? 1 : 0;
  }
  std::vector<std::uint8_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = 2 * votes[i] >= ens.hypotheses.size();
  return out;
}

}  // namespace snapilp
