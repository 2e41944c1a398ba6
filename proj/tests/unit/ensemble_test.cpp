#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "snapilp/ensemble.hpp"
#include "snapilp/error.hpp"
#include "snapilp/parse.hpp"
#include "snapilp/random.hpp"

using namespace snapilp;

namespace {

Hypothesis member(int i) {
  return parse_hypothesis("t(X):-p" + std::to_string(i) + "(X).");
}

CostKey mdl(std::uint64_t v) { return CostKey(CostFunctionId::Mdl, {v}); }

Snapshot snap(int i, std::uint64_t cost, double cov = 1.0, std::uint64_t mdl_value = 0) {
  return Snapshot{member(i), mdl(cost), {}, mdl_value == 0 ? cost : mdl_value, cov, 0.0};
}

// Candidates with the given costs, each a distinct hypothesis unless `ids` says otherwise.
ScoredSource replay(std::vector<std::uint64_t> costs, std::vector<int> ids = {}) {
  auto i = std::make_shared<std::size_t>(0);
  if (ids.empty())
    for (std::size_t k = 0; k < costs.size(); ++k) ids.push_back(static_cast<int>(k));
  return [=]() -> std::optional<ScoredCandidate> {
    if (*i == costs.size()) return std::nullopt;
    const std::size_t k = (*i)++;
    return ScoredCandidate{member(ids[k]), mdl(costs[k]), {1, 1, 0, 0}};
  };
}

std::vector<std::uint64_t> pool_costs(const SnapshotPool& p) {
  std::vector<std::uint64_t> out;
  for (const auto& s : p.snapshots()) out.push_back(s.cost[0]);
  return out;
}

// Plain restatement of the admission rule, kept separate from collect_pool.
std::vector<std::uint64_t> reference_trace(const std::vector<std::uint64_t>& costs) {
  std::vector<std::uint64_t> admitted;
  std::uint64_t best = UINT64_MAX;
  bool any = false;
  for (auto c : costs) {
    if (!any || c <= best) {
      admitted.push_back(c);
      if (!any || c < best) best = c;
      any = true;
    }
  }
  return admitted;
}

SnapshotPool pool_of(std::vector<Snapshot> snaps) {
  SnapshotPool p;
  for (auto& s : snaps) p.insert(std::move(s));
  return p;
}

}  // namespace

TEST(CollectPool, AdmitsEqualAndBetterCosts) {
  const SnapshotPool p = collect_pool(replay({10, 8, 8, 9, 7}), 100.0);
  EXPECT_EQ(pool_costs(p), (std::vector<std::uint64_t>{10, 8, 8, 7}));
  EXPECT_EQ(p.best_cost(), mdl(7));
}

TEST(CollectPool, SingleCandidate) {
  const SnapshotPool p = collect_pool(replay({4}), 100.0);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.best_cost(), mdl(4));
}

TEST(CollectPool, DuplicateHypothesisIsNotAddedTwice) {
  const SnapshotPool p = collect_pool(replay({5, 5}, {3, 3}), 100.0);
  EXPECT_EQ(p.size(), 1u);
}

TEST(CollectPool, MatchesReferenceTraceOnRandomStreams) {
  Rng rng(17);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::uint64_t> costs(1 + rng.below(40));
    for (auto& c : costs) c = rng.below(12);
    EXPECT_EQ(pool_costs(collect_pool(replay(costs), 1e9)), reference_trace(costs));
  }
}

TEST(CollectPool, TimeoutCheckedAtLoopHead) {
  auto t = std::make_shared<double>(0.0);
  const Clock clock = [t] { return *t; };
  auto calls = std::make_shared<int>(0);
  const ScoredSource source = [=]() -> std::optional<ScoredCandidate> {
    ++*calls;
    *t += 1.0;  // each candidate takes one second
    return ScoredCandidate{member(*calls), mdl(10 - *calls), {1, 1, 0, 0}};
  };
  CollectStats stats;
  const SnapshotPool p = collect_pool(source, 3.0, clock, &stats);
  EXPECT_EQ(*calls, 3);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(stats.candidates_evaluated, 3u);
}

TEST(CollectPool, EmptySourceIsAnError) {
  EXPECT_THROW(collect_pool(replay({}), 10.0), DataError);
  EXPECT_THROW(collect_pool(replay({1}), 0.0), DataError);
}

TEST(AssignWeights, SingleSnapshotGetsOne) {
  const auto ens = assign_weights(pool_of({snap(0, 9, 0.7)}));
  EXPECT_EQ(ens.weights, (std::vector<double>{1.0}));
}

TEST(AssignWeights, TwoSnapshotWorkedExample) {
  const auto ens = assign_weights(pool_of({snap(0, 5, 1.0), snap(1, 3, 0.8)}), 0.0017, 2.0);
  // Closed form in extended precision.
  const long double r0 = std::exp(-0.0017L * 5);
  const long double r1 = 0.64L * std::exp(-0.0017L * 3);
  EXPECT_NEAR(static_cast<double>(r0), 0.9915360, 1e-7);
  EXPECT_NEAR(static_cast<double>(r1), 0.6367443, 1e-7);
  EXPECT_NEAR(ens.weights[0], static_cast<double>(r0 / (r0 + r1)), 1e-12);
  EXPECT_NEAR(ens.weights[1], static_cast<double>(r1 / (r0 + r1)), 1e-12);
  EXPECT_NEAR(ens.weights[0], 0.6089468, 1e-7);
  EXPECT_NEAR(ens.weights[1], 0.3910532, 1e-7);
}

TEST(AssignWeights, ZeroHyperparametersGiveUniform) {
  const auto ens =
      assign_weights(pool_of({snap(0, 5, 1.0), snap(1, 3, 0.8), snap(2, 99, 0.1)}), 0.0, 0.0);
  for (double w : ens.weights) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
}

TEST(AssignWeights, MonotoneInCoverageAndMdl) {
  const auto a = assign_weights(pool_of({snap(0, 5, 0.9), snap(1, 5, 0.7)}));
  EXPECT_GT(a.weights[0], a.weights[1]);
  const auto b = assign_weights(pool_of({snap(0, 4, 0.8), snap(1, 40, 0.8)}));
  EXPECT_GT(b.weights[0], b.weights[1]);
}

TEST(AssignWeights, SumsToOneOnLargeMdl) {
  Rng rng(23);
  for (int round = 0; round < 1000; ++round) {
    std::vector<Snapshot> snaps;
    const std::size_t n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i)
      snaps.push_back(snap(static_cast<int>(i), 1, rng.unit(), 1 + rng.below(100'000)));
    const auto ens = assign_weights(pool_of(std::move(snaps)));
    double total = 0.0;
    for (double w : ens.weights) {
      EXPECT_TRUE(std::isfinite(w));
      EXPECT_GE(w, 0.0);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(AssignWeights, ShiftInvariance) {
  // Adding a constant to every mdl leaves the normalised weights unchanged.
  const auto a = assign_weights(pool_of({snap(0, 5, 0.9), snap(1, 7, 0.6)}));
  const auto b = assign_weights(pool_of({snap(0, 5, 0.9, 50'005), snap(1, 7, 0.6, 50'007)}));
  EXPECT_NEAR(a.weights[0], b.weights[0], 1e-12);
}

TEST(AssignWeights, ZeroCoverage) {
  const auto mixed = assign_weights(pool_of({snap(0, 5, 0.0), snap(1, 6, 0.5)}));
  EXPECT_EQ(mixed.weights[0], 0.0);
  EXPECT_EQ(mixed.weights[1], 1.0);
  EXPECT_FALSE(mixed.uniform_fallback);
  const auto all = assign_weights(pool_of({snap(0, 5, 0.0), snap(1, 6, 0.0)}));
  EXPECT_TRUE(all.uniform_fallback);
  EXPECT_EQ(all.weights, (std::vector<double>{0.5, 0.5}));
}

TEST(AssignWeights, RejectsBadInput) {
  EXPECT_THROW(assign_weights(SnapshotPool{}), DataError);
  EXPECT_THROW(assign_weights(pool_of({snap(0, 1)}), -1.0, 2.0), DataError);
}

TEST(Predict, ThresholdBoundaries) {
  const Evaluator ev(parse_program("p0(a). p1(b). p2(z)."));
  const std::vector<Hypothesis> hs = {member(0), member(1)};
  const std::vector<Atom> xs = {parse_ground_atom("t(a)"), parse_ground_atom("t(b)"),
                                parse_ground_atom("t(c)")};
  EXPECT_EQ(weighted_predictions(hs, std::vector<double>{0.6, 0.4}, ev, xs),
            (std::vector<std::uint8_t>{1, 0, 0}));
  EXPECT_EQ(weighted_predictions(hs, std::vector<double>{0.5, 0.5}, ev, xs),
            (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_THROW(weighted_predictions(hs, std::vector<double>{1.0}, ev, xs), std::invalid_argument);
  EXPECT_THROW(weighted_predictions(hs, std::vector<double>{0.5, 0.5}, ev,
                                    std::vector<Atom>{parse_ground_atom("q(a)")}),
               DataError);
}

TEST(Predict, SingleAtomMatchesBatch) {
  const Evaluator ev(parse_program("p0(a). p1(b). p1(a). p2(c)."));
  const auto ens = assign_weights(pool_of({snap(0, 3, 0.9), snap(1, 4, 0.8), snap(2, 9, 0.2)}));
  const std::vector<Atom> xs = {parse_ground_atom("t(a)"), parse_ground_atom("t(b)"),
                                parse_ground_atom("t(c)")};
  const auto batch = predict_all(ens, ev, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(predict(ens, ev, xs[i]), batch[i]);
}

TEST(FilterPool, Variants) {
  const SnapshotPool p = collect_pool(replay({10, 8, 8, 9, 7}), 100.0);
  EXPECT_EQ(pool_costs(filter_pool(p, PoolFilter::OptimalOnly)), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(filter_pool(p, PoolFilter::FinalOnly).size(), 1u);
  EXPECT_EQ(filter_pool(p, PoolFilter::Full).size(), 4u);

  const SnapshotPool q = collect_pool(replay({7, 7, 9}), 100.0);
  EXPECT_EQ(filter_pool(q, PoolFilter::OptimalOnly).size(), 2u);
  // The earliest optimum is the single-run answer.
  EXPECT_EQ(filter_pool(q, PoolFilter::FinalOnly).snapshots()[0].hypothesis, member(0));
  EXPECT_THROW(filter_pool(SnapshotPool{}, PoolFilter::Full), DataError);

  for (auto f : {PoolFilter::Full, PoolFilter::OptimalOnly, PoolFilter::FinalOnly})
    EXPECT_EQ(parse_pool_filter(to_string(f)), f);
}

TEST(CoverageCostRatio, Examples) {
  EXPECT_NEAR(coverage_cost_ratio(0.5, 1.0, 10, 110, 0.0017, 2.0), 2 * std::log(2.0) / 0.17,
              1e-12);
  EXPECT_NEAR(coverage_cost_ratio(0.5, 1.0, 10, 110, 0.0017, 2.0), 8.15467, 1e-5);
  EXPECT_EQ(coverage_cost_ratio(0.6, 0.6, 10, 110, 0.0017, 2.0), 0.0);
  EXPECT_THROW(coverage_cost_ratio(0.0, 1.0, 10, 110, 0.0017, 2.0), DataError);
  EXPECT_THROW(coverage_cost_ratio(0.5, 1.0, 10, 10, 0.0017, 2.0), DataError);
}

TEST(PoolIo, RoundTrip) {
  SnapshotPool p;
  p.insert(Snapshot::make(parse_hypothesis("gp(X,Y):-parent(X,Z),parent(Z,Y)."),
                          CostKey(CostFunctionId::Lexfnsize, {0, 1, 3}), {4, 5, 1, 0}, 0.25));
  p.insert(Snapshot::make(parse_hypothesis("gp(X,Y):-person(X),person(Y). gp(X,Y):-parent(X,Y)."),
                          CostKey(CostFunctionId::Lexfnsize, {0, 1, 3}), {4, 3, 3, 0}, 1.5));
  std::stringstream ss;
  write_pool(ss, p);
  const std::string first = ss.str();
  const SnapshotPool back = read_pool(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.snapshots()[i].hypothesis, p.snapshots()[i].hypothesis);
    EXPECT_EQ(back.snapshots()[i].cost, p.snapshots()[i].cost);
    EXPECT_EQ(back.snapshots()[i].confusion, p.snapshots()[i].confusion);
    EXPECT_EQ(back.snapshots()[i].mdl, p.snapshots()[i].mdl);
  }
  std::stringstream again;
  write_pool(again, back);
  EXPECT_EQ(again.str(), first);

  std::stringstream bad("gp(A,B):-parent(A,B).\tmdl:3\t1,1,0,0\t99\t0.000\n");
  EXPECT_THROW(read_pool(bad), DataError);
}
