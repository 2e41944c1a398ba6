#include <gtest/gtest.h>

#include <limits>
#include <set>

#include "snapilp/error.hpp"
#include "snapilp/learner.hpp"
#include "snapilp/parse.hpp"
#include "snapilp/tasks.hpp"
#include "support/oracles.hpp"

using namespace snapilp;

namespace {

Bias gp_bias(std::uint32_t max_clauses, std::uint32_t max_body, std::uint32_t max_vars) {
  return parse_bias("target = \"gp/2\"\nbody = [\"parent/2\"]\nmax_clauses = " +
                    std::to_string(max_clauses) + "\nmax_body = " + std::to_string(max_body) +
                    "\nmax_vars = " + std::to_string(max_vars) + "\n");
}

Task grandparent_task() {
  Task t;
  t.background = parse_program(
      "parent(ann,bob). parent(bob,cy). parent(bob,dee). parent(cy,eve). parent(fay,ann).");
  t.examples = parse_examples(
      "pos(gp(ann,cy)). pos(gp(ann,dee)). pos(gp(bob,eve)). pos(gp(fay,bob)).\n"
      "neg(gp(cy,ann)). neg(gp(ann,bob)). neg(gp(eve,bob)). neg(gp(bob,cy)). neg(gp(fay,cy)).");
  t.bias = gp_bias(1, 2, 3);
  return t;
}

std::vector<Candidate> drain(CandidateStream& s) {
  std::vector<Candidate> out;
  while (auto c = s.next()) out.push_back(std::move(*c));
  return out;
}

ConfusionCounts model_confusion(const Evaluator& ev, const Hypothesis& h,
                                const ExampleMultiset& xs) {
  const Model m = ev.least_model(h);
  ConfusionCounts c;
  for (const auto& x : xs) {
    const bool hit = m.contains(x.atom);
    if (x.positive) ++(hit ? c.tp : c.fn);
    else ++(hit ? c.fp : c.tn);
  }
  return c;
}

// Returns 0, 1, 2, ... on successive calls.
Clock step_clock() {
  auto t = std::make_shared<double>(-1.0);
  return [t] { return *t += 1.0; };
}

}  // namespace

TEST(CandidateStream, ContainsGrandparentRule) {
  CandidateStream s(gp_bias(1, 2, 3));
  const std::string target = canonical_form(parse_hypothesis("gp(X,Y):-parent(X,Z),parent(Z,Y)."));
  bool found = false;
  for (const auto& c : drain(s)) found = found || c.hypothesis.canonical() == target;
  EXPECT_TRUE(found);
}

TEST(CandidateStream, CountIsStable) {
  CandidateStream a(gp_bias(2, 2, 3));
  CandidateStream b(gp_bias(2, 2, 3));
  const auto xs = drain(a);
  const auto ys = drain(b);
  ASSERT_EQ(xs.size(), ys.size());
  EXPECT_GT(xs.size(), 0u);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(xs[i].hypothesis, ys[i].hypothesis);
  EXPECT_EQ(a.emitted(), xs.size());
}

TEST(CandidateStream, SizeBound) {
  CandidateStream s(gp_bias(1, 1, 2));
  const auto xs = drain(s);
  ASSERT_FALSE(xs.empty());
  for (const auto& c : xs) EXPECT_EQ(c.hypothesis.size(), 2u);
}

TEST(CandidateStream, OrderedBySizeThenFormAndDistinct) {
  CandidateStream s(gp_bias(2, 2, 3));
  const auto xs = drain(s);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_TRUE(seen.insert(xs[i].hypothesis.canonical()).second);
    EXPECT_LE(xs[i].hypothesis.clauses().size(), 2u);
    if (i > 0) {
      const auto& p = xs[i - 1].hypothesis;
      const auto& q = xs[i].hypothesis;
      EXPECT_TRUE(p.size() < q.size() || (p.size() == q.size() && p.canonical() < q.canonical()));
    }
  }
}

TEST(CandidateStream, ClauseSpaceMatchesBruteForce) {
  for (const auto& bias :
       {gp_bias(1, 2, 3), gp_bias(1, 3, 3), gp_bias(1, 2, 4),
        parse_bias("target = \"t/1\"\nbody = [\"e/2\", \"u/1\"]\nmax_body = 3\nmax_vars = 3")}) {
    const ClauseSpace space = enumerate_clauses(bias);
    const auto reps = oracle::brute_force_clauses(bias);
    ASSERT_EQ(space.clauses.size(), reps.size()) << to_string(bias);
    for (const auto& r : reps) {
      bool matched = false;
      for (const auto& c : space.clauses) matched = matched || oracle::variants(r, c);
      EXPECT_TRUE(matched) << to_string(r);
    }
  }
}

TEST(CandidateStream, RecursionOnlyWhenAllowed) {
  Bias b = parse_bias(
      "target = \"path/2\"\nbody = [\"edge/2\", \"path/2\"]\nmax_body = 2\nmax_vars = 3\n"
      "allow_recursion = true");
  bool recursive = false;
  for (const auto& c : enumerate_clauses(b).clauses) recursive = recursive || c.mentions_in_body(intern("path"));
  EXPECT_TRUE(recursive);
}

TEST(CandidateStream, PruningDropsDeadClausesOnly) {
  const Evaluator ev(parse_program("parent(a,b). parent(b,c). person(a)."));
  const Bias bias = parse_bias(
      "target = \"gp/2\"\nbody = [\"parent/2\", \"person/1\"]\nmax_body = 2\nmax_vars = 3");
  CandidateStream pruned(bias, &ev);
  CandidateStream full(bias, &ev, StreamOptions{false});
  const auto kept = drain(pruned);
  const auto all = drain(full);
  EXPECT_LT(kept.size(), all.size());
  for (const auto& c : kept)
    for (const auto& cl : c.hypothesis.clauses()) EXPECT_TRUE(ev.clause_has_solution(cl));
}

TEST(CandidateScorer, MatchesLeastModelConfusion) {
  const Task t = make_noisy_family_task(101);
  const Evaluator ev(t.background);
  const ExampleMultiset xs = to_multiset(t.examples);
  CandidateScorer scorer(ev, xs);
  CandidateStream s(t.bias, &ev);
  std::size_t n = 0;
  while (auto c = s.next()) {
    if (++n % 13 != 0) continue;
    EXPECT_EQ(scorer.score(*c), model_confusion(ev, c->hypothesis, xs)) << c->hypothesis.canonical();
  }
  EXPECT_GT(n, 100u);
}

TEST(Search, GrandparentErrorSize) {
  const Task t = grandparent_task();
  const SearchOutcome out =
      search(t.background, t.examples, t.bias, CostFunctionId::ErrorSize, 60.0);
  EXPECT_EQ(out.final_cost.str(), "errorsize:0,3");
  EXPECT_EQ(out.final_hypothesis.canonical(), "gp(A,B):-parent(A,C),parent(C,B).");
}

TEST(Search, AnytimeReturnsFirstCandidate) {
  const Task t = grandparent_task();
  SearchOptions opts;
  opts.clock = step_clock();
  // t0 = 0, the first check sees 1 and the second 2.
  const SearchOutcome out =
      search(t.background, t.examples, t.bias, CostFunctionId::Mdl, 1.5, opts);
  EXPECT_EQ(out.candidates_evaluated, 1u);
  CandidateStream s(t.bias);
  EXPECT_EQ(out.final_hypothesis, s.next()->hypothesis);
}

TEST(Search, ExhaustedSpaceFindsGlobalMinimum) {
  for (std::uint64_t seed : {101u, 102u}) {
    Task t = make_noisy_family_task(seed);
    t.bias.max_body = 2;  // keeps the fixpoint sweep short
    const Evaluator ev(t.background);
    const ExampleMultiset xs = to_multiset(t.examples);
    for (auto cost : {CostFunctionId::Mdl, CostFunctionId::ErrorSize, CostFunctionId::Lexfnsize}) {
      const auto out = search(ev, xs, t.bias, cost, 600.0);
      // Independent sweep without pruning, confusion from the least model.
      CandidateStream s(t.bias, nullptr, StreamOptions{false});
      std::optional<CostKey> best;
      while (auto c = s.next()) {
        const auto key = cost_key(cost, model_confusion(ev, c->hypothesis, xs), c->hypothesis.size());
        if (!best || key < *best) best = key;
      }
      ASSERT_TRUE(best.has_value());
      EXPECT_EQ(out.final_cost, *best) << to_string(cost);
      EXPECT_EQ(cost_key(cost, ev.confusion(out.final_hypothesis, t.examples),
                         out.final_hypothesis.size()),
                out.final_cost);
    }
  }
}

TEST(Search, PruningKeepsFinalCost) {
  const Task t = make_noisy_family_task(104);
  const Evaluator ev(t.background);
  for (auto cost : {CostFunctionId::Mdl, CostFunctionId::Lexfnsize}) {
    SearchOptions off;
    off.stream.prune = false;
    const auto a = search(ev, to_multiset(t.examples), t.bias, cost, 600.0);
    const auto b = search(ev, to_multiset(t.examples), t.bias, cost, 600.0, off);
    EXPECT_EQ(a.final_cost, b.final_cost);
  }
}

TEST(Search, Errors) {
  const Task t = grandparent_task();
  EXPECT_THROW(search(t.background, t.examples, t.bias, CostFunctionId::Mdl, 0.0), DataError);
  EXPECT_THROW(search(t.background, ExampleSet{t.examples.target, {}, {}}, t.bias,
                      CostFunctionId::Mdl, 1.0),
               DataError);
}
