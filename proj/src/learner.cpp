#include "snapilp/learner.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_set>

#include "snapilp/error.hpp"

namespace snapilp {

Clock steady_clock_seconds() {
  return [] {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  };
}

// ---------------------------------------------------------------------------
// Clause enumeration

namespace {

std::vector<Atom> literal_pool(const Bias& bias) {
  std::vector<PredicateSig> preds = bias.body_preds;
  std::sort(preds.begin(), preds.end(), name_less);
  std::vector<Atom> pool;
  for (const auto& p : preds) {
    std::vector<std::uint32_t> args(p.arity, 0);
    while (true) {
      Atom a{p.name, {}};
      for (auto v : args) a.args.push_back(Term::variable(v));
      pool.push_back(std::move(a));
      std::size_t k = 0;
      while (k < args.size() && ++args[k] == bias.max_vars) args[k++] = 0;
      if (k == args.size()) break;
    }
  }
  return pool;
}

}  // namespace

ClauseSpace enumerate_clauses(const Bias& bias) {
  bias.validate();
  const auto pool = literal_pool(bias);
  Atom head{bias.target.name, {}};
  for (std::uint32_t i = 0; i < bias.target.arity; ++i) head.args.push_back(Term::variable(i));

  std::vector<std::pair<Clause, std::string>> found;
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> chosen;

  auto visit = [&](auto&& self, std::size_t start) -> void {
    if (!chosen.empty()) {
      Clause c{head, {}};
      for (auto i : chosen) c.body.push_back(pool[i]);
      if (c.is_range_restricted()) {
        Clause canon = canonicalize(c);
        std::string form = to_string(canon);
        if (seen.insert(form).second) found.emplace_back(std::move(canon), std::move(form));
      }
    }
    if (chosen.size() == bias.max_body) return;
    for (std::size_t i = start; i < pool.size(); ++i) {
      chosen.push_back(i);
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  visit(visit, 0);

  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.second < b.second;
  });
  ClauseSpace space;
  for (auto& [c, f] : found) {
    space.clauses.push_back(std::move(c));
    space.forms.push_back(std::move(f));
  }
  return space;
}

// ---------------------------------------------------------------------------
// Candidate stream

CandidateStream::CandidateStream(const Bias& bias, const Evaluator* pruning,
                                 StreamOptions options)
    : bias_(bias), space_(enumerate_clauses(bias)) {
  const bool can_prune = options.prune && pruning != nullptr &&
                         pruning->supports_clause_queries(bias.target.name);
  for (std::uint32_t id = 0; id < space_.clauses.size(); ++id) {
    const Clause& c = space_.clauses[id];
    if (can_prune && !c.mentions_in_body(bias.target.name) && !pruning->clause_has_solution(c))
      continue;
    active_.push_back(id);
  }
  max_size_ = static_cast<std::size_t>(bias.max_clauses) * (1 + bias.max_body);
}

void CandidateStream::build_level(std::size_t size) {
  entries_.clear();
  cursor_ = 0;
  std::vector<std::uint32_t> chosen;
  auto dfs = [&](auto&& self, std::size_t start, std::size_t remaining) -> void {
    if (remaining == 0) {
      Entry e;
      e.ids = chosen;
      for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (i) e.form += ' ';
        e.form += space_.forms[chosen[i]];
      }
      entries_.push_back(std::move(e));
      return;
    }
    if (chosen.size() == bias_.max_clauses) return;
    for (std::size_t pos = start; pos < active_.size(); ++pos) {
      const auto id = active_[pos];
      const std::size_t sz = space_.clauses[id].size();
      if (sz > remaining) break;  // active_ is ordered by clause size
      chosen.push_back(id);
      self(self, pos + 1, remaining - sz);
      chosen.pop_back();
    }
  };
  dfs(dfs, 0, size);
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.form < b.form; });
}

std::optional<Candidate> CandidateStream::next() {
  while (cursor_ >= entries_.size()) {
    if (level_ >= max_size_) return std::nullopt;
    build_level(++level_);
  }
  const Entry& e = entries_[cursor_++];
  std::vector<Clause> clauses;
  std::vector<const std::string*> forms;
  clauses.reserve(e.ids.size());
  for (auto id : e.ids) {
    clauses.push_back(space_.clauses[id]);
    forms.push_back(&space_.forms[id]);
  }
  ++emitted_;
  return Candidate{Hypothesis::from_canonical(std::move(clauses), forms), e.ids};
}

// ---------------------------------------------------------------------------
// Scoring

CandidateScorer::CandidateScorer(const Evaluator& evaluator, ExampleMultiset examples)
    : evaluator_(evaluator),
      examples_(std::move(examples)),
      positive_(examples_.size()),
      valid_(examples_.size()),
      background_(examples_.size()) {
  atoms_.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const auto& x = examples_[i];
    if (!x.atom.is_ground()) throw DataError("example is not ground: " + to_string(x.atom));
    atoms_.push_back(x.atom);
    valid_.set(i);
    if (x.positive) {
      positive_.set(i);
      ++pos_count_;
    } else {
      ++neg_count_;
    }
    if (evaluator_.base_model().contains(x.atom)) background_.set(i);
  }
}

const kernels::BitVector& CandidateScorer::clause_mask(std::uint32_t id, const Clause& c) {
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  kernels::BitVector mask(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (evaluator_.clause_derives(c, atoms_[i])) mask.set(i);
  }
  return cache_.emplace(id, std::move(mask)).first->second;
}

namespace {

ConfusionCounts from_coverage(const kernels::CoverageCounts& cc, std::uint64_t pos,
                              std::uint64_t neg) {
  return {cc.covered_pos, neg - cc.covered_neg, cc.covered_neg, pos - cc.covered_pos};
}

}  // namespace

ConfusionCounts CandidateScorer::score(const Candidate& c) {
  if (!evaluator_.supports_clause_queries(c.hypothesis)) {
    return evaluator_.confusion(c.hypothesis, examples_);
  }
  std::vector<const kernels::BitVector*> masks{&background_};
  for (std::size_t i = 0; i < c.clause_ids.size(); ++i) {
    masks.push_back(&clause_mask(c.clause_ids[i], c.hypothesis.clauses()[i]));
  }
  evaluator_.charge(masks.size() * positive_.word_count());
  return from_coverage(kernels::union_coverage(masks, positive_, valid_), pos_count_, neg_count_);
}

ConfusionCounts CandidateScorer::score(const Hypothesis& h) {
  if (!evaluator_.supports_clause_queries(h)) return evaluator_.confusion(h, examples_);
  const auto mask = evaluator_.entailed(h, atoms_);
  const kernels::BitVector* masks[] = {&mask};
  return from_coverage(kernels::union_coverage(masks, positive_, valid_), pos_count_, neg_count_);
}

// ---------------------------------------------------------------------------
// Search

SearchOutcome search(const Evaluator& evaluator, const ExampleMultiset& examples,
                     const Bias& bias, CostFunctionId cost, double timeout,
                     const SearchOptions& options) {
  if (examples.empty()) throw DataError("search: empty example set");
  if (!(timeout > 0)) throw DataError("search: timeout must be positive");
  const Clock clock = options.clock ? options.clock : steady_clock_seconds();

  CandidateStream stream(bias, &evaluator, options.stream);
  CandidateScorer scorer(evaluator, examples);
  SearchOutcome out;
  bool have_best = false;

  const double t0 = clock();
  while (clock() - t0 < timeout) {
    auto c = stream.next();
    if (!c) break;
    ConfusionCounts conf;
    try {
      conf = scorer.score(*c);
    } catch (const ResourceLimitError&) {
      ++out.candidates_failed;
      continue;
    }
    ++out.candidates_evaluated;
    const CostKey key = cost_key(cost, conf, c->hypothesis.size());
    if (!have_best || key < out.final_cost) {
      out.final_hypothesis = std::move(c->hypothesis);
      out.final_cost = key;
      out.final_confusion = conf;
      have_best = true;
    }
  }
  out.wall_time = clock() - t0;
  if (stream.emitted() == 0 && !have_best) {
    throw DataError("search: the bias admits no candidate hypotheses (" +
                    std::to_string(stream.pruned_clause_count()) + " clauses pruned)");
  }
  if (!have_best) throw DataError("search: no candidate could be evaluated before the timeout");
  return out;
}

SearchOutcome search(const Program& b, const ExampleSet& e, const Bias& bias,
                     CostFunctionId cost, double timeout, const SearchOptions& options) {
  Evaluator ev(b, options.eval);
  return search(ev, to_multiset(e), bias, cost, timeout, options);
}

}  // namespace snapilp
