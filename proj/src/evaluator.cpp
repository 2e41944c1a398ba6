#include "snapilp/evaluator.hpp"

#include <algorithm>
#include <string>

#include "snapilp/error.hpp"

namespace snapilp {
namespace {

std::size_t hash_tuple(std::span<const Symbol> t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Symbol s : t) {
    h ^= s;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  h *= 0xbf58476d1ce4e5b9ULL;
  return static_cast<std::size_t>(h ^ (h >> 31));
}

struct Range {
  const Relation* rel = nullptr;
  std::size_t lo = 0;
  std::size_t hi = 0;
};

struct JoinState {
  std::vector<Symbol> env;
  std::vector<char> bound;
  std::uint64_t work = 0;

  explicit JoinState(std::uint32_t vars) : env(vars, 0), bound(vars, 0) {}
};

// Nested-loop join of `body` left to right. `emit` returns true to stop early;
// join returns true when stopped.
template <class Emit>
bool join(const std::vector<Atom>& body, std::span<const Range> ranges, std::size_t depth,
          JoinState& st, Emit& emit) {
  if (depth == body.size()) return emit(st.env);
  const Atom& lit = body[depth];
  const Range& r = ranges[depth];
  if (r.rel == nullptr || r.lo >= r.hi) return false;

  std::uint32_t newly_buf[16];
  std::vector<std::uint32_t> newly_heap;
  std::uint32_t* newly = newly_buf;
  if (lit.args.size() > 16) {
    newly_heap.resize(lit.args.size());
    newly = newly_heap.data();
  }
  auto try_row = [&](std::size_t row_id) -> bool {
    ++st.work;
    const auto row = r.rel->row(row_id);
    std::size_t n_new = 0;
    bool ok = true;
    for (std::size_t k = 0; k < lit.args.size(); ++k) {
      const Term& t = lit.args[k];
      const Symbol v = row[k];
      if (!t.is_variable()) {
        if (t.id != v) { ok = false; break; }
      } else if (st.bound[t.id]) {
        if (st.env[t.id] != v) { ok = false; break; }
      } else {
        st.env[t.id] = v;
        st.bound[t.id] = 1;
        newly[n_new++] = t.id;
      }
    }
    bool stop = false;
    if (ok) stop = join(body, ranges, depth + 1, st, emit);
    for (std::size_t i = 0; i < n_new; ++i) st.bound[newly[i]] = 0;
    return stop;
  };

  if (!lit.args.empty()) {
    const Term& first = lit.args.front();
    const bool keyed = !first.is_variable() || st.bound[first.id];
    if (keyed) {
      const Symbol key = first.is_variable() ? st.env[first.id] : first.id;
      const auto ids = r.rel->rows_with_first(key);
      auto it = std::lower_bound(ids.begin(), ids.end(), static_cast<std::uint32_t>(r.lo));
      for (; it != ids.end() && *it < r.hi; ++it) {
        if (try_row(*it)) return true;
      }
      return false;
    }
  }
  for (std::size_t i = r.lo; i < r.hi; ++i) {
    if (try_row(i)) return true;
  }
  return false;
}

void check_ground(const Atom& a, const char* what) {
  if (!a.is_ground()) throw DataError(std::string(what) + " is not ground: " + to_string(a));
}

}  // namespace

// ---------------------------------------------------------------------------
// Relation

bool Relation::insert(std::span<const Symbol> tuple) {
  if ((rows_ + 1) * 2 > slots_.size()) grow();
  const std::size_t h = hash_tuple(tuple);
  const std::size_t slot = find_slot(tuple, h);
  if (slots_[slot] != 0) return false;
  data_.insert(data_.end(), tuple.begin(), tuple.end());
  const auto id = static_cast<std::uint32_t>(rows_++);
  slots_[slot] = id + 1;
  if (arity_ > 0) by_first_[tuple[0]].push_back(id);
  return true;
}

bool Relation::contains(std::span<const Symbol> tuple) const {
  if (slots_.empty() || tuple.size() != arity_) return false;
  return slots_[find_slot(tuple, hash_tuple(tuple))] != 0;
}

std::span<const std::uint32_t> Relation::rows_with_first(Symbol first) const {
  auto it = by_first_.find(first);
  if (it == by_first_.end()) return {};
  return it->second;
}

std::size_t Relation::find_slot(std::span<const Symbol> tuple, std::size_t hash) const {
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = hash & mask;; i = (i + 1) & mask) {
    const auto s = slots_[i];
    if (s == 0) return i;
    const auto r = row(s - 1);
    if (std::equal(r.begin(), r.end(), tuple.begin(), tuple.end())) return i;
  }
}

void Relation::grow() {
  std::vector<std::uint32_t> old = std::move(slots_);
  slots_.assign(std::max<std::size_t>(16, old.size() * 2), 0);
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t id = 0; id < rows_; ++id) {
    std::size_t i = hash_tuple(row(id)) & mask;
    while (slots_[i] != 0) i = (i + 1) & mask;
    slots_[i] = static_cast<std::uint32_t>(id + 1);
  }
}

// ---------------------------------------------------------------------------
// Model

const Relation* Model::relation(Symbol predicate) const {
  if (auto it = owned_.find(predicate); it != owned_.end()) return &it->second;
  return base_ ? base_->relation(predicate) : nullptr;
}

bool Model::contains(const Atom& ground) const {
  const Relation* rel = relation(ground.predicate);
  if (rel == nullptr || rel->arity() != ground.arity()) return false;
  Symbol buf[16];
  std::vector<Symbol> big;
  Symbol* tuple = buf;
  if (ground.args.size() > 16) {
    big.resize(ground.args.size());
    tuple = big.data();
  }
  for (std::size_t i = 0; i < ground.args.size(); ++i) {
    if (ground.args[i].is_variable()) return false;
    tuple[i] = ground.args[i].id;
  }
  return rel->contains({tuple, ground.args.size()});
}

std::size_t Model::atom_count() const {
  std::size_t n = 0;
  for (const auto& [pred, rel] : owned_) n += rel.size();
  for (const Model* b = base_.get(); b; b = b->base_.get()) {
    for (const auto& [pred, rel] : b->owned_) {
      if (relation(pred) == &rel) n += rel.size();
    }
  }
  return n;
}

std::vector<Atom> Model::atoms() const {
  std::vector<std::pair<std::string, Atom>> keyed;
  auto add_relation = [&keyed](Symbol pred, const Relation& rel) {
    for (std::size_t i = 0; i < rel.size(); ++i) {
      Atom a{pred, {}};
      for (Symbol s : rel.row(i)) a.args.push_back(Term::constant(s));
      keyed.emplace_back(to_string(a), std::move(a));
    }
  };
  for (const auto& [pred, rel] : owned_) add_relation(pred, rel);
  for (const Model* b = base_.get(); b; b = b->base_.get()) {
    for (const auto& [pred, rel] : b->owned_) {
      if (relation(pred) == &rel) add_relation(pred, rel);
    }
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Atom> out;
  out.reserve(keyed.size());
  for (auto& [s, a] : keyed) out.push_back(std::move(a));
  return out;
}

// ---------------------------------------------------------------------------
// Semi-naive fixpoint

class FixpointEngine {
 public:
  FixpointEngine(Model& model, const EvalOptions& options) : model_(model), options_(options) {}

  // Saturates `model_` under `rules`. The starting model must already be closed
  // under every rule not in `seeds`.
  void run(const std::vector<const Clause*>& rules, const std::vector<const Clause*>& seeds) {
    for (const Clause* r : rules) owned(r->head.predicate, r->head.arity());

    for (const Clause* r : seeds) {
      std::vector<Range> ranges;
      for (const auto& lit : r->body) {
        const Relation* rel = model_.relation(lit.predicate);
        ranges.push_back({rel, 0, rel ? rel->size() : 0});
      }
      evaluate(*r, ranges);
    }
    auto delta = commit();

    while (!delta.empty()) {
      std::unordered_map<Symbol, std::size_t> full;
      for (const Clause* r : rules) {
        for (const auto& lit : r->body) {
          if (full.count(lit.predicate)) continue;
          const Relation* rel = model_.relation(lit.predicate);
          full[lit.predicate] = rel ? rel->size() : 0;
        }
      }
      for (const Clause* r : rules) {
        for (std::size_t i = 0; i < r->body.size(); ++i) {
          auto d = delta.find(r->body[i].predicate);
          if (d == delta.end()) continue;
          std::vector<Range> ranges;
          for (std::size_t j = 0; j < r->body.size(); ++j) {
            const Symbol p = r->body[j].predicate;
            const Relation* rel = model_.relation(p);
            if (j == i) {
              ranges.push_back({rel, d->second.first, d->second.second});
            } else {
              ranges.push_back({rel, 0, full[p]});
            }
          }
          evaluate(*r, ranges);
        }
      }
      delta = commit();
    }
  }

  std::uint64_t work() const { return work_; }

 private:
  Relation& owned(Symbol pred, std::uint32_t arity) {
    auto it = model_.owned_.find(pred);
    if (it != model_.owned_.end()) return it->second;
    const Relation* inherited = model_.base_ ? model_.base_->relation(pred) : nullptr;
    return model_.owned_.emplace(pred, inherited ? *inherited : Relation(arity)).first->second;
  }

  void evaluate(const Clause& rule, const std::vector<Range>& ranges) {
    JoinState st(rule.variable_count());
    auto& out = pending_[rule.head.predicate];
    const auto& head = rule.head.args;
    auto emit = [&](const std::vector<Symbol>& env) {
      for (const auto& t : head) out.push_back(t.is_variable() ? env[t.id] : t.id);
      if (head.empty()) out.push_back(0);  // marker row for 0-ary heads
      if (++pending_rows_ > options_.max_derived_atoms + derived_headroom()) over_limit();
      return false;
    };
    join(rule.body, ranges, 0, st, emit);
    work_ += st.work;
  }

  std::unordered_map<Symbol, std::pair<std::size_t, std::size_t>> commit() {
    std::unordered_map<Symbol, std::pair<std::size_t, std::size_t>> delta;
    for (auto& [pred, flat] : pending_) {
      if (flat.empty()) continue;
      Relation& rel = model_.owned_.at(pred);
      const std::size_t lo = rel.size();
      const std::size_t stride = std::max<std::size_t>(1, rel.arity());
      for (std::size_t i = 0; i < flat.size(); i += stride) {
        rel.insert({flat.data() + i, rel.arity()});
      }
      const std::size_t hi = rel.size();
      derived_ += hi - lo;
      if (derived_ > options_.max_derived_atoms) over_limit();
      if (hi > lo) delta[pred] = {lo, hi};
    }
    pending_.clear();
    pending_rows_ = 0;
    return delta;
  }

  // Pending rows may repeat already-known atoms; allow that slack before
  // treating the buffer itself as over budget.
  std::size_t derived_headroom() const { return options_.max_derived_atoms; }

  [[noreturn]] void over_limit() const {
    throw ResourceLimitError("derived-atom cap of " + std::to_string(options_.max_derived_atoms) +
                             " exceeded");
  }

  Model& model_;
  const EvalOptions& options_;
  std::unordered_map<Symbol, std::vector<Symbol>> pending_;
  std::size_t pending_rows_ = 0;
  std::size_t derived_ = 0;
  std::uint64_t work_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluator

Evaluator::Evaluator(Program background, EvalOptions options)
    : background_(std::move(background)), options_(options) {
  auto model = std::make_shared<Model>();
  FixpointEngine engine(*model, options_);
  for (const auto& f : background_.facts) {
    auto it = model->owned_.find(f.predicate);
    if (it == model->owned_.end()) it = model->owned_.emplace(f.predicate, Relation(f.arity())).first;
    std::vector<Symbol> tuple;
    for (const auto& t : f.args) tuple.push_back(t.id);
    it->second.insert(tuple);
  }
  std::vector<const Clause*> rules;
  for (const auto& r : background_.rules) rules.push_back(&r);
  engine.run(rules, rules);
  work_ += engine.work();
  base_ = std::move(model);
  for (const auto& r : background_.rules) {
    for (const auto& b : r.body) {
      if (std::find(background_body_preds_.begin(), background_body_preds_.end(), b.predicate) ==
          background_body_preds_.end())
        background_body_preds_.push_back(b.predicate);
    }
  }
}

Model Evaluator::least_model(const Hypothesis& h) const {
  Model m;
  m.base_ = base_;
  FixpointEngine engine(m, options_);
  std::vector<const Clause*> rules, seeds;
  for (const auto& r : background_.rules) rules.push_back(&r);
  for (const auto& c : h.clauses()) {
    rules.push_back(&c);
    seeds.push_back(&c);
  }
  try {
    engine.run(rules, seeds);
  } catch (...) {
    work_ += engine.work();
    throw;
  }
  work_ += engine.work();
  return m;
}

bool Evaluator::is_declared(Symbol predicate) const {
  if (base_->relation(predicate) != nullptr) return true;
  for (const auto& r : background_.rules) {
    if (r.head.predicate == predicate || r.mentions_in_body(predicate)) return true;
  }
  return false;
}

bool Evaluator::entails(const Hypothesis& h, const Atom& e) const {
  check_ground(e, "query atom");
  const bool in_h = std::any_of(h.clauses().begin(), h.clauses().end(),
                                [&](const Clause& c) { return c.head.predicate == e.predicate; });
  if (!in_h && !is_declared(e.predicate))
    throw DataError("undeclared predicate " + symbol_name(e.predicate) + "/" +
                    std::to_string(e.arity()));
  const Atom one[] = {e};
  return entailed(h, one).test(0);
}

ConfusionCounts Evaluator::confusion(const Hypothesis& h, const ExampleSet& e) const {
  return confusion(h, to_multiset(e));
}

ConfusionCounts Evaluator::confusion(const Hypothesis& h, const ExampleMultiset& e) const {
  for (const auto& x : e) check_ground(x.atom, "example");
  const Model m = least_model(h);
  ConfusionCounts c;
  for (const auto& x : e) {
    const bool covered = m.contains(x.atom);
    if (x.positive) {
      ++(covered ? c.tp : c.fn);
    } else {
      ++(covered ? c.fp : c.tn);
    }
  }
  work_ += e.size();
  return c;
}

bool Evaluator::supports_clause_queries(Symbol target) const {
  return std::find(background_body_preds_.begin(), background_body_preds_.end(), target) ==
         background_body_preds_.end();
}

bool Evaluator::supports_clause_queries(const Hypothesis& h) const {
  if (h.is_recursive()) return false;
  return std::all_of(h.clauses().begin(), h.clauses().end(), [&](const Clause& c) {
    return supports_clause_queries(c.head.predicate);
  });
}

bool Evaluator::clause_derives(const Clause& c, const Atom& goal) const {
  if (goal.predicate != c.head.predicate || goal.arity() != c.head.arity()) return false;
  JoinState st(c.variable_count());
  for (std::size_t k = 0; k < goal.args.size(); ++k) {
    const Term& t = c.head.args[k];
    const Symbol v = goal.args[k].id;
    if (!t.is_variable()) {
      if (t.id != v) return false;
    } else if (st.bound[t.id]) {
      if (st.env[t.id] != v) return false;
    } else {
      st.env[t.id] = v;
      st.bound[t.id] = 1;
    }
  }
  std::vector<Range> ranges;
  for (const auto& lit : c.body) {
    const Relation* rel = base_->relation(lit.predicate);
    if (rel == nullptr) return false;
    ranges.push_back({rel, 0, rel->size()});
  }
  auto found = [](const std::vector<Symbol>&) { return true; };
  const bool hit = join(c.body, ranges, 0, st, found);
  work_ += st.work;
  return hit;
}

bool Evaluator::clause_has_solution(const Clause& c) const {
  JoinState st(c.variable_count());
  std::vector<Range> ranges;
  for (const auto& lit : c.body) {
    const Relation* rel = base_->relation(lit.predicate);
    if (rel == nullptr) return false;
    ranges.push_back({rel, 0, rel->size()});
  }
  auto found = [](const std::vector<Symbol>&) { return true; };
  const bool hit = join(c.body, ranges, 0, st, found);
  work_ += st.work;
  return hit;
}

kernels::BitVector Evaluator::entailed(const Hypothesis& h, std::span<const Atom> atoms) const {
  kernels::BitVector out(atoms.size());
  for (const auto& a : atoms) check_ground(a, "query atom");
  if (supports_clause_queries(h)) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (base_->contains(atoms[i])) {
        out.set(i);
        continue;
      }
      for (const auto& c : h.clauses()) {
        if (clause_derives(c, atoms[i])) {
          out.set(i);
          break;
        }
      }
    }
    work_ += atoms.size();
    return out;
  }
  const Model m = least_model(h);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (m.contains(atoms[i])) out.set(i);
  }
  work_ += atoms.size();
  return out;
}

// ---------------------------------------------------------------------------

Model least_model(const Program& b, const Hypothesis& h, EvalOptions options) {
  return Evaluator(b, options).least_model(h);
}

bool entails(const Program& b, const Hypothesis& h, const Atom& e) {
  return Evaluator(b).entails(h, e);
}

ConfusionCounts confusion(const Program& b, const Hypothesis& h, const ExampleSet& e) {
  return Evaluator(b).confusion(h, e);
}

}  // namespace snapilp
