#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive: exponential enumeration instead of joins, string keys instead of
// interned rows.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "snapilp/learner.hpp"
#include "snapilp/logic.hpp"
#include "snapilp/random.hpp"

namespace oracle {

using snapilp::Atom;
using snapilp::Clause;
using snapilp::Program;
using snapilp::Symbol;
using snapilp::Term;

using GroundAtom = std::pair<Symbol, std::vector<Symbol>>;
using AtomSet = std::set<GroundAtom>;

inline GroundAtom ground(const Atom& a, const std::vector<Symbol>& env) {
  GroundAtom g{a.predicate, {}};
  for (const auto& t : a.args) g.second.push_back(t.is_variable() ? env[t.id] : t.id);
  return g;
}

// Naive immediate-consequence iteration: every rule is applied under every
// assignment of its variables to constants of the active domain, until no new
// atom appears.
inline AtomSet naive_least_model(const Program& b, const std::vector<Clause>& extra = {}) {
  AtomSet model;
  std::set<Symbol> domain_set;
  for (const auto& f : b.facts) {
    model.insert(ground(f, {}));
    for (const auto& t : f.args) domain_set.insert(t.id);
  }
  std::vector<Clause> rules = b.rules;
  rules.insert(rules.end(), extra.begin(), extra.end());
  for (const auto& r : rules) {
    for (const auto* a : {&r.head}) {
      for (const auto& t : a->args)
        if (!t.is_variable()) domain_set.insert(t.id);
    }
    for (const auto& a : r.body)
      for (const auto& t : a.args)
        if (!t.is_variable()) domain_set.insert(t.id);
  }
  const std::vector<Symbol> domain(domain_set.begin(), domain_set.end());

  bool changed = true;
  while (changed) {
    changed = false;
    AtomSet next = model;
    for (const auto& r : rules) {
      const std::uint32_t nv = r.variable_count();
      std::vector<std::size_t> idx(nv, 0);
      std::vector<Symbol> env(nv);
      if (nv > 0 && domain.empty()) continue;
      while (true) {
        for (std::uint32_t v = 0; v < nv; ++v) env[v] = domain[idx[v]];
        bool ok = true;
        for (const auto& lit : r.body) {
          if (!model.count(ground(lit, env))) {
            ok = false;
            break;
          }
        }
        if (ok && next.insert(ground(r.head, env)).second) changed = true;
        std::uint32_t k = 0;
        while (k < nv && ++idx[k] == domain.size()) idx[k++] = 0;
        if (k == nv) break;
      }
    }
    model = std::move(next);
  }
  return model;
}

inline AtomSet to_set(const std::vector<Atom>& atoms) {
  AtomSet s;
  for (const auto& a : atoms) s.insert(ground(a, {}));
  return s;
}

// Random range-restricted Datalog program over p0..p{n_preds-1}.
inline Program random_program(std::uint64_t seed, int n_preds = 8, int n_facts = 50,
                              int n_rules = 6, int n_consts = 6) {
  snapilp::Rng rng(seed);
  std::vector<Symbol> preds, consts;
  std::vector<std::uint32_t> arity;
  for (int i = 0; i < n_preds; ++i) {
    preds.push_back(snapilp::intern("p" + std::to_string(i)));
    arity.push_back(1 + static_cast<std::uint32_t>(rng.below(2)));
  }
  for (int i = 0; i < n_consts; ++i) consts.push_back(snapilp::intern("c" + std::to_string(i)));

  Program p;
  std::set<GroundAtom> seen;
  for (int i = 0; i < n_facts; ++i) {
    // Facts only for the lower half so rules have something to derive.
    const auto k = rng.below(static_cast<std::uint64_t>(n_preds / 2));
    Atom a{preds[k], {}};
    for (std::uint32_t j = 0; j < arity[k]; ++j)
      a.args.push_back(Term::constant(consts[rng.below(consts.size())]));
    if (seen.insert(ground(a, {})).second) p.facts.push_back(a);
  }
  for (int i = 0; i < n_rules; ++i) {
    Clause c;
    const std::size_t body = 1 + rng.below(3);
    std::uint32_t next_var = 0;
    for (std::size_t j = 0; j < body; ++j) {
      const auto k = rng.below(preds.size());
      Atom a{preds[k], {}};
      for (std::uint32_t m = 0; m < arity[k]; ++m) {
        if (rng.below(8) == 0) {
          a.args.push_back(Term::constant(consts[rng.below(consts.size())]));
        } else {
          const std::uint32_t v = next_var == 0 ? next_var++ : static_cast<std::uint32_t>(
                                                                   rng.below(next_var + 1));
          if (v == next_var) ++next_var;
          a.args.push_back(Term::variable(v));
        }
      }
      c.body.push_back(std::move(a));
    }
    const auto k = n_preds / 2 + rng.below(static_cast<std::uint64_t>(n_preds - n_preds / 2));
    c.head.predicate = preds[k];
    for (std::uint32_t m = 0; m < arity[k]; ++m) {
      if (next_var == 0) {
        c.head.args.push_back(Term::constant(consts[rng.below(consts.size())]));
      } else {
        c.head.args.push_back(Term::variable(static_cast<std::uint32_t>(rng.below(next_var))));
      }
    }
    // Occasionally recurse through a derived predicate.
    if (rng.below(3) == 0) {
      Atom a = c.head;
      c.body.push_back(a);
    }
    p.rules.push_back(std::move(c));
  }
  return p;
}

// True iff a and b are alphabetic variants up to body permutation: brute force
// over body permutations and the variable bijection they induce.
inline bool variants(const Clause& a, const Clause& b) {
  if (a.body.size() != b.body.size()) return false;
  auto match_atom = [](const Atom& x, const Atom& y, std::map<std::uint32_t, std::uint32_t>& fwd,
                       std::map<std::uint32_t, std::uint32_t>& bwd) {
    if (x.predicate != y.predicate || x.args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i) {
      const Term& s = x.args[i];
      const Term& t = y.args[i];
      if (s.is_variable() != t.is_variable()) return false;
      if (!s.is_variable()) {
        if (s.id != t.id) return false;
        continue;
      }
      auto f = fwd.find(s.id);
      auto g = bwd.find(t.id);
      if (f == fwd.end() && g == bwd.end()) {
        fwd[s.id] = t.id;
        bwd[t.id] = s.id;
      } else if (f == fwd.end() || g == bwd.end() || f->second != t.id || g->second != s.id) {
        return false;
      }
    }
    return true;
  };
  std::vector<std::size_t> perm(b.body.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::map<std::uint32_t, std::uint32_t> fwd, bwd;
    bool ok = match_atom(a.head, b.head, fwd, bwd);
    for (std::size_t i = 0; ok && i < perm.size(); ++i) ok = match_atom(a.body[i], b.body[perm[i]], fwd, bwd);
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Every range-restricted clause of the bias, enumerated independently of the
// learner: bodies as sequences (not sets) of literals with arbitrary variable
// indices below max_vars, head variables fixed as 0..arity-1, then reduced to
// one representative per variant class.
inline std::vector<Clause> brute_force_clauses(const snapilp::Bias& bias) {
  std::vector<Atom> lits;
  for (const auto& p : bias.body_preds) {
    const std::uint32_t combos = [&] {
      std::uint32_t c = 1;
      for (std::uint32_t i = 0; i < p.arity; ++i) c *= bias.max_vars;
      return c;
    }();
    for (std::uint32_t code = 0; code < combos; ++code) {
      Atom a{p.name, {}};
      std::uint32_t x = code;
      for (std::uint32_t i = 0; i < p.arity; ++i) {
        a.args.push_back(Term::variable(x % bias.max_vars));
        x /= bias.max_vars;
      }
      lits.push_back(a);
    }
  }
  Atom head{bias.target.name, {}};
  for (std::uint32_t i = 0; i < bias.target.arity; ++i) head.args.push_back(Term::variable(i));

  std::vector<Clause> reps;
  std::vector<std::size_t> idx;
  auto consider = [&](const Clause& c) {
    if (!c.is_range_restricted()) return;
    // Repeated literals make a shorter clause in disguise; sets only.
    for (std::size_t i = 0; i < c.body.size(); ++i)
      for (std::size_t j = i + 1; j < c.body.size(); ++j)
        if (c.body[i] == c.body[j]) return;
    for (const auto& r : reps)
      if (variants(r, c)) return;
    reps.push_back(c);
  };
  for (std::uint32_t len = 1; len <= bias.max_body; ++len) {
    idx.assign(len, 0);
    while (true) {
      Clause c{head, {}};
      for (auto i : idx) c.body.push_back(lits[i]);
      consider(c);
      std::size_t k = 0;
      while (k < len && ++idx[k] == lits.size()) idx[k++] = 0;
      if (k == len) break;
    }
  }
  return reps;
}

}  // namespace oracle
