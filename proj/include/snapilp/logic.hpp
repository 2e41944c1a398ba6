#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "snapilp/symbols.hpp"

namespace snapilp {

struct PredicateSig {
  Symbol name = 0;
  std::uint32_t arity = 0;

  friend bool operator==(const PredicateSig&, const PredicateSig&) = default;
};

// "name/arity"
std::string to_string(const PredicateSig& p);

// Orders by printed name, then arity (stable across processes, unlike Symbol ids).
bool name_less(const PredicateSig& a, const PredicateSig& b);

// A constant (interned symbol; integers are plain constants) or a clause-local
// variable identified by its index. The two namespaces never mix: a variable
// index is only meaningful inside the clause that owns it.
struct Term {
  enum class Kind : std::uint8_t { Constant, Variable };

  Kind kind = Kind::Constant;
  std::uint32_t id = 0;

  static Term constant(Symbol s) { return {Kind::Constant, s}; }
  static Term variable(std::uint32_t index) { return {Kind::Variable, index}; }

  bool is_variable() const { return kind == Kind::Variable; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  Symbol predicate = 0;
  std::vector<Term> args;

  std::uint32_t arity() const { return static_cast<std::uint32_t>(args.size()); }
  PredicateSig signature() const { return {predicate, arity()}; }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept;
};

// Definite clause. A clause with an empty body and a ground head is a fact.
struct Clause {
  Atom head;
  std::vector<Atom> body;

  // Number of atoms, head included.
  std::size_t size() const { return 1 + body.size(); }
  // One past the largest variable index used (0 for ground clauses).
  std::uint32_t variable_count() const;
  bool is_fact() const { return body.empty() && head.is_ground(); }
  // Every head variable occurs in the body.
  bool is_range_restricted() const;
  bool mentions_in_body(Symbol predicate) const;

  friend bool operator==(const Clause&, const Clause&) = default;
};

// Variable index -> surface name: A..Z, then V26, V27, ...
std::string variable_name(std::uint32_t index);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
// "head:-b1,b2." or "head."
std::string to_string(const Clause& c);

// Variables renumbered by first occurrence (head, then body) and body literals
// ordered so that the printed clause is lexicographically minimal. Alphabetic
// variants and body permutations of one clause map to the same result.
Clause canonicalize(const Clause& c);
std::string canonical_form(const Clause& c);

// A finite set of definite clauses, kept in canonical form: each clause
// canonicalized, duplicates removed, clauses ordered by (size, printed form).
class Hypothesis {
 public:
  Hypothesis() = default;  // the empty hypothesis
  explicit Hypothesis(std::vector<Clause> clauses);

  // Trusted constructor for clauses that are already canonical, deduplicated and
  // ordered; `forms[i]` must be canonical_form(clauses[i]).
  static Hypothesis from_canonical(std::vector<Clause> clauses,
                                   const std::vector<const std::string*>& forms);

  const std::vector<Clause>& clauses() const { return clauses_; }
  bool empty() const { return clauses_.empty(); }
  // complexity(h): total atom count over all clauses.
  std::size_t size() const { return size_; }
  // Clause forms joined by a single space; "" for the empty hypothesis.
  const std::string& canonical() const { return canonical_; }
  bool is_recursive() const;

  friend bool operator==(const Hypothesis& a, const Hypothesis& b) {
    return a.canonical_ == b.canonical_;
  }

 private:
  std::vector<Clause> clauses_;
  std::size_t size_ = 0;
  std::string canonical_;
};

inline const std::string& canonical_form(const Hypothesis& h) { return h.canonical(); }

// Background knowledge: ground facts plus range-restricted rules.
struct Program {
  std::vector<Atom> facts;
  std::vector<Clause> rules;

  // Every predicate appearing in a fact, rule head or rule body.
  std::vector<PredicateSig> predicates() const;
};

std::string to_string(const Program& p);

struct ExampleSet {
  PredicateSig target;
  std::vector<Atom> pos;
  std::vector<Atom> neg;

  std::size_t size() const { return pos.size() + neg.size(); }
};

struct LabeledExample {
  Atom atom;
  bool positive = false;
};

// Labelled examples with multiplicity (bootstrap samples repeat entries).
using ExampleMultiset = std::vector<LabeledExample>;

// Positives first, then negatives, each in input order.
ExampleMultiset to_multiset(const ExampleSet& e);

// Hypothesis-space declaration.
struct Bias {
  PredicateSig target;
  std::vector<PredicateSig> body_preds;
  std::uint32_t max_clauses = 1;
  std::uint32_t max_body = 1;
  std::uint32_t max_vars = 2;
  bool allow_recursion = false;

  // Throws DataError on a violated invariant.
  void validate() const;
};

}  // namespace snapilp
