#include "snapilp/logic.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string_view>
#include <utility>

#include "snapilp/error.hpp"

namespace snapilp {

std::string to_string(const PredicateSig& p) {
  return symbol_name(p.name) + "/" + std::to_string(p.arity);
}

bool name_less(const PredicateSig& a, const PredicateSig& b) {
  const auto& an = symbol_name(a.name);
  const auto& bn = symbol_name(b.name);
  if (an != bn) return an < bn;
  return a.arity < b.arity;
}

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::size_t AtomHash::operator()(const Atom& a) const noexcept {
  std::size_t h = a.predicate * 0x9e3779b97f4a7c15ULL;
  for (const auto& t : a.args) {
    h ^= (static_cast<std::size_t>(t.id) << 1 | static_cast<std::size_t>(t.kind)) +
         0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::uint32_t Clause::variable_count() const {
  std::uint32_t n = 0;
  auto scan = [&n](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_variable()) n = std::max(n, t.id + 1);
  };
  scan(head);
  for (const auto& b : body) scan(b);
  return n;
}

bool Clause::is_range_restricted() const {
  for (const auto& t : head.args) {
    if (!t.is_variable()) continue;
    const bool found = std::any_of(body.begin(), body.end(), [&](const Atom& b) {
      return std::find(b.args.begin(), b.args.end(), t) != b.args.end();
    });
    if (!found) return false;
  }
  return true;
}

bool Clause::mentions_in_body(Symbol predicate) const {
  return std::any_of(body.begin(), body.end(),
                     [&](const Atom& b) { return b.predicate == predicate; });
}

std::string variable_name(std::uint32_t index) {
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  return "V" + std::to_string(index);
}

std::string to_string(const Term& t) {
  return t.is_variable() ? variable_name(t.id) : symbol_name(t.id);
}

std::string to_string(const Atom& a) {
  std::string out = symbol_name(a.predicate);
  if (a.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ',';
    out += to_string(a.args[i]);
  }
  out += ')';
  return out;
}

std::string to_string(const Clause& c) {
  std::string out = to_string(c.head);
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    out += i ? "," : ":-";
    out += to_string(c.body[i]);
  }
  out += '.';
  return out;
}

namespace {

constexpr std::size_t kExactCanonicalBody = 7;

// Renders `c` with its body in `order`, renaming variables by first occurrence.
struct Renamer {
  std::vector<std::int64_t> mapping;
  std::uint32_t next = 0;

  explicit Renamer(std::uint32_t vars) : mapping(vars, -1) {}

  Term apply(const Term& t) {
    if (!t.is_variable()) return t;
    auto& m = mapping[t.id];
    if (m < 0) m = next++;
    return Term::variable(static_cast<std::uint32_t>(m));
  }

  Atom apply(const Atom& a) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply(t));
    return out;
  }
};

Clause rename_in_order(const Clause& c, const std::vector<std::size_t>& order) {
  Renamer r(c.variable_count());
  Clause out;
  out.head = r.apply(c.head);
  out.body.reserve(order.size());
  for (auto i : order) out.body.push_back(r.apply(c.body[i]));
  return out;
}

// Ordering key for large bodies: predicate name, then args with variables
// abstracted to their head position (or "_" when not in the head).
std::string literal_sort_key(const Clause& c, const Atom& a) {
  std::string key = symbol_name(a.predicate) + "(";
  for (const auto& t : a.args) {
    if (!t.is_variable()) {
      key += symbol_name(t.id);
    } else {
      auto it = std::find(c.head.args.begin(), c.head.args.end(), t);
      key += it == c.head.args.end() ? "_" : "H" + std::to_string(it - c.head.args.begin());
    }
    key += ',';
  }
  return key;
}

}  // namespace

Clause canonicalize(const Clause& c) {
  const std::size_t n = c.body.size();
  if (n <= 1) return rename_in_order(c, std::vector<std::size_t>(n, 0));

  if (n > kExactCanonicalBody) {
    std::vector<std::pair<std::string, std::size_t>> keyed;
    keyed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keyed.emplace_back(literal_sort_key(c, c.body[i]), i);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::size_t> order;
    for (const auto& [key, i] : keyed) order.push_back(i);
    return rename_in_order(c, order);
  }

  // Identical literals share a class id so their permutations are not revisited.
  std::vector<std::size_t> cls(n);
  for (std::size_t i = 0; i < n; ++i) {
    cls[i] = i;
    for (std::size_t j = 0; j < i; ++j) {
      if (c.body[j] == c.body[i]) {
        cls[i] = j;
        break;
      }
    }
  }
  std::vector<std::size_t> perm = cls;
  std::sort(perm.begin(), perm.end());

  Clause best;
  std::string best_form;
  bool first = true;
  do {
    Clause candidate = rename_in_order(c, perm);
    std::string form = to_string(candidate);
    if (first || form < best_form) {
      best = std::move(candidate);
      best_form = std::move(form);
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::string canonical_form(const Clause& c) { return to_string(canonicalize(c)); }

Hypothesis::Hypothesis(std::vector<Clause> clauses) {
  std::vector<std::pair<Clause, std::string>> items;
  items.reserve(clauses.size());
  for (auto& c : clauses) {
    Clause canon = canonicalize(c);
    std::string form = to_string(canon);
    items.emplace_back(std::move(canon), std::move(form));
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.second < b.second;
  });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const auto& a, const auto& b) { return a.second == b.second; }),
              items.end());
  for (auto& [clause, form] : items) {
    if (!canonical_.empty()) canonical_ += ' ';
    canonical_ += form;
    size_ += clause.size();
    clauses_.push_back(std::move(clause));
  }
}

Hypothesis Hypothesis::from_canonical(std::vector<Clause> clauses,
                                      const std::vector<const std::string*>& forms) {
  Hypothesis h;
  std::size_t len = 0;
  for (const auto* f : forms) len += f->size() + 1;
  h.canonical_.reserve(len);
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) h.canonical_ += ' ';
    h.canonical_ += *forms[i];
    h.size_ += clauses[i].size();
  }
  h.clauses_ = std::move(clauses);
  return h;
}

bool Hypothesis::is_recursive() const {
  for (const auto& c : clauses_) {
    for (const auto& other : clauses_) {
      if (c.mentions_in_body(other.head.predicate)) return true;
    }
  }
  return false;
}

std::vector<PredicateSig> Program::predicates() const {
  std::vector<PredicateSig> out;
  auto add = [&out](const Atom& a) {
    const auto sig = a.signature();
    if (std::find(out.begin(), out.end(), sig) == out.end()) out.push_back(sig);
  };
  for (const auto& f : facts) add(f);
  for (const auto& r : rules) {
    add(r.head);
    for (const auto& b : r.body) add(b);
  }
  std::sort(out.begin(), out.end(), name_less);
  return out;
}

std::string to_string(const Program& p) {
  std::string out;
  for (const auto& f : p.facts) out += to_string(f) + ".\n";
  for (const auto& r : p.rules) out += to_string(r) + "\n";
  return out;
}

ExampleMultiset to_multiset(const ExampleSet& e) {
  ExampleMultiset out;
  out.reserve(e.size());
  for (const auto& a : e.pos) out.push_back({a, true});
  for (const auto& a : e.neg) out.push_back({a, false});
  return out;
}

void Bias::validate() const {
  if (max_clauses < 1) throw DataError("bias: max_clauses must be >= 1");
  if (max_body < 1) throw DataError("bias: max_body must be >= 1");
  if (body_preds.empty()) throw DataError("bias: no body predicates declared");
  std::uint32_t max_arity = target.arity;
  for (const auto& p : body_preds) max_arity = std::max(max_arity, p.arity);
  if (max_vars < max_arity)
    throw DataError("bias: max_vars (" + std::to_string(max_vars) +
                    ") is smaller than the largest declared arity (" +
                    std::to_string(max_arity) + ")");
  const bool target_in_body =
      std::find(body_preds.begin(), body_preds.end(), target) != body_preds.end();
  if (target_in_body && !allow_recursion)
    throw DataError("bias: target " + to_string(target) +
                    " is a body predicate but allow_recursion is false");
  for (const auto& p : body_preds) {
    if (p.name == target.name && p.arity != target.arity)
      throw DataError("bias: arity clash for " + symbol_name(p.name));
  }
}

}  // namespace snapilp
