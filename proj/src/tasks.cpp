#include "snapilp/tasks.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <utility>

#include "snapilp/random.hpp"

namespace snapilp {

namespace {

using Pair = std::pair<int, int>;

struct Family {
  int people = 0;
  std::vector<Pair> father;  // (parent, child)
  std::vector<Pair> mother;
  std::set<Pair> grandparent;
  std::vector<bool> has_child;
};

std::string name(char prefix, int id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03d", prefix, id);
  return buf;
}

Family make_family(Rng& rng, int founder_couples, int generations) {
  Family f;
  std::vector<Pair> couples;  // (father, mother)
  for (int i = 0; i < founder_couples; ++i) {
    couples.push_back({f.people, f.people + 1});
    f.people += 2;
  }
  for (int g = 0; g < generations; ++g) {
    std::vector<Pair> next;
    for (const auto& [dad, mum] : couples) {
      const int kids = 1 + static_cast<int>(rng.below(3));
      for (int k = 0; k < kids; ++k) {
        const int child = f.people++;
        f.father.push_back({dad, child});
        f.mother.push_back({mum, child});
        if (rng.below(10) < 7) {
          const int spouse = f.people++;
          if (rng.below(2) == 0) {
            next.push_back({child, spouse});
          } else {
            next.push_back({spouse, child});
          }
        }
      }
    }
    couples = std::move(next);
  }
  std::vector<std::vector<int>> children(f.people);
  for (const auto* rel : {&f.father, &f.mother})
    for (const auto& [p, c] : *rel) children[p].push_back(c);
  f.has_child.assign(f.people, false);
  for (int p = 0; p < f.people; ++p) {
    f.has_child[p] = !children[p].empty();
    for (int c : children[p])
      for (int gc : children[c]) f.grandparent.insert({p, gc});
  }
  return f;
}

// Non-grandparent pairs: half with a parent in first position, half uniform.
std::vector<Pair> family_negatives(Rng& rng, const Family& f, std::size_t count) {
  std::set<Pair> out;
  std::vector<int> parents;
  for (int p = 0; p < f.people; ++p)
    if (f.has_child[p]) parents.push_back(p);
  while (out.size() < count) {
    const bool hard = out.size() % 2 == 0;
    const int a = hard ? parents[rng.below(parents.size())] : static_cast<int>(rng.below(f.people));
    const int b = static_cast<int>(rng.below(f.people));
    if (a == b || f.grandparent.count({a, b})) continue;
    out.insert({a, b});
  }
  std::vector<Pair> v(out.begin(), out.end());
  rng.shuffle(v);
  return v;
}

std::string atom2(const char* pred, int a, int b, char prefix = 'p') {
  return std::string(pred) + "(" + name(prefix, a) + "," + name(prefix, b) + ")";
}

Task assemble(std::string task_name, const std::string& bk, const std::string& exs,
              const std::string& bias) {
  Task t;
  t.name = std::move(task_name);
  t.background = parse_program(bk);
  t.examples = parse_examples(exs);
  t.bias = parse_bias(bias);
  return t;
}

}  // namespace

Task make_kinship_task(std::uint64_t seed) {
  Rng rng(seed);
  const Family f = make_family(rng, 8, 3);
  std::string bk;
  for (const auto& [p, c] : f.father) bk += atom2("father", p, c) + ".\n";
  for (const auto& [p, c] : f.mother) bk += atom2("mother", p, c) + ".\n";
  bk += "parent(X,Y) :- father(X,Y).\nparent(X,Y) :- mother(X,Y).\n";
  std::string exs;
  for (const auto& [a, b] : f.grandparent) exs += "pos(" + atom2("gp", a, b) + ").\n";
  for (const auto& [a, b] : family_negatives(rng, f, f.grandparent.size()))
    exs += "neg(" + atom2("gp", a, b) + ").\n";
  const std::string bias =
      "target = \"gp/2\"\nbody = [\"father/2\", \"mother/2\", \"parent/2\"]\n"
      "max_clauses = 2\nmax_body = 2\nmax_vars = 3\nallow_recursion = false\n";
  return assemble("kinship", bk, exs, bias);
}

Task make_noisy_family_task(std::uint64_t seed, double noise) {
  Rng rng(seed);
  const Family f = make_family(rng, 8, 3);
  std::string bk;
  for (int p = 0; p < f.people; ++p) bk += "person(" + name('p', p) + ").\n";
  std::vector<Pair> parent = f.father;
  parent.insert(parent.end(), f.mother.begin(), f.mother.end());
  std::sort(parent.begin(), parent.end());
  for (const auto& [p, c] : parent) bk += atom2("parent", p, c) + ".\n";

  std::vector<Pair> neg = family_negatives(rng, f, f.grandparent.size());
  const auto flipped = static_cast<std::size_t>(noise * static_cast<double>(neg.size()) + 0.5);
  std::string exs;
  for (const auto& [a, b] : f.grandparent) exs += "pos(" + atom2("gp", a, b) + ").\n";
  for (std::size_t i = 0; i < flipped; ++i)
    exs += "pos(" + atom2("gp", neg[i].first, neg[i].second) + ").\n";
  for (std::size_t i = flipped; i < neg.size(); ++i)
    exs += "neg(" + atom2("gp", neg[i].first, neg[i].second) + ").\n";
  const std::string bias =
      "target = \"gp/2\"\nbody = [\"parent/2\", \"person/1\"]\n"
      "max_clauses = 2\nmax_body = 3\nmax_vars = 3\nallow_recursion = false\n";
  char task_name[32];
  std::snprintf(task_name, sizeof task_name, "noisy_family_%02d", static_cast<int>(seed % 100));
  return assemble(task_name, bk, exs, bias);
}

Task make_path_task(std::uint64_t seed) {
  Rng rng(seed);
  constexpr int kNodes = 24;
  std::set<Pair> edges;
  while (edges.size() < 30) {
    const int a = static_cast<int>(rng.below(kNodes));
    const int b = static_cast<int>(rng.below(kNodes));
    if (a < b) edges.insert({a, b});
  }
  std::vector<std::vector<bool>> reach(kNodes, std::vector<bool>(kNodes, false));
  for (const auto& [a, b] : edges) reach[a][b] = true;
  for (int k = 0; k < kNodes; ++k)
    for (int i = 0; i < kNodes; ++i)
      for (int j = 0; j < kNodes; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;

  std::vector<Pair> pos, neg;
  for (int i = 0; i < kNodes; ++i)
    for (int j = 0; j < kNodes; ++j) {
      if (i == j) continue;
      (reach[i][j] ? pos : neg).push_back({i, j});
    }
  rng.shuffle(pos);
  rng.shuffle(neg);
  pos.resize(std::min<std::size_t>(pos.size(), 60));
  neg.resize(std::min<std::size_t>(neg.size(), pos.size()));

  std::string bk;
  for (const auto& [a, b] : edges) bk += atom2("edge", a, b, 'n') + ".\n";
  std::string exs;
  for (const auto& [a, b] : pos) exs += "pos(" + atom2("path", a, b, 'n') + ").\n";
  for (const auto& [a, b] : neg) exs += "neg(" + atom2("path", a, b, 'n') + ").\n";
  const std::string bias =
      "target = \"path/2\"\nbody = [\"edge/2\", \"path/2\"]\n"
      "max_clauses = 2\nmax_body = 2\nmax_vars = 3\nallow_recursion = true\n";
  return assemble("path", bk, exs, bias);
}

std::vector<Task> bundled_tasks() {
  std::vector<Task> out;
  out.push_back(make_kinship_task(7));
  out.push_back(make_path_task(11));
  for (int i = 0; i < kNoisyInstances; ++i) out.push_back(make_noisy_family_task(100 + i));
  return out;
}

void write_bundled_tasks(const std::filesystem::path& root) {
  for (const auto& t : bundled_tasks()) write_task(root / t.name, t);
}

}  // namespace snapilp
