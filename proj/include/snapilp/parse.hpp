#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "snapilp/logic.hpp"

namespace snapilp {

// Facts and rules, one clause per `.`; `%` starts a comment. Throws ParseError on
// syntax errors, arity clashes, non-ground facts and rules that are not
// range-restricted.
Program parse_program(std::string_view text);

// `pos(atom).` / `neg(atom).` records over a single target predicate. Duplicates
// within a polarity collapse; an atom with both labels is an error.
ExampleSet parse_examples(std::string_view text);

// Clauses of a hypothesis (rules only; range restriction enforced).
Hypothesis parse_hypothesis(std::string_view text);

// A single ground atom, e.g. "gp(a,c)".
Atom parse_ground_atom(std::string_view text);

// Flat `key = value` bias file; `#` starts a comment. Keys: target, body,
// max_clauses, max_body, max_vars, allow_recursion.
Bias parse_bias(std::string_view text);
std::string to_string(const Bias& b);

struct Task {
  std::string name;
  Program background;
  ExampleSet examples;
  Bias bias;
};

// Loads `bk.pl`, `exs.pl` and `bias.toml` from `dir` and cross-checks them
// (shared target, consistent arities). Throws DataError naming the file.
Task load_task(const std::filesystem::path& dir);

void write_task(const std::filesystem::path& dir, const Task& task);

std::string read_file(const std::filesystem::path& path);

}  // namespace snapilp
