#include "snapilp/parse.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "snapilp/error.hpp"

namespace snapilp {
namespace {

enum class Tok { Name, Variable, LParen, RParen, Comma, Dot, Neck, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  Token expect(Tok kind, const char* what) {
    if (current_.kind != kind) fail(current_, std::string("expected ") + what);
    return take();
  }

  [[noreturn]] static void fail(const Token& at, const std::string& message) {
    throw ParseError(at.line, at.column, message);
  }

 private:
  void advance() {
    skip_space();
    current_ = Token{};
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) {
      current_.kind = Tok::End;
      return;
    }
    const char c = text_[pos_];
    auto single = [&](Tok k) {
      current_.kind = k;
      current_.text = std::string(1, c);
      bump();
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      case '.': return single(Tok::Dot);
      case ':':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
          current_.kind = Tok::Neck;
          current_.text = ":-";
          bump();
          bump();
          return;
        }
        break;
      default:
        break;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      const bool digit = std::isdigit(static_cast<unsigned char>(c));
      std::size_t end = pos_;
      while (end < text_.size()) {
        const auto ch = static_cast<unsigned char>(text_[end]);
        if (digit ? !std::isdigit(ch) : !(std::isalnum(ch) || ch == '_')) break;
        ++end;
      }
      current_.text = std::string(text_.substr(pos_, end - pos_));
      current_.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Variable
                                                                                 : Tok::Name;
      while (pos_ < end) bump();
      return;
    }
    fail(current_, std::string("unexpected character '") + c + "'");
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  Token current_;
};

struct ParsedClause {
  Clause clause;
  Token start;
};

// Shared clause grammar plus per-input arity bookkeeping.
class ClauseParser {
 public:
  explicit ClauseParser(std::string_view text) : lex_(text) {}

  bool at_end() const { return lex_.peek().kind == Tok::End; }

  ParsedClause clause() {
    vars_.clear();
    var_count_ = 0;
    ParsedClause out;
    out.start = lex_.peek();
    out.clause.head = atom();
    if (lex_.peek().kind == Tok::Neck) {
      lex_.take();
      out.clause.body.push_back(atom());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        out.clause.body.push_back(atom());
      }
    }
    lex_.expect(Tok::Dot, "'.' at end of clause");
    return out;
  }

  // name(args) where args are constants or variables (clause-local numbering).
  Atom atom() {
    const Token name = lex_.peek();
    if (name.kind != Tok::Name || std::isdigit(static_cast<unsigned char>(name.text[0])))
      Lexer::fail(name, "expected a predicate name");
    lex_.take();
    Atom a{intern(name.text), {}};
    if (lex_.peek().kind == Tok::LParen) {
      lex_.take();
      a.args.push_back(term());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        a.args.push_back(term());
      }
      lex_.expect(Tok::RParen, "')'");
    }
    check_arity(a, name);
    return a;
  }

  // The wrapper form used by example files: wrapper(atom).
  std::pair<Token, Atom> wrapped_atom() {
    vars_.clear();
    var_count_ = 0;
    const Token wrapper = lex_.expect(Tok::Name, "'pos' or 'neg'");
    lex_.expect(Tok::LParen, "'('");
    const Token at = lex_.peek();
    Atom a = atom();
    lex_.expect(Tok::RParen, "')'");
    lex_.expect(Tok::Dot, "'.' at end of example");
    if (!a.is_ground()) Lexer::fail(at, "non-ground example " + to_string(a));
    return {wrapper, std::move(a)};
  }

  Lexer& lexer() { return lex_; }

 private:
  Term term() {
    const Token t = lex_.take();
    if (lex_.peek().kind == Tok::LParen)
      Lexer::fail(lex_.peek(), "function symbols are not supported");
    switch (t.kind) {
      case Tok::Name:
        return Term::constant(intern(t.text));
      case Tok::Variable: {
        if (t.text == "_") return Term::variable(var_count_++);
        auto [it, inserted] = vars_.try_emplace(t.text, var_count_);
        if (inserted) ++var_count_;
        return Term::variable(it->second);
      }
      default:
        Lexer::fail(t, "expected a term");
    }
  }

  void check_arity(const Atom& a, const Token& at) {
    auto [it, inserted] = arity_.try_emplace(a.predicate, a.arity());
    if (!inserted && it->second != a.arity())
      Lexer::fail(at, "arity clash for " + symbol_name(a.predicate) + ": used with " +
                          std::to_string(it->second) + " and " + std::to_string(a.arity()) +
                          " arguments");
  }

  Lexer lex_;
  std::unordered_map<std::string, std::uint32_t> vars_;
  std::uint32_t var_count_ = 0;
  std::unordered_map<Symbol, std::uint32_t> arity_;
};

// Renumbers variables densely by first occurrence so indices are 0..n-1.
Clause compact_variables(const Clause& c) {
  std::unordered_map<std::uint32_t, std::uint32_t> map;
  auto fix = [&map](Atom a) {
    for (auto& t : a.args) {
      if (!t.is_variable()) continue;
      auto [it, inserted] = map.try_emplace(t.id, static_cast<std::uint32_t>(map.size()));
      t.id = it->second;
    }
    return a;
  };
  Clause out;
  out.head = fix(c.head);
  for (const auto& b : c.body) out.body.push_back(fix(b));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Program parse_program(std::string_view text) {
  ClauseParser p(text);
  Program prog;
  std::unordered_set<Atom, AtomHash> seen;
  while (!p.at_end()) {
    auto [clause, start] = p.clause();
    clause = compact_variables(clause);
    if (clause.body.empty()) {
      if (!clause.head.is_ground())
        Lexer::fail(start, "non-ground fact " + to_string(clause.head));
      if (seen.insert(clause.head).second) prog.facts.push_back(std::move(clause.head));
      continue;
    }
    if (!clause.is_range_restricted())
      Lexer::fail(start, "rule is not range-restricted: " + to_string(clause));
    prog.rules.push_back(std::move(clause));
  }
  return prog;
}

Hypothesis parse_hypothesis(std::string_view text) {
  ClauseParser p(text);
  std::vector<Clause> clauses;
  while (!p.at_end()) {
    auto [clause, start] = p.clause();
    clause = compact_variables(clause);
    if (!clause.is_range_restricted())
      Lexer::fail(start, "clause is not range-restricted: " + to_string(clause));
    clauses.push_back(std::move(clause));
  }
  return Hypothesis(std::move(clauses));
}

Atom parse_ground_atom(std::string_view text) {
  ClauseParser p(text);
  const Token at = p.lexer().peek();
  Atom a = p.atom();
  if (!p.at_end()) Lexer::fail(p.lexer().peek(), "trailing input after atom");
  if (!a.is_ground()) Lexer::fail(at, "atom is not ground: " + to_string(a));
  return a;
}

ExampleSet parse_examples(std::string_view text) {
  ClauseParser p(text);
  ExampleSet out;
  bool have_target = false;
  std::unordered_set<Atom, AtomHash> pos, neg;
  while (!p.at_end()) {
    auto [wrapper, atom] = p.wrapped_atom();
    const bool positive = wrapper.text == "pos";
    if (!positive && wrapper.text != "neg")
      Lexer::fail(wrapper, "expected 'pos' or 'neg', got '" + wrapper.text + "'");
    if (!have_target) {
      out.target = atom.signature();
      have_target = true;
    } else if (!(atom.signature() == out.target)) {
      Lexer::fail(wrapper, "mixed target predicates: " + to_string(out.target) + " and " +
                               to_string(atom.signature()));
    }
    auto& same = positive ? pos : neg;
    auto& other = positive ? neg : pos;
    if (other.count(atom))
      Lexer::fail(wrapper, "contradictory example " + to_string(atom) +
                               " is labelled both positive and negative");
    if (same.insert(atom).second) (positive ? out.pos : out.neg).push_back(std::move(atom));
  }
  return out;
}

Bias parse_bias(std::string_view text) {
  Bias b;
  bool have_target = false, have_body = false;
  std::size_t line_no = 0;
  std::size_t start = 0;

  auto parse_sig = [](const std::string& s, std::size_t line, std::size_t col) {
    const auto slash = s.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == s.size())
      throw ParseError(line, col, "expected name/arity, got '" + s + "'");
    PredicateSig sig;
    sig.name = intern(s.substr(0, slash));
    try {
      std::size_t used = 0;
      sig.arity = static_cast<std::uint32_t>(std::stoul(s.substr(slash + 1), &used));
      if (used != s.size() - slash - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ParseError(line, col, "bad arity in '" + s + "'");
    }
    return sig;
  };
  auto unquote = [](const std::string& v, std::size_t line, std::size_t col) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
      throw ParseError(line, col, "expected a quoted string, got '" + v + "'");
    return v.substr(1, v.size() - 2);
  };
  auto parse_uint = [](const std::string& v, std::size_t line, std::size_t col) {
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw ParseError(line, col, "expected a non-negative integer, got '" + v + "'");
    return static_cast<std::uint32_t>(std::stoul(v));
  };

  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, 1, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::size_t vcol = raw.find('=') + 2;

    if (key == "target") {
      b.target = parse_sig(unquote(value, line_no, vcol), line_no, vcol);
      have_target = true;
    } else if (key == "body") {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']')
        throw ParseError(line_no, vcol, "expected a list [\"p/n\", ...]");
      b.body_preds.clear();
      std::string inner = value.substr(1, value.size() - 2);
      std::stringstream ss(inner);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto sig = parse_sig(unquote(item, line_no, vcol), line_no, vcol);
        if (std::find(b.body_preds.begin(), b.body_preds.end(), sig) == b.body_preds.end())
          b.body_preds.push_back(sig);
      }
      have_body = true;
    } else if (key == "max_clauses") {
      b.max_clauses = parse_uint(value, line_no, vcol);
    } else if (key == "max_body") {
      b.max_body = parse_uint(value, line_no, vcol);
    } else if (key == "max_vars") {
      b.max_vars = parse_uint(value, line_no, vcol);
    } else if (key == "allow_recursion") {
      if (value != "true" && value != "false")
        throw ParseError(line_no, vcol, "expected true or false");
      b.allow_recursion = value == "true";
    } else {
      throw ParseError(line_no, 1, "unknown bias key '" + key + "'");
    }
  }
  if (!have_target) throw ParseError(line_no, 1, "bias: missing 'target'");
  if (!have_body) throw ParseError(line_no, 1, "bias: missing 'body'");
  return b;
}

std::string to_string(const Bias& b) {
  std::string out = "target = \"" + to_string(b.target) + "\"\nbody = [";
  for (std::size_t i = 0; i < b.body_preds.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + to_string(b.body_preds[i]) + "\"";
  }
  out += "]\nmax_clauses = " + std::to_string(b.max_clauses) +
         "\nmax_body = " + std::to_string(b.max_body) +
         "\nmax_vars = " + std::to_string(b.max_vars) +
         "\nallow_recursion = " + (b.allow_recursion ? "true" : "false") + "\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Task load_task(const std::filesystem::path& dir) {
  Task task;
  task.name = dir.filename().string();
  if (task.name.empty()) task.name = dir.parent_path().filename().string();
  auto guarded = [&](const char* file, auto&& fn) {
    try {
      fn(read_file(dir / file));
    } catch (const ParseError& e) {
      throw DataError(std::string(file) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(std::string(file) + ": " + e.what());
    }
  };
  guarded("bk.pl", [&](const std::string& t) { task.background = parse_program(t); });
  guarded("exs.pl", [&](const std::string& t) { task.examples = parse_examples(t); });
  guarded("bias.toml", [&](const std::string& t) {
    task.bias = parse_bias(t);
    task.bias.validate();
  });

  if (task.examples.size() == 0) throw DataError("exs.pl: no examples");
  if (!(task.examples.target == task.bias.target))
    throw DataError("exs.pl: example target " + to_string(task.examples.target) +
                    " does not match bias target " + to_string(task.bias.target));
  for (const auto& p : task.background.predicates()) {
    for (const auto& q : task.bias.body_preds) {
      if (p.name == q.name && p.arity != q.arity)
        throw DataError("bias.toml: arity clash for " + symbol_name(p.name));
    }
    if (p.name == task.bias.target.name && p.arity != task.bias.target.arity)
      throw DataError("bk.pl: arity clash for target " + symbol_name(p.name));
  }
  return task;
}

void write_task(const std::filesystem::path& dir, const Task& task) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* file, const std::string& body) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / file).string());
    out << body;
  };
  write("bk.pl", to_string(task.background));
  std::string exs;
  for (const auto& a : task.examples.pos) exs += "pos(" + to_string(a) + ").\n";
  for (const auto& a : task.examples.neg) exs += "neg(" + to_string(a) + ").\n";
  write("exs.pl", exs);
  write("bias.toml", to_string(task.bias));
}

}  // namespace snapilp
