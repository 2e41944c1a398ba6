#include "snapilp/costs.hpp"

#include <stdexcept>

#include "snapilp/error.hpp"

namespace snapilp {

std::string_view to_string(CostFunctionId id) {
  switch (id) {
    case CostFunctionId::Mdl: return "mdl";
    case CostFunctionId::ErrorSize: return "errorsize";
    case CostFunctionId::Lexfnsize: return "lexfnsize";
  }
  return "?";
}

std::optional<CostFunctionId> parse_cost_function(std::string_view name) {
  if (name == "mdl") return CostFunctionId::Mdl;
  if (name == "errorsize") return CostFunctionId::ErrorSize;
  if (name == "lexfnsize") return CostFunctionId::Lexfnsize;
  return std::nullopt;
}

namespace {

std::size_t key_length(CostFunctionId fn) {
  switch (fn) {
    case CostFunctionId::Mdl: return 1;
    case CostFunctionId::ErrorSize: return 2;
    case CostFunctionId::Lexfnsize: return 3;
  }
  return 0;
}

}  // namespace

CostKey::CostKey(CostFunctionId fn, std::initializer_list<std::uint64_t> values) : fn_(fn) {
  if (values.size() != key_length(fn))
    throw std::invalid_argument("cost key for " + std::string(to_string(fn)) + " needs " +
                                std::to_string(key_length(fn)) + " components");
  for (auto v : values) v_[len_++] = v;
}

std::strong_ordering operator<=>(const CostKey& a, const CostKey& b) {
  if (a.fn_ != b.fn_)
    throw std::logic_error("comparing cost keys of " + std::string(to_string(a.fn_)) + " and " +
                           std::string(to_string(b.fn_)));
  for (std::size_t i = 0; i < a.len_; ++i) {
    if (auto c = a.v_[i] <=> b.v_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string CostKey::str() const {
  std::string out(to_string(fn_));
  out += ':';
  for (std::size_t i = 0; i < len_; ++i) {
    if (i) out += ',';
    out += std::to_string(v_[i]);
  }
  return out;
}

CostKey CostKey::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DataError("bad cost key '" + std::string(text) + "'");
  const auto fn = parse_cost_function(text.substr(0, colon));
  if (!fn) throw DataError("unknown cost function in '" + std::string(text) + "'");
  std::array<std::uint64_t, kMaxLen> v{};
  std::size_t n = 0;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string part(rest.substr(0, comma));
    if (part.empty() || n == kMaxLen ||
        part.find_first_not_of("0123456789") != std::string::npos)
      throw DataError("bad cost key '" + std::string(text) + "'");
    v[n++] = std::stoull(part);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (n != key_length(*fn)) throw DataError("bad cost key length in '" + std::string(text) + "'");
  switch (*fn) {
    case CostFunctionId::Mdl: return CostKey(*fn, {v[0]});
    case CostFunctionId::ErrorSize: return CostKey(*fn, {v[0], v[1]});
    case CostFunctionId::Lexfnsize: return CostKey(*fn, {v[0], v[1], v[2]});
  }
  throw DataError("bad cost key");
}

std::uint64_t mdl_score(const ConfusionCounts& c, std::uint64_t size) {
  return c.fp + c.fn + size;
}

CostKey cost_key(CostFunctionId id, const ConfusionCounts& c, std::uint64_t size) {
  switch (id) {
    case CostFunctionId::Mdl: return CostKey(id, {mdl_score(c, size)});
    case CostFunctionId::ErrorSize: return CostKey(id, {c.fp + c.fn, size});
    case CostFunctionId::Lexfnsize: return CostKey(id, {c.fn, c.fp, size});
  }
  throw std::logic_error("unknown cost function");
}

double coverage(const ConfusionCounts& c) {
  if (c.total() == 0) throw DataError("coverage of an empty example set");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

}  // namespace snapilp
