#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "snapilp/evaluator.hpp"

namespace snapilp {

enum class CostFunctionId : std::uint8_t { Mdl, ErrorSize, Lexfnsize };

// "mdl", "errorsize", "lexfnsize"
std::string_view to_string(CostFunctionId id);
std::optional<CostFunctionId> parse_cost_function(std::string_view name);

// Lexicographically ordered tuple tagged with the cost function that produced
// it. Comparing keys of different functions is a logic error and throws.
class CostKey {
 public:
  static constexpr std::size_t kMaxLen = 3;

  CostKey(CostFunctionId fn, std::initializer_list<std::uint64_t> values);

  CostFunctionId function() const { return fn_; }
  std::size_t length() const { return len_; }
  std::uint64_t operator[](std::size_t i) const { return v_[i]; }

  friend std::strong_ordering operator<=>(const CostKey& a, const CostKey& b);
  friend bool operator==(const CostKey& a, const CostKey& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

  // "mdl:7", "errorsize:2,5", "lexfnsize:0,2,5"
  std::string str() const;
  static CostKey parse(std::string_view text);

 private:
  CostFunctionId fn_;
  std::uint8_t len_ = 0;
  std::array<std::uint64_t, kMaxLen> v_{};
};

// fp + fn + size
std::uint64_t mdl_score(const ConfusionCounts& c, std::uint64_t size);

// MDL -> (fp+fn+size); ErrorSize -> (fp+fn, size); Lexfnsize -> (fn, fp, size)
CostKey cost_key(CostFunctionId id, const ConfusionCounts& c, std::uint64_t size);

// (tp+tn)/(tp+tn+fp+fn); throws DataError when all counts are zero.
double coverage(const ConfusionCounts& c);

}  // namespace snapilp
