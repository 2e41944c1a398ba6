#include <bit>

#include "snapilp/kernels.hpp"

namespace snapilp::kernels {
namespace {

void or_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) dst[i] |= src[i];
}

std::uint64_t popcount_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < words; ++i) n += std::popcount(a[i] & b[i]);
  return n;
}

CoverageCounts union_coverage(const std::uint64_t* const* masks, std::size_t n_masks,
                              const std::uint64_t* positive, const std::uint64_t* valid,
                              std::size_t words) {
  CoverageCounts out;
  for (std::size_t i = 0; i < words; ++i) {
    std::uint64_t u = 0;
    for (std::size_t m = 0; m < n_masks; ++m) u |= masks[m][i];
    out.covered_pos += std::popcount(u & positive[i]);
    out.covered_neg += std::popcount(u & valid[i] & ~positive[i]);
  }
  return out;
}

void weighted_vote(const double* weights, const std::uint64_t* const* members,
                   std::size_t n_members, std::size_t n_bits, double* scores) {
  for (std::size_t m = 0; m < n_members; ++m) {
    const double w = weights[m];
    const std::uint64_t* bits = members[m];
    for (std::size_t x = 0; x < n_bits; ++x) {
      scores[x] += ((bits[x >> 6] >> (x & 63)) & 1U) ? w : 0.0;
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &or_into, &popcount_and, &union_coverage,
                                 &weighted_vote};
  return table;
}

}  // namespace snapilp::kernels
