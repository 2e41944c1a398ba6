#include <bit>
#include <cstdlib>
#include <string_view>

#include "snapilp/kernels.hpp"

namespace snapilp::kernels {

#ifdef SNAPILP_HAVE_AVX2
const KernelTable& avx2_table();
#endif

std::size_t BitVector::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

const KernelTable* avx2_kernels() {
#ifdef SNAPILP_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("SNAPILP_KERNELS");
    if (env && std::string_view(env) == "scalar") return &scalar_kernels();
    if (const auto* k = avx2_kernels()) return k;
    return &scalar_kernels();
  }();
  return *chosen;
}

CoverageCounts union_coverage(std::span<const BitVector* const> masks, const BitVector& positive,
                              const BitVector& valid, const KernelTable& k) {
  std::vector<const std::uint64_t*> ptrs;
  ptrs.reserve(masks.size());
  for (const auto* m : masks) ptrs.push_back(m->data());
  return k.union_coverage(ptrs.data(), ptrs.size(), positive.data(), valid.data(),
                          positive.word_count());
}

std::vector<double> weighted_vote(std::span<const double> weights,
                                  std::span<const BitVector* const> members, std::size_t n_bits,
                                  const KernelTable& k) {
  std::vector<double> scores(n_bits, 0.0);
  std::vector<const std::uint64_t*> ptrs;
  ptrs.reserve(members.size());
  for (const auto* m : members) ptrs.push_back(m->data());
  k.weighted_vote(weights.data(), ptrs.data(), ptrs.size(), n_bits, scores.data());
  return scores;
}

}  // namespace snapilp::kernels
