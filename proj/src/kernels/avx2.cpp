// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <array>
#include <bit>

#include "snapilp/kernels.hpp"

namespace snapilp::kernels {
namespace {

// Nibble-lookup popcount of four 64-bit lanes, accumulated per lane.
inline __m256i popcount_epi64(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,  //
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  const __m256i cnt =
      _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

inline std::uint64_t horizontal_sum(__m256i v) {
  alignas(32) std::array<std::uint64_t, 4> lanes;
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

inline __m256i load(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

void or_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i),
                        _mm256_or_si256(load(dst + i), load(src + i)));
  }
  for (; i < words; ++i) dst[i] |= src[i];
}

std::uint64_t popcount_and(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    acc = _mm256_add_epi64(acc, popcount_epi64(_mm256_and_si256(load(a + i), load(b + i))));
  }
  std::uint64_t n = horizontal_sum(acc);
  for (; i < words; ++i) n += std::popcount(a[i] & b[i]);
  return n;
}

CoverageCounts union_coverage(const std::uint64_t* const* masks, std::size_t n_masks,
                              const std::uint64_t* positive, const std::uint64_t* valid,
                              std::size_t words) {
  __m256i acc_pos = _mm256_setzero_si256();
  __m256i acc_neg = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    __m256i u = _mm256_setzero_si256();
    for (std::size_t m = 0; m < n_masks; ++m) u = _mm256_or_si256(u, load(masks[m] + i));
    const __m256i pos = load(positive + i);
    acc_pos = _mm256_add_epi64(acc_pos, popcount_epi64(_mm256_and_si256(u, pos)));
    // andnot(pos, x) = ~pos & x
    const __m256i neg = _mm256_andnot_si256(pos, _mm256_and_si256(u, load(valid + i)));
    acc_neg = _mm256_add_epi64(acc_neg, popcount_epi64(neg));
  }
  CoverageCounts out{horizontal_sum(acc_pos), horizontal_sum(acc_neg)};
  for (; i < words; ++i) {
    std::uint64_t u = 0;
    for (std::size_t m = 0; m < n_masks; ++m) u |= masks[m][i];
    out.covered_pos += std::popcount(u & positive[i]);
    out.covered_neg += std::popcount(u & valid[i] & ~positive[i]);
  }
  return out;
}

// Lane masks for every 4-bit pattern: lane j is all-ones iff bit j is set.
struct NibbleMasks {
  __m256d mask[16];
  NibbleMasks() {
    for (int n = 0; n < 16; ++n) {
      mask[n] = _mm256_castsi256_pd(_mm256_setr_epi64x(
          (n & 1) ? -1 : 0, (n & 2) ? -1 : 0, (n & 4) ? -1 : 0, (n & 8) ? -1 : 0));
    }
  }
};

void weighted_vote(const double* weights, const std::uint64_t* const* members,
                   std::size_t n_members, std::size_t n_bits, double* scores) {
  static const NibbleMasks table;
  const std::size_t vec_bits = n_bits & ~std::size_t{3};
  for (std::size_t m = 0; m < n_members; ++m) {
    const __m256d w = _mm256_set1_pd(weights[m]);
    const std::uint64_t* bits = members[m];
    for (std::size_t x = 0; x < vec_bits; x += 4) {
      const unsigned nibble = (bits[x >> 6] >> (x & 63)) & 0xFU;
      const __m256d add = _mm256_and_pd(table.mask[nibble], w);
      _mm256_storeu_pd(scores + x, _mm256_add_pd(_mm256_loadu_pd(scores + x), add));
    }
    for (std::size_t x = vec_bits; x < n_bits; ++x) {
      scores[x] += ((bits[x >> 6] >> (x & 63)) & 1U) ? weights[m] : 0.0;
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", &or_into, &popcount_and, &union_coverage,
                                 &weighted_vote};
  return table;
}

}  // namespace snapilp::kernels
