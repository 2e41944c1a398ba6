#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace snapilp::kernels {

// Fixed-size bit set over example slots (bit i = slot i). Bits past size() are
// always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t bits) : words_((bits + 63) / 64, 0), bits_(bits) {}

  std::size_t size() const { return bits_; }
  std::size_t word_count() const { return words_.size(); }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  std::size_t count() const;

  std::uint64_t* data() { return words_.data(); }
  const std::uint64_t* data() const { return words_.data(); }
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bits_ = 0;
};

struct CoverageCounts {
  std::uint64_t covered_pos = 0;  // slots in the union that are positive
  std::uint64_t covered_neg = 0;  // slots in the union that are valid and negative

  friend bool operator==(const CoverageCounts&, const CoverageCounts&) = default;
};

// One implementation of every data-parallel kernel. All entries in a table are
// required to produce bit-identical results to the scalar table.
struct KernelTable {
  const char* name;
  // dst |= src
  void (*or_into)(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
  // popcount(a & b)
  std::uint64_t (*popcount_and)(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t words);
  // Coverage of the union of `n_masks` masks against a positive/valid labelling.
  CoverageCounts (*union_coverage)(const std::uint64_t* const* masks, std::size_t n_masks,
                                   const std::uint64_t* positive, const std::uint64_t* valid,
                                   std::size_t words);
  // scores[x] += weights[m] for every member m whose bit x is set, members in
  // order. `scores` must be zeroed by the caller and hold n_bits entries.
  void (*weighted_vote)(const double* weights, const std::uint64_t* const* members,
                        std::size_t n_members, std::size_t n_bits, double* scores);
};

const KernelTable& scalar_kernels();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();
// Chosen once per process: AVX2 when available, unless SNAPILP_KERNELS=scalar.
const KernelTable& active_kernels();

CoverageCounts union_coverage(std::span<const BitVector* const> masks, const BitVector& positive,
                              const BitVector& valid,
                              const KernelTable& k = active_kernels());

// Per-slot weighted vote sums over `n_bits` slots.
std::vector<double> weighted_vote(std::span<const double> weights,
                                  std::span<const BitVector* const> members, std::size_t n_bits,
                                  const KernelTable& k = active_kernels());

}  // namespace snapilp::kernels
