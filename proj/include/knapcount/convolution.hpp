#pragma once

#include "knapcount/bigint.hpp"
#include "knapcount/rng.hpp"
#include "knapcount/xreal.hpp"

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace knapcount {

// Exact convolution of nonnegative integer sequences; dispatches by size.
std::vector<BigInt> conv_exact(std::span<const BigInt> a, std::span<const BigInt> b);
std::vector<BigInt> conv_schoolbook(std::span<const BigInt> a, std::span<const BigInt> b);
// Limb-split Kronecker layout transformed over three NTT primes, recombined
// by CRT. Falls back to conv_kronecker beyond the transform size limit.
std::vector<BigInt> conv_ntt(std::span<const BigInt> a, std::span<const BigInt> b);
// Packs both sequences into single integers and multiplies them.
std::vector<BigInt> conv_kronecker(std::span<const BigInt> a, std::span<const BigInt> b);

inline constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();

struct MonotoneArray {
  std::vector<std::int64_t> entries;  // kNegInf or a value in [0, bound]
  std::int64_t bound = 0;

  std::size_t size() const { return entries.size(); }
  // Throws unless finite entries are non-decreasing and within [0, bound].
  void validate() const;
};

struct Segment {
  std::size_t i1 = 0;
  std::size_t i2 = 0;
  std::size_t k = 0;
  auto operator<=>(const Segment&) const = default;
};

struct WitnessResult {
  std::vector<std::int64_t> C;  // kNegInf where no finite pair exists
  std::vector<XReal> w;
};

// Closed index interval [lo, hi].
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  auto operator<=>(const Interval&) const = default;
};

// (max,+)-convolution only.
std::vector<std::int64_t> maxplus_values(const MonotoneArray& a, const MonotoneArray& b);
WitnessResult maxplus_witness_ref(const MonotoneArray& a, const MonotoneArray& b,
                                  std::span<const XReal> u, std::span<const XReal> v);
std::vector<Segment> false_positive_segments(const MonotoneArray& a, const MonotoneArray& b,
                                             std::span<const std::int64_t> c, std::int64_t p);
WitnessResult maxplus_witness_fast(const MonotoneArray& a, const MonotoneArray& b,
                                   std::span<const XReal> u, std::span<const XReal> v, Rng& rng);

// All (I, J) with k in I + J, for sorted disjoint interval lists. Linear in
// the list lengths plus the output.
std::vector<std::pair<std::size_t, std::size_t>> pairs_covering(std::span<const Interval> is,
                                                                std::span<const Interval> js, std::int64_t k);

bool is_prime_u64(std::uint64_t n);
// Random prime in [lo, hi]; the smallest prime above lo if none is found.
std::uint64_t random_prime(std::uint64_t lo, std::uint64_t hi, Rng& rng);

// Output h over {0..|f|+|g|-2} whose prefix sums are within (1 +- delta) of
// those of f * g. Entries of f and g must be zero or at least one.
std::vector<XReal> sum_approx_conv(std::span<const XReal> f, std::span<const XReal> g, double delta, Rng& rng);

std::vector<XReal> prefix_sums(std::span<const XReal> f);

}  // namespace knapcount
