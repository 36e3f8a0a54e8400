#pragma once

#include "knapcount/bigint.hpp"

#include <cstdint>
#include <random>

namespace knapcount {

// Seeded stream with counter-based splitting: split(key) depends only on the
// stream's seed and key, never on how much of the stream has been consumed.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  Rng split(std::uint64_t key) const;
  Rng split(std::uint64_t a, std::uint64_t b) const { return split(a).split(b); }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  // Uniform in [0, 1).
  double uniform();
  // Uniform in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform in [0, n); n > 0.
  BigInt below(const BigInt& n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace knapcount
