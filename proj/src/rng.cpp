#include "knapcount/rng.hpp"

#include <stdexcept>
#include <vector>

namespace knapcount {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t key) const {
  return Rng(splitmix64(seed_ ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

BigInt Rng::below(const BigInt& n) {
  if (sgn(n) <= 0) throw std::invalid_argument("Rng::below: empty range");
  if (n.fits_ulong_p()) return big_from_u64(below(static_cast<std::uint64_t>(n.get_ui())));
  const std::size_t bits = bit_length(n);
  const std::size_t words = (bits + 63) / 64;
  const std::size_t top = bits - 64 * (words - 1);
  std::vector<std::uint64_t> buf(words);
  BigInt r;
  do {
    for (auto& w : buf) w = engine_();
    if (top < 64) buf.back() &= (std::uint64_t{1} << top) - 1;
    mpz_import(r.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buf.data());
  } while (r >= n);
  return r;
}

}  // namespace knapcount
