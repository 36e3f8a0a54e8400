#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>

namespace knapcount {

using BigInt = mpz_class;

inline BigInt big_from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

inline std::uint64_t big_to_u64(const BigInt& v) {
  std::uint64_t r = 0;
  if (sgn(v) != 0) r = mpz_getlimbn(v.get_mpz_t(), 0);
  return r;
}

inline bool fits_i64(const BigInt& v) {
  return mpz_sizeinbase(v.get_mpz_t(), 2) <= 62;
}

inline std::int64_t big_to_i64(const BigInt& v) {
  auto r = static_cast<std::int64_t>(big_to_u64(abs(v)));
  return sgn(v) < 0 ? -r : r;
}

inline BigInt big_from_i64(std::int64_t v) {
  BigInt r = big_from_u64(v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v));
  if (v < 0) r = -r;
  return r;
}

inline std::size_t bit_length(const BigInt& v) {
  return sgn(v) == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

inline BigInt pow2(std::size_t e) {
  BigInt r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), e);
  return r;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline std::string to_string(const BigInt& v) { return v.get_str(); }

}  // namespace knapcount
