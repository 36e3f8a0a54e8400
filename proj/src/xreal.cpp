#include "knapcount/xreal.hpp"

#include <algorithm>

namespace knapcount {

BigInt u128_to_big(u128 v) {
  const std::uint64_t words[2] = {static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(v >> 64)};
  BigInt r;
  mpz_import(r.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, words);
  return r;
}

u128 big_to_u128(const BigInt& v) {
  const mpz_srcptr z = v.get_mpz_t();
  const std::size_t limbs = mpz_size(z);
  static_assert(sizeof(mp_limb_t) == 8);
  u128 r = 0;
  if (limbs > 0) r = mpz_getlimbn(z, 0);
  if (limbs > 1) r |= static_cast<u128>(mpz_getlimbn(z, 1)) << 64;
  return r;
}

std::string hex_mantissa_string(u128 frac, int bits) {
  const int digits = (bits + 3) / 4;
  const u128 val = frac << (4 * digits - bits);
  std::string out;
  for (int i = digits - 1; i >= 0; --i) {
    out += "0123456789abcdef"[static_cast<int>((val >> (4 * i)) & 0xf)];
  }
  while (!out.empty() && out.back() == '0') out.pop_back();
  return out;
}

std::string decimal_string(const BigInt& mant, std::int64_t exp2, int digits) {
  mpf_class x(0, static_cast<mp_bitcnt_t>(bit_length(mant) + 4 * digits + 64));
  x = mant;
  if (exp2 >= 0) {
    mpf_mul_2exp(x.get_mpf_t(), x.get_mpf_t(), static_cast<mp_bitcnt_t>(exp2));
  } else {
    mpf_div_2exp(x.get_mpf_t(), x.get_mpf_t(), static_cast<mp_bitcnt_t>(-exp2));
  }
  mp_exp_t e10 = 0;
  std::string d = x.get_str(e10, 10, static_cast<std::size_t>(digits));
  std::string out(1, d[0]);
  std::string rest = d.substr(1);
  while (!rest.empty() && rest.back() == '0') rest.pop_back();
  if (!rest.empty()) out += "." + rest;
  const long long k = static_cast<long long>(e10) - 1;
  out += k >= 0 ? "e+" : "e-";
  out += std::to_string(k >= 0 ? k : -k);
  return out;
}

}  // namespace knapcount
