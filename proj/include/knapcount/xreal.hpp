#pragma once

#include "knapcount/bigint.hpp"

#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace knapcount {

using u128 = unsigned __int128;

BigInt u128_to_big(u128 v);
u128 big_to_u128(const BigInt& v);  // low 128 bits

namespace detail {

inline int bitlen128(u128 x) {
  const auto hi = static_cast<std::uint64_t>(x >> 64);
  const auto lo = static_cast<std::uint64_t>(x);
  if (hi) return 128 - std::countl_zero(hi);
  return lo ? 64 - std::countl_zero(lo) : 0;
}

// 256-bit unsigned scratch value for exact intermediate results.
struct Wide {
  u128 hi = 0;
  u128 lo = 0;
};

inline int bitlen(const Wide& w) { return w.hi ? 128 + bitlen128(w.hi) : bitlen128(w.lo); }

inline Wide shl(const Wide& w, int s) {
  if (s == 0) return w;
  if (s >= 128) return {w.lo << (s - 128), 0};
  return {(w.hi << s) | (w.lo >> (128 - s)), w.lo << s};
}

inline Wide add(const Wide& a, const Wide& b) {
  Wide r{a.hi + b.hi, a.lo + b.lo};
  if (r.lo < a.lo) ++r.hi;
  return r;
}

inline Wide sub(const Wide& a, const Wide& b) {
  Wide r{a.hi - b.hi, a.lo - b.lo};
  if (a.lo < b.lo) --r.hi;
  return r;
}

inline Wide mul(u128 a, u128 b) {
  const u128 m = ~std::uint64_t{0};
  const u128 a0 = a & m, a1 = a >> 64, b0 = b & m, b1 = b >> 64;
  const u128 p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
  const u128 mid = (p00 >> 64) + (p01 & m) + (p10 & m);
  Wide r;
  r.lo = (p00 & m) | (mid << 64);
  r.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  return r;
}

// Bits [s, s+128) of w, plus round bit (s-1) and sticky (any below s-1).
inline u128 extract(const Wide& w, int s, bool& round, bool& sticky) {
  auto bit = [&](int i) -> bool {
    return i >= 128 ? ((w.hi >> (i - 128)) & 1) : ((w.lo >> i) & 1);
  };
  round = bit(s - 1);
  sticky = false;
  const int below = s - 1;
  if (below > 0) {
    if (below >= 128) {
      sticky = w.lo != 0 || (below > 128 && (w.hi & ((u128{1} << (below - 128)) - 1)) != 0);
    } else {
      sticky = (w.lo & ((u128{1} << below) - 1)) != 0;
    }
  }
  if (s >= 128) return w.hi >> (s - 128);
  return (w.lo >> s) | (w.hi << (128 - s));
}

}  // namespace detail

// Nonnegative binary float with a P-bit mantissa in [1,2) and a 64-bit
// exponent. Every operation rounds to nearest, ties to even.
template <int P>
class BasicXReal {
  static_assert(P >= 8 && P <= 120);

 public:
  static constexpr int kPrecision = P;

  constexpr BasicXReal() = default;

  static BasicXReal from_u64(std::uint64_t v) { return pack({0, v}, 0); }

  static BasicXReal from_integer(const BigInt& v) {
    if (sgn(v) < 0) throw std::domain_error("XReal: negative integer");
    const std::size_t bits = bit_length(v);
    if (bits <= 126) return pack({0, big_to_u128(v)}, 0);
    const std::size_t shift = bits - 126;
    BigInt top = v >> shift;
    u128 t = big_to_u128(top);
    if (mpz_scan1(v.get_mpz_t(), 0) < shift) t |= 1;  // sticky
    return pack({0, t}, static_cast<std::int64_t>(shift));
  }

  static BasicXReal from_double(double x) {
    if (!(x >= 0) || std::isinf(x)) throw std::domain_error("XReal: invalid double");
    if (x == 0) return {};
    int e = 0;
    const double m = std::frexp(x, &e);
    const auto im = static_cast<std::uint64_t>(std::ldexp(m, 53));
    return pack({0, im}, static_cast<std::int64_t>(e) - 53);
  }

  static BasicXReal pow2(std::int64_t e) {
    BasicXReal r;
    r.mant_ = u128{1} << (P - 1);
    r.exp_ = e;
    return r;
  }

  // Value mant * 2^e0, rounded.
  static BasicXReal from_scaled(u128 mant, std::int64_t e0) { return pack({0, mant}, e0); }

  bool is_zero() const { return mant_ == 0; }
  // Integer mantissa in [2^{P-1}, 2^P), or 0.
  u128 mantissa() const { return mant_; }
  // Value = mantissa * 2^{exponent - P + 1}.
  std::int64_t exponent() const { return exp_; }
  // Mantissa as a double in [1,2), or 0.
  double mantissa_double() const {
    if (mant_ == 0) return 0.0;
    if constexpr (P > 53) return std::ldexp(static_cast<double>(mant_ >> (P - 53)), -52);
    else return std::ldexp(static_cast<double>(mant_), -(P - 1));
  }

  friend BasicXReal operator+(const BasicXReal& a, const BasicXReal& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const BasicXReal& big = a.exp_ >= b.exp_ ? a : b;
    const BasicXReal& small = a.exp_ >= b.exp_ ? b : a;
    const std::int64_t d = big.exp_ - small.exp_;
    if (d > P + 2) return big;
    const detail::Wide v = detail::add(detail::shl({0, big.mant_}, static_cast<int>(d)), {0, small.mant_});
    return pack(v, small.exp_ - P + 1);
  }
  BasicXReal& operator+=(const BasicXReal& o) { return *this = *this + o; }

  friend BasicXReal operator*(const BasicXReal& a, const BasicXReal& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return pack(detail::mul(a.mant_, b.mant_), a.exp_ + b.exp_ - 2 * (P - 1));
  }
  BasicXReal& operator*=(const BasicXReal& o) { return *this = *this * o; }

  friend BasicXReal operator/(const BasicXReal& a, const BasicXReal& b) {
    if (b.is_zero()) throw std::domain_error("XReal: division by zero");
    if (a.is_zero()) return {};
    BigInt num = u128_to_big(a.mant_) << (P + 1);
    const BigInt den = u128_to_big(b.mant_);
    BigInt q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    u128 v = big_to_u128(q) << 1;
    if (sgn(r) != 0) v |= 1;
    return pack({0, v}, a.exp_ - b.exp_ - P - 2);
  }

  // a - b for a >= b.
  friend BasicXReal sub_nonneg(const BasicXReal& a, const BasicXReal& b) {
    if (a < b) throw std::domain_error("XReal: negative difference");
    if (b.is_zero()) return a;
    const std::int64_t d = a.exp_ - b.exp_;
    if (d > P + 2) return a;
    const detail::Wide v = detail::sub(detail::shl({0, a.mant_}, static_cast<int>(d)), {0, b.mant_});
    return pack(v, b.exp_ - P + 1);
  }

  friend std::strong_ordering operator<=>(const BasicXReal& a, const BasicXReal& b) {
    if (a.is_zero() || b.is_zero()) return (a.mant_ != 0) <=> (b.mant_ != 0);
    if (a.exp_ != b.exp_) return a.exp_ <=> b.exp_;
    return a.mant_ <=> b.mant_;
  }
  friend bool operator==(const BasicXReal& a, const BasicXReal& b) {
    return a.mant_ == b.mant_ && (a.mant_ == 0 || a.exp_ == b.exp_);
  }

  // this * 2^k, exact.
  BasicXReal ldexp(std::int64_t k) const {
    BasicXReal r = *this;
    if (!r.is_zero()) r.exp_ += k;
    return r;
  }

  // Rounded to q significant bits (q <= P).
  BasicXReal round_to_bits(int q) const {
    if (is_zero() || q >= P) return *this;
    return round_low(P - q);
  }

  double log2() const {
    if (is_zero()) return -INFINITY;
    return static_cast<double>(exp_) + std::log2(mantissa_double());
  }

  long double to_long_double() const {
    if (is_zero()) return 0.0L;
    const auto top = static_cast<long double>(static_cast<std::uint64_t>(mant_ >> (P > 64 ? P - 64 : 0)));
    return std::ldexp(top, static_cast<int>(std::max<std::int64_t>(std::min<std::int64_t>(exp_ - (P > 64 ? 63 : P - 1), 1 << 20), -(1 << 20))));
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  BigInt floor_integer() const {
    if (is_zero()) return 0;
    BigInt m = u128_to_big(mant_);
    const std::int64_t s = exp_ - (P - 1);
    if (s >= 0) return m << static_cast<mp_bitcnt_t>(s);
    if (-s >= P) return 0;
    return m >> static_cast<mp_bitcnt_t>(-s);
  }

  bool is_integer() const {
    if (is_zero()) return true;
    const std::int64_t s = exp_ - (P - 1);
    if (s >= 0) return true;
    if (-s >= P) return false;
    return (mant_ & ((u128{1} << (-s)) - 1)) == 0;
  }

  // C99 hexadecimal float: exact, round-trips through from_hex.
  std::string to_hex() const;
  static BasicXReal from_hex(std::string_view s);
  // Human decimal: exact integer when integral and short, otherwise
  // scientific notation with the given number of significant digits.
  std::string to_decimal(int digits = 20) const;

 private:
  static BasicXReal pack(const detail::Wide& v, std::int64_t e0) {
    BasicXReal r;
    const int bl = detail::bitlen(v);
    if (bl == 0) return r;
    int shift = bl - P;
    if (shift <= 0) {
      r.mant_ = v.lo << (-shift);
    } else {
      bool round = false, sticky = false;
      u128 m = detail::extract(v, shift, round, sticky) & ((u128{1} << P) - 1);
      if (round && (sticky || (m & 1))) {
        ++m;
        if (m >> P) {
          m >>= 1;
          ++shift;
        }
      }
      r.mant_ = m;
    }
    r.exp_ = e0 + shift + P - 1;
    return r;
  }

  // Clears the low k bits with round-to-nearest-even.
  BasicXReal round_low(int k) const {
    const u128 mask = (u128{1} << k) - 1;
    const u128 low = mant_ & mask;
    const u128 half = u128{1} << (k - 1);
    u128 m = mant_ & ~mask;
    BasicXReal r = *this;
    if (low > half || (low == half && ((m >> k) & 1))) {
      m += u128{1} << k;
      if (m >> P) {
        m >>= 1;
        ++r.exp_;
      }
    }
    r.mant_ = m;
    return r;
  }

  u128 mant_ = 0;
  std::int64_t exp_ = 0;
};

using XReal = BasicXReal<96>;

std::string hex_mantissa_string(u128 frac_bits, int bits);

template <int P>
std::string BasicXReal<P>::to_hex() const {
  if (is_zero()) return "0x0p+0";
  const u128 frac = mant_ - (u128{1} << (P - 1));
  std::string out = "0x1";
  const std::string digits = hex_mantissa_string(frac, P - 1);
  if (!digits.empty()) out += "." + digits;
  out += exp_ >= 0 ? "p+" : "p";
  out += std::to_string(exp_);
  return out;
}

template <int P>
BasicXReal<P> BasicXReal<P>::from_hex(std::string_view s) {
  auto fail = [] { return std::invalid_argument("XReal: malformed hex float"); };
  if (s.substr(0, 2) != "0x") throw fail();
  s.remove_prefix(2);
  const auto ppos = s.find('p');
  if (ppos == std::string_view::npos) throw fail();
  const std::string_view body = s.substr(0, ppos);
  const std::int64_t e = std::stoll(std::string(s.substr(ppos + 1)));
  BigInt m = 0;
  std::int64_t frac_digits = 0;
  bool seen_dot = false;
  for (char c : body) {
    if (c == '.') {
      if (seen_dot) throw fail();
      seen_dot = true;
      continue;
    }
    int d = 0;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw fail();
    m = m * 16 + d;
    if (seen_dot) ++frac_digits;
  }
  BasicXReal r = from_integer(m);
  return r.ldexp(e - 4 * frac_digits);
}

std::string decimal_string(const BigInt& mant, std::int64_t exp2, int digits);

template <int P>
std::string BasicXReal<P>::to_decimal(int digits) const {
  if (is_zero()) return "0";
  if (is_integer() && exp_ < 64) return floor_integer().get_str();
  return decimal_string(u128_to_big(mant_), exp_ - (P - 1), digits);
}

}  // namespace knapcount
