#include "knapcount/convolution.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace knapcount {

namespace {

// ---------------------------------------------------------------- NTT

constexpr std::array<std::uint32_t, 3> kPrimes = {998244353u, 167772161u, 469762049u};
constexpr std::size_t kMaxNtt = std::size_t{1} << 23;

template <std::uint32_t Mod>
std::uint32_t pow_mod(std::uint64_t b, std::uint64_t e) {
  std::uint64_t r = 1;
  b %= Mod;
  while (e) {
    if (e & 1) r = r * b % Mod;
    b = b * b % Mod;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

template <std::uint32_t Mod>
void ntt(std::vector<std::uint32_t>& a, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::uint32_t> tw(n / 2 + 1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::uint64_t w = pow_mod<Mod>(3, (Mod - 1) / len);
    if (invert) w = pow_mod<Mod>(w, Mod - 2);
    const std::size_t half = len / 2;
    tw[0] = 1;
    for (std::size_t j = 1; j < half; ++j) tw[j] = static_cast<std::uint32_t>(tw[j - 1] * w % Mod);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::uint32_t x = a[i + j];
        const auto y = static_cast<std::uint32_t>(static_cast<std::uint64_t>(a[i + j + half]) * tw[j] % Mod);
        a[i + j] = x + y >= Mod ? x + y - Mod : x + y;
        a[i + j + half] = x >= y ? x - y : x + Mod - y;
      }
    }
  }
  if (invert) {
    const std::uint64_t inv = pow_mod<Mod>(n, Mod - 2);
    for (auto& x : a) x = static_cast<std::uint32_t>(x * inv % Mod);
  }
}

template <std::uint32_t Mod>
std::vector<std::uint32_t> cyclic_product(const std::vector<std::uint32_t>& fa, const std::vector<std::uint32_t>& fb,
                                          std::size_t size) {
  std::vector<std::uint32_t> x(size, 0), y(size, 0);
  for (std::size_t i = 0; i < fa.size(); ++i) x[i] = fa[i] % Mod;
  for (std::size_t i = 0; i < fb.size(); ++i) y[i] = fb[i] % Mod;
  ntt<Mod>(x, false);
  ntt<Mod>(y, false);
  for (std::size_t i = 0; i < size; ++i) x[i] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(x[i]) * y[i] % Mod);
  ntt<Mod>(x, true);
  return x;
}

std::size_t max_bits(std::span<const BigInt> a) {
  std::size_t m = 0;
  for (const auto& x : a) m = std::max(m, bit_length(x));
  return m;
}

// Little-endian limbs of the given width (16 or 32 bits).
std::vector<std::uint32_t> limbs_of(const BigInt& x, int width) {
  std::vector<std::uint32_t> out;
  if (sgn(x) == 0) return out;
  const std::size_t count = (bit_length(x) + width - 1) / width;
  if (width == 32) {
    out.resize(count);
    std::size_t written = 0;
    mpz_export(out.data(), &written, -1, 4, 0, 0, x.get_mpz_t());
    out.resize(written);
  } else {
    std::vector<std::uint16_t> tmp(count);
    std::size_t written = 0;
    mpz_export(tmp.data(), &written, -1, 2, 0, 0, x.get_mpz_t());
    out.assign(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(written));
  }
  return out;
}

u128 crt3(std::uint32_t r1, std::uint32_t r2, std::uint32_t r3) {
  constexpr std::uint64_t m1 = kPrimes[0], m2 = kPrimes[1], m3 = kPrimes[2];
  static const std::uint64_t inv_m1_m2 = pow_mod<kPrimes[1]>(m1, m2 - 2);
  static const std::uint64_t inv_m1m2_m3 = pow_mod<kPrimes[2]>(m1 * m2 % m3, m3 - 2);
  const std::uint64_t x2 = (r2 + m2 - r1 % m2) % m2 * inv_m1_m2 % m2;
  const std::uint64_t partial = (r1 + m1 * x2) % m3;
  const std::uint64_t x3 = (r3 + m3 - partial) % m3 * inv_m1m2_m3 % m3;
  return static_cast<u128>(r1) + static_cast<u128>(m1) * x2 + static_cast<u128>(m1 * m2) * x3;
}

}  // namespace

std::vector<BigInt> conv_schoolbook(std::span<const BigInt> a, std::span<const BigInt> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<BigInt> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      mpz_addmul(c[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return c;
}

std::vector<BigInt> conv_kronecker(std::span<const BigInt> a, std::span<const BigInt> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t ba = max_bits(a), bb = max_bits(b);
  std::vector<BigInt> c(out_len);
  if (ba == 0 || bb == 0) return c;
  const std::size_t slot_bits = ba + bb + bit_length(big_from_u64(std::min(a.size(), b.size()))) + 1;
  const std::size_t lp = (slot_bits + 63) / 64;
  auto pack = [lp](std::span<const BigInt> x) {
    std::vector<std::uint64_t> buf(x.size() * lp, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (sgn(x[i]) != 0) mpz_export(&buf[i * lp], nullptr, -1, 8, 0, 0, x[i].get_mpz_t());
    }
    BigInt r;
    mpz_import(r.get_mpz_t(), buf.size(), -1, 8, 0, 0, buf.data());
    return r;
  };
  const BigInt pa = pack(a), pb = pack(b);
  const BigInt prod = pa * pb;
  std::vector<std::uint64_t> out((a.size() + b.size()) * lp + 1, 0);
  mpz_export(out.data(), nullptr, -1, 8, 0, 0, prod.get_mpz_t());
  for (std::size_t k = 0; k < out_len; ++k) {
    mpz_import(c[k].get_mpz_t(), lp, -1, 8, 0, 0, &out[k * lp]);
  }
  return c;
}

std::vector<BigInt> conv_ntt(std::span<const BigInt> a, std::span<const BigInt> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t ba = max_bits(a), bb = max_bits(b);
  if (ba == 0 || bb == 0) return std::vector<BigInt>(out_len);
  const std::size_t shorter = std::min(a.size(), b.size());
  // Every transformed coefficient is below shorter * K * 2^(2 width); the
  // three-prime modulus holds 86 bits.
  int width = 32;
  std::size_t k = (std::max(ba, bb) + width - 1) / width;
  if (std::log2(static_cast<double>(shorter * k)) + 2.0 * width > 85.0) {
    width = 16;
    k = (std::max(ba, bb) + width - 1) / width;
    if (std::log2(static_cast<double>(shorter * k)) + 2.0 * width > 85.0) return conv_kronecker(a, b);
  }
  const std::size_t stride = 2 * k - 1;
  const std::size_t flat_len = out_len * stride;
  std::size_t size = 1;
  while (size < flat_len) size <<= 1;
  if (size > kMaxNtt) return conv_kronecker(a, b);

  auto flatten = [&](std::span<const BigInt> x) {
    std::vector<std::uint32_t> f(x.size() * stride, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto limbs = limbs_of(x[i], width);
      std::copy(limbs.begin(), limbs.end(), f.begin() + static_cast<std::ptrdiff_t>(i * stride));
    }
    return f;
  };
  const auto fa = flatten(a), fb = flatten(b);
  std::array<std::vector<std::uint32_t>, 3> res;
#pragma omp parallel for schedule(static, 1)
  for (int p = 0; p < 3; ++p) {
    if (p == 0) res[0] = cyclic_product<kPrimes[0]>(fa, fb, size);
    if (p == 1) res[1] = cyclic_product<kPrimes[1]>(fa, fb, size);
    if (p == 2) res[2] = cyclic_product<kPrimes[2]>(fa, fb, size);
  }
  std::vector<BigInt> c(out_len);
  const auto n_out = static_cast<std::int64_t>(out_len);
#pragma omp parallel for schedule(static)
  for (std::int64_t kk = 0; kk < n_out; ++kk) {
    BigInt acc = 0;
    const std::size_t base = static_cast<std::size_t>(kk) * stride;
    for (std::size_t w = stride; w-- > 0;) {
      acc <<= width;
      const u128 v = crt3(res[0][base + w], res[1][base + w], res[2][base + w]);
      if (v != 0) acc += u128_to_big(v);
    }
    c[static_cast<std::size_t>(kk)] = std::move(acc);
  }
  return c;
}

std::vector<BigInt> conv_exact(std::span<const BigInt> a, std::span<const BigInt> b) {
  if (std::min(a.size(), b.size()) <= 32) return conv_schoolbook(a, b);
  return conv_kronecker(a, b);
}

// ---------------------------------------------------------------- primes

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  auto mul = [n](std::uint64_t x, std::uint64_t y) { return static_cast<std::uint64_t>(static_cast<u128>(x) * y % n); };
  auto power = [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  };
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = power(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul(x, x);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t random_prime(std::uint64_t lo, std::uint64_t hi, Rng& rng) {
  lo = std::max<std::uint64_t>(lo, 2);
  hi = std::max(hi, lo);
  const int tries = 64 * (std::bit_width(hi) + 1);
  for (int t = 0; t < tries; ++t) {
    std::uint64_t c = lo + rng.below(hi - lo + 1);
    if (c > 2 && c % 2 == 0) c = c + 1 <= hi ? c + 1 : c - 1;
    if (c >= lo && is_prime_u64(c)) return c;
  }
  for (std::uint64_t c = lo; c <= hi; ++c) {
    if (is_prime_u64(c)) return c;
  }
  std::uint64_t c = lo;
  while (!is_prime_u64(++c)) {
  }
  return c;
}

// ---------------------------------------------------------------- (max,+)

void MonotoneArray::validate() const {
  std::int64_t last = kNegInf;
  for (const auto e : entries) {
    if (e == kNegInf) continue;
    if (e < 0 || e > bound) throw std::invalid_argument("MonotoneArray entry out of range");
    if (e < last) throw std::invalid_argument("MonotoneArray finite entries must be non-decreasing");
    last = e;
  }
}

namespace {

struct Run {
  std::int64_t lo;
  std::int64_t hi;
  std::int64_t value;
};

std::vector<Run> runs_of(std::span<const std::int64_t> e) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto ii = static_cast<std::int64_t>(i);
    if (!runs.empty() && runs.back().value == e[i]) {
      runs.back().hi = ii;
    } else {
      runs.push_back({ii, ii, e[i]});
    }
  }
  return runs;
}

std::int64_t floor_mod(std::int64_t x, std::int64_t p) {
  const std::int64_t r = x % p;
  return r < 0 ? r + p : r;
}

// Calls fn(k, i1, i2, value) for each maximal segment of each finite run pair.
template <class Fn>
void walk_segments(const std::vector<Run>& ra, const std::vector<Run>& rb, Fn&& fn) {
  for (const auto& ia : ra) {
    if (ia.value == kNegInf) continue;
    for (const auto& jb : rb) {
      if (jb.value == kNegInf) continue;
      const std::int64_t v = ia.value + jb.value;
      for (std::int64_t k = ia.lo + jb.lo; k <= ia.hi + jb.hi; ++k) {
        fn(k, std::max(ia.lo, k - jb.hi), std::min(ia.hi, k - jb.lo), v, ia.value, jb.value);
      }
    }
  }
}

struct ScaledInts {
  std::vector<BigInt> ints;
  std::int64_t shift = 0;  // value_i = ints_i * 2^shift
  bool any = false;
};

ScaledInts to_integers(std::span<const XReal> u) {
  ScaledInts s;
  s.ints.resize(u.size());
  std::int64_t lo = 0;
  for (const auto& x : u) {
    if (x.is_zero()) continue;
    const u128 mant = x.mantissa();
    const auto low = static_cast<std::uint64_t>(mant);
    const int tz = low != 0 ? std::countr_zero(low) : 64 + std::countr_zero(static_cast<std::uint64_t>(mant >> 64));
    const std::int64_t ee = x.exponent() - (XReal::kPrecision - 1) + tz;
    lo = s.any ? std::min(lo, ee) : ee;
    s.any = true;
  }
  s.shift = lo;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].is_zero()) continue;
    const std::int64_t e = u[i].exponent() - (XReal::kPrecision - 1);
    BigInt m = u128_to_big(u[i].mantissa());
    const std::int64_t d = e - lo;
    if (d >= 0) {
      s.ints[i] = m << static_cast<mp_bitcnt_t>(d);
    } else {
      s.ints[i] = m >> static_cast<mp_bitcnt_t>(-d);
    }
  }
  return s;
}

}  // namespace

std::vector<std::int64_t> maxplus_values(const MonotoneArray& a, const MonotoneArray& b) {
  if (a.size() == 0 || b.size() == 0) return {};
  const std::size_t len = a.size() + b.size() - 1;
  const auto ra = runs_of(a.entries), rb = runs_of(b.entries);
  struct Cand {
    std::int64_t value, lo, hi;
  };
  std::vector<Cand> cands;
  for (const auto& ia : ra) {
    if (ia.value == kNegInf) continue;
    for (const auto& jb : rb) {
      if (jb.value == kNegInf) continue;
      cands.push_back({ia.value + jb.value, ia.lo + jb.lo, ia.hi + jb.hi});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.value > y.value; });
  std::vector<std::int64_t> c(len, kNegInf);
  std::vector<std::size_t> next(len + 1);
  std::iota(next.begin(), next.end(), 0);
  auto find = [&](std::size_t x) {
    std::size_t r = x;
    while (next[r] != r) r = next[r];
    while (next[x] != r) {
      const std::size_t nx = next[x];
      next[x] = r;
      x = nx;
    }
    return r;
  };
  for (const auto& cd : cands) {
    for (auto x = find(static_cast<std::size_t>(cd.lo)); x <= static_cast<std::size_t>(cd.hi); x = find(x)) {
      c[x] = cd.value;
      next[x] = x + 1;
    }
  }
  return c;
}

WitnessResult maxplus_witness_ref(const MonotoneArray& a, const MonotoneArray& b, std::span<const XReal> u,
                                  std::span<const XReal> v) {
  if (u.size() != a.size() || v.size() != b.size()) throw std::invalid_argument("witness weights must match array lengths");
  WitnessResult out;
  out.C = maxplus_values(a, b);
  out.w.assign(out.C.size(), XReal{});
  const auto ra = runs_of(a.entries), rb = runs_of(b.entries);
  walk_segments(ra, rb, [&](std::int64_t k, std::int64_t i1, std::int64_t i2, std::int64_t value, std::int64_t, std::int64_t) {
    const auto kk = static_cast<std::size_t>(k);
    if (out.C[kk] != value) return;
    for (std::int64_t i = i1; i <= i2; ++i) {
      out.w[kk] += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(k - i)];
    }
  });
  return out;
}

std::vector<Segment> false_positive_segments(const MonotoneArray& a, const MonotoneArray& b,
                                             std::span<const std::int64_t> c, std::int64_t p) {
  if (p <= 1) throw std::invalid_argument("false_positive_segments needs p > 1");
  std::vector<Segment> out;
  const auto ra = runs_of(a.entries), rb = runs_of(b.entries);
  walk_segments(ra, rb, [&](std::int64_t k, std::int64_t i1, std::int64_t i2, std::int64_t value, std::int64_t, std::int64_t) {
    const std::int64_t ck = c[static_cast<std::size_t>(k)];
    if (ck == kNegInf || ck == value || floor_mod(ck - value, p) != 0) return;
    out.push_back({static_cast<std::size_t>(i1), static_cast<std::size_t>(i2), static_cast<std::size_t>(k)});
  });
  std::sort(out.begin(), out.end(), [](const Segment& x, const Segment& y) {
    return std::tie(x.k, x.i1) < std::tie(y.k, y.i1);
  });
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_covering(std::span<const Interval> is,
                                                                std::span<const Interval> js, std::int64_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  // For I = [l1, r1] the admissible J = [l2, r2] satisfy l2 <= k - l1 and
  // r2 >= k - r1; both bounds decrease as I moves right.
  std::int64_t hi = static_cast<std::int64_t>(js.size()) - 1;
  std::size_t lo = js.size();
  for (std::size_t x = 0; x < is.size(); ++x) {
    const Interval& iv = is[x];
    while (hi >= 0 && js[static_cast<std::size_t>(hi)].lo > k - iv.lo) --hi;
    while (lo > 0 && js[lo - 1].hi >= k - iv.hi) --lo;
    for (auto y = static_cast<std::int64_t>(lo); y <= hi; ++y) out.emplace_back(x, static_cast<std::size_t>(y));
  }
  return out;
}

WitnessResult maxplus_witness_fast(const MonotoneArray& a, const MonotoneArray& b, std::span<const XReal> u,
                                   std::span<const XReal> v, Rng& rng) {
  if (u.size() != a.size() || v.size() != b.size()) throw std::invalid_argument("witness weights must match array lengths");
  WitnessResult out;
  out.C = maxplus_values(a, b);
  const std::size_t len = out.C.size();
  out.w.assign(len, XReal{});
  if (len == 0) return out;
  const ScaledInts su = to_integers(u), sv = to_integers(v);
  if (!su.any || !sv.any) return out;

  const std::int64_t m = std::max<std::int64_t>({1, a.bound, b.bound});
  const std::int64_t neg = -10 * m;
  auto substitute = [neg](const MonotoneArray& x) {
    std::vector<std::int64_t> r(x.entries);
    for (auto& e : r) {
      if (e == kNegInf) e = neg;
    }
    return r;
  };
  const auto a2 = substitute(a), b2 = substitute(b);
  const auto root = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  const auto p = static_cast<std::int64_t>(random_prime(root, 2 * root, rng));

  // w' from one exact product of the Kronecker-flattened bivariate forms.
  const auto stride = static_cast<std::size_t>(2 * p);
  std::vector<BigInt> fx(a.size() * stride), gx(b.size() * stride);
  for (std::size_t i = 0; i < a.size(); ++i) fx[i * stride + static_cast<std::size_t>(floor_mod(a2[i], p))] = su.ints[i];
  for (std::size_t j = 0; j < b.size(); ++j) gx[j * stride + static_cast<std::size_t>(floor_mod(b2[j], p))] = sv.ints[j];
  const auto prod = conv_exact(fx, gx);
  std::vector<BigInt> wp(len);
  for (std::size_t k = 0; k < len; ++k) {
    if (out.C[k] == kNegInf) continue;
    const std::size_t idx = k * stride + static_cast<std::size_t>(floor_mod(out.C[k], p));
    if (idx < prod.size()) wp[k] = prod[idx];
    if (idx + static_cast<std::size_t>(p) < prod.size()) wp[k] += prod[idx + static_cast<std::size_t>(p)];
  }

  // Interval partitions with bounded length, grouped by value.
  auto partition = [m](const std::vector<std::int64_t>& e) {
    const auto n = static_cast<std::int64_t>(e.size());
    const std::int64_t chunk = std::max<std::int64_t>(1, (n + m - 1) / m);
    std::map<std::int64_t, std::vector<Interval>> groups;
    for (const auto& r : runs_of(e)) {
      for (std::int64_t lo = r.lo; lo <= r.hi; lo += chunk) groups[r.value].push_back({lo, std::min(r.hi, lo + chunk - 1)});
    }
    return groups;
  };
  const auto ga = partition(a2), gb = partition(b2);

  // Relevant interval pairs, one lookup per distinct (k, A-value, B-value).
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;
  std::map<std::tuple<std::int64_t, std::size_t, std::int64_t, std::size_t>, std::vector<std::int64_t>> relevant;
  const auto ra = runs_of(a2), rb = runs_of(b2);
  walk_segments(ra, rb, [&](std::int64_t k, std::int64_t, std::int64_t, std::int64_t value, std::int64_t va, std::int64_t vb) {
    const std::int64_t ck = out.C[static_cast<std::size_t>(k)];
    if (ck == kNegInf || ck == value || floor_mod(ck - value, p) != 0) return;
    if (!seen.emplace(k, va, vb).second) return;
    const auto& is = ga.at(va);
    const auto& js = gb.at(vb);
    for (const auto& [x, y] : pairs_covering(is, js, k)) relevant[{va, x, vb, y}].push_back(k);
  });
  for (const auto& [key, ks] : relevant) {
    const auto& [va, x, vb, y] = key;
    const Interval iv = ga.at(va)[x], jv = gb.at(vb)[y];
    const std::span<const BigInt> ui(su.ints.data() + iv.lo, static_cast<std::size_t>(iv.hi - iv.lo + 1));
    const std::span<const BigInt> vj(sv.ints.data() + jv.lo, static_cast<std::size_t>(jv.hi - jv.lo + 1));
    const auto hat = conv_exact(ui, vj);
    for (const auto k : ks) wp[static_cast<std::size_t>(k)] -= hat[static_cast<std::size_t>(k - iv.lo - jv.lo)];
  }
  for (std::size_t k = 0; k < len; ++k) {
    if (sgn(wp[k]) < 0) throw std::logic_error("witness correction went negative");
    if (sgn(wp[k]) != 0) out.w[k] = XReal::from_integer(wp[k]).ldexp(su.shift + sv.shift);
  }
  return out;
}

// ---------------------------------------------------------------- sum-approx

std::vector<XReal> prefix_sums(std::span<const XReal> f) {
  std::vector<XReal> out(f.size());
  XReal acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    acc += f[i];
    out[i] = acc;
  }
  return out;
}

std::vector<XReal> sum_approx_conv(std::span<const XReal> f, std::span<const XReal> g, double delta, Rng& rng) {
  if (!(delta > 0 && delta < 0.25)) throw std::invalid_argument("sum_approx_conv needs 0 < delta < 1/4");
  if (f.empty() || g.empty()) return {};
  const std::size_t n = std::max(f.size(), g.size()) - 1;
  const double two_n1 = 2.0 * static_cast<double>(n) + 1.0;
  // D = 2^d >= 2 (2n+1)^2 / delta leaves half the budget for mantissa trimming.
  const auto d = static_cast<std::int64_t>(std::ceil(std::log2(2.0 * two_n1 * two_n1 / delta)));
  const int q = std::min(XReal::kPrecision, static_cast<int>(std::ceil(std::log2(1.0 / delta))) + 12);

  struct Part {
    MonotoneArray a;
    std::vector<XReal> u;
    bool any = false;
  };
  auto split = [&](std::span<const XReal> x) {
    std::vector<std::int64_t> star(x.size(), kNegInf);
    std::int64_t top = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].is_zero()) continue;
      if (x[i].exponent() < 0) throw std::invalid_argument("sum_approx_conv entries must be zero or >= 1");
      star[i] = x[i].exponent() / d;
      top = std::max(top, star[i]);
    }
    std::array<Part, 3> parts;
    for (int r = 0; r < 3; ++r) {
      Part& pt = parts[static_cast<std::size_t>(r)];
      pt.a.bound = top;
      pt.a.entries.assign(x.size(), kNegInf);
      pt.u.assign(x.size(), XReal{});
      std::int64_t run_max = kNegInf;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const bool own = star[i] != kNegInf && star[i] % 3 == r;
        if (own && star[i] >= run_max) {
          run_max = star[i];
          pt.u[i] = x[i].round_to_bits(q).ldexp(-d * star[i]);
          pt.any = true;
        }
        pt.a.entries[i] = run_max;
      }
    }
    return parts;
  };
  const auto pf = split(f), pg = split(g);
  std::vector<XReal> h(f.size() + g.size() - 1);
  for (int r = 0; r < 3; ++r) {
    for (int s = 0; s < 3; ++s) {
      const Part& x = pf[static_cast<std::size_t>(r)];
      const Part& y = pg[static_cast<std::size_t>(s)];
      if (!x.any || !y.any) continue;
      const auto res = maxplus_witness_fast(x.a, y.a, x.u, y.u, rng);
      for (std::size_t z = 0; z < h.size(); ++z) {
        if (res.C[z] == kNegInf || res.w[z].is_zero()) continue;
        h[z] += res.w[z].ldexp(d * res.C[z]);
      }
    }
  }
  return h;
}

}  // namespace knapcount
