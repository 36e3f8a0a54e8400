#include "knapcount/convolution.hpp"
#include "knapcount/rng.hpp"

#include <doctest.h>

using namespace knapcount;

namespace {

std::vector<BigInt> random_values(Rng& rng, std::size_t len, std::size_t bits) {
  std::vector<BigInt> out(len);
  for (auto& x : out) x = rng.below(pow2(bits));
  return out;
}

}  // namespace

TEST_CASE("exact convolution matches reference products") {
  const std::vector<BigInt> a{pow2(100) + 1, 3, pow2(64) - 1};
  const std::vector<BigInt> b{5, pow2(90), 7, 1};
  const std::vector<BigInt> expected{
      BigInt("6338253001141147007483516026885"),
      BigInt("1569275433846670190958947355803154544064874241390907752463"),
      BigInt("8877268021807695671670167568386"),
      BigInt("22835963083295359363345235700135943403928027158"),
      BigInt("129127208515966861308"),
      BigInt("18446744073709551615")};
  CHECK(conv_schoolbook(a, b) == expected);
  CHECK(conv_ntt(a, b) == expected);
  CHECK(conv_kronecker(a, b) == expected);
  CHECK(conv_exact(a, b) == expected);
}

TEST_CASE("convolution paths agree on random inputs") {
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_values(rng, 1 + rng.below(300), 1 + rng.below(200));
    const auto b = random_values(rng, 1 + rng.below(300), 1 + rng.below(200));
    const auto ref = conv_schoolbook(a, b);
    CHECK(conv_ntt(a, b) == ref);
    CHECK(conv_kronecker(a, b) == ref);
  }
}

TEST_CASE("primes") {
  CHECK(is_prime_u64(1009));
  CHECK_FALSE(is_prime_u64(1001));
  CHECK(is_prime_u64(18446744073709551557ULL));
  Rng rng(1);
  const auto p = random_prime(1000, 2000, rng);
  CHECK((p >= 1000 && p <= 2000));
  CHECK(is_prime_u64(p));
}

TEST_CASE("sum approximation keeps every prefix within delta") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<XReal> f(256), g(256);
    std::vector<BigInt> fe(256), ge(256);
    for (std::size_t i = 0; i < 256; ++i) {
      fe[i] = rng.below(pow2(150));
      ge[i] = rng.below(3) == 0 ? BigInt(0) : rng.below(pow2(150));
      f[i] = XReal::from_integer(fe[i]);
      g[i] = XReal::from_integer(ge[i]);
      fe[i] = f[i].floor_integer();
      ge[i] = g[i].floor_integer();
    }
    const auto exact = conv_exact(fe, ge);
    const auto approx = prefix_sums(sum_approx_conv(f, g, 1e-4, rng));
    REQUIRE(approx.size() == exact.size());
    BigInt acc = 0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
      acc += exact[k];
      const double ref = acc.get_d();
      CHECK(approx[k].to_double() == doctest::Approx(ref).epsilon(1e-4));
    }
  }
}

TEST_CASE("max-plus witness fast path equals the reference") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    MonotoneArray a{{}, 100}, b{{}, 100};
    std::int64_t va = 0, vb = 0;
    for (int i = 0; i < 128; ++i) {
      va = std::min<std::int64_t>(100, va + static_cast<std::int64_t>(rng.below(3)));
      vb = std::min<std::int64_t>(100, vb + static_cast<std::int64_t>(rng.below(3)));
      a.entries.push_back(i < 3 ? kNegInf : va);
      b.entries.push_back(vb);
    }
    std::vector<XReal> u(128), v(128);
    for (auto& x : u) x = XReal::from_u64(1 + rng.below(1000));
    for (auto& x : v) x = XReal::from_u64(1 + rng.below(1000));
    const auto ref = maxplus_witness_ref(a, b, u, v);
    const auto fast = maxplus_witness_fast(a, b, u, v, rng);
    CHECK(fast.C == ref.C);
    CHECK(fast.C == maxplus_values(a, b));
    REQUIRE(fast.w.size() == ref.w.size());
    for (std::size_t k = 0; k < ref.w.size(); ++k) CHECK(fast.w[k].to_double() == doctest::Approx(ref.w[k].to_double()));
  }
}
