#include "knapcount/rng.hpp"
#include "knapcount/xreal.hpp"

#include <doctest.h>

using namespace knapcount;

TEST_CASE("hex rendering matches IEEE doubles") {
  CHECK(XReal::from_double(0.75).to_hex() == "0x1.8p-1");
  CHECK(XReal::from_hex("0x1.999999999999ap-4").to_double() == 0.1);
  CHECK(XReal::from_double(0.1) == XReal::from_hex("0x1.999999999999ap-4"));
  CHECK(XReal().to_hex() == "0x0p+0");
  CHECK_THROWS_AS(XReal::from_hex("1.5p3"), std::invalid_argument);
}

TEST_CASE("hex round-trips") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const XReal x = XReal::from_integer(rng.below(pow2(200)) + 1).ldexp(static_cast<std::int64_t>(rng.below(400)) - 200);
    CHECK(XReal::from_hex(x.to_hex()) == x);
  }
}

TEST_CASE("integer arithmetic below the precision is exact") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const BigInt a = rng.below(pow2(40)), b = rng.below(pow2(40));
    const XReal xa = XReal::from_integer(a), xb = XReal::from_integer(b);
    CHECK((xa + xb).floor_integer() == a + b);
    CHECK((xa * xb).floor_integer() == a * b);
    CHECK((xa * xb).is_integer());
    const auto& hi = a < b ? b : a;
    const auto& lo = a < b ? a : b;
    CHECK(sub_nonneg(XReal::from_integer(hi), XReal::from_integer(lo)).floor_integer() == hi - lo);
  }
}

TEST_CASE("exponents beyond double range") {
  const XReal big = XReal::pow2(5000);
  const XReal small = XReal::pow2(-5000);
  CHECK((big * small) == XReal::from_u64(1));
  CHECK(big.log2() == doctest::Approx(5000));
  CHECK(small < XReal::from_double(1e-300));
  CHECK((big / big) == XReal::from_u64(1));
}

TEST_CASE("ordering and decimal rendering") {
  CHECK(XReal::from_u64(3) < XReal::from_u64(5));
  CHECK(XReal::from_u64(5).to_decimal() == "5");
  CHECK(XReal::from_double(0.5).to_decimal(3).rfind("5", 0) == 0);
  const XReal third = XReal::from_u64(1) / XReal::from_u64(3);
  CHECK((third * XReal::from_u64(3)).to_double() == doctest::Approx(1.0));
}
