#include "fixtures.hpp"

#include "knapcount/oracle.hpp"
#include "knapcount/rng.hpp"

#include <doctest.h>

using namespace knapcount;
using namespace knapcount::testing;

TEST_CASE("counts match brute force") {
  CHECK(count_enum(small_instance()) == 5);
  CHECK(count_enum(mid_instance()) == 540);
  CHECK(count_enum(mixed_instance()) == 520392);
  CHECK(count_enum_serial(mixed_instance()) == 520392);
  CHECK(count_dp(mixed_instance()) == 520392);
  CHECK(count_dp(mid_instance()) == 540);
}

TEST_CASE("powers of two count every integer up to the capacity") {
  std::vector<std::uint64_t> w;
  for (int i = 0; i < 20; ++i) w.push_back(std::uint64_t{1} << i);
  const auto inst = instance_of(w, (1u << 19) + 12345);
  CHECK(count_enum(inst) == 536634);
  CHECK(count_dp(inst) == 536634);
}

TEST_CASE("count_at_most handles negative caps") {
  const auto w = mid_instance().weights;
  CHECK(count_at_most(w, -1) == 0);
  CHECK(count_at_most(w, 0) == 1);
  CHECK(count_at_most(w, 150) == 540);
}

TEST_CASE("bands") {
  CHECK(count_band(mid_instance(), 100, 160) == 465);
  CHECK(count_band(mixed_instance(), 600, 700) == 261345);
  CHECK_THROWS(count_band(mid_instance(), 10, 10));
}

TEST_CASE("parallel and serial enumeration agree on random instances") {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    GeneratorSpec spec;
    spec.n = 1 + rng.below(22);
    spec.capacity = big_from_u64(spec.n + rng.below(100000));
    spec.seed = rng();
    const auto inst = generate(spec);
    CHECK(count_enum(inst) == count_enum_serial(inst));
    if (spec.capacity <= 20000) CHECK(count_enum(inst) == count_dp(inst));
  }
}

TEST_CASE("empirical_tv") {
  const std::map<ItemSet, double> target{{{}, 0.5}, {{0}, 0.5}};
  const std::vector<ItemSet> same{{}, {0}};
  CHECK(empirical_tv(same, target) == doctest::Approx(0.0));
  const std::vector<ItemSet> skewed{{}, {}, {}, {0}};
  CHECK(empirical_tv(skewed, target) == doctest::Approx(0.25));
  const std::vector<ItemSet> outside{{1}};
  CHECK_THROWS(empirical_tv(outside, target));
}
