#include "fixtures.hpp"

#include "knapcount/instance.hpp"

#include <doctest.h>

#include <cmath>

using namespace knapcount;
using knapcount::testing::instance_of;

TEST_CASE("parse and serialize round-trip") {
  const auto inst = parse_instance("3 5\n5 2 3\n");
  CHECK(inst.capacity == 5);
  REQUIRE(inst.size() == 3);
  CHECK(inst.weights[0] == 2);
  CHECK(inst.weights[2] == 5);
  CHECK(serialize_instance(inst) == "3 5\n2 3 5\n");
  CHECK(parse_instance(serialize_instance(inst)) == inst);
}

TEST_CASE("parse accepts weights beyond 64 bits") {
  const auto inst = parse_instance("2 100000000000000000000000\n1 99999999999999999999999\n");
  CHECK(inst.weights[1] == BigInt("99999999999999999999999"));
}

TEST_CASE("parse errors carry codes") {
  auto code_of = [](std::string_view text) {
    try {
      parse_instance(text);
    } catch (const ParseError& e) {
      return static_cast<int>(e.code());
    }
    return -1;
  };
  CHECK(code_of("2 5\n1\n") == static_cast<int>(ParseError::Code::CountMismatch));
  CHECK(code_of("2 5\n1 x\n") == static_cast<int>(ParseError::Code::Malformed));
  CHECK(code_of("1 5\n0\n") == static_cast<int>(ParseError::Code::NonPositiveWeight));
  CHECK(code_of("1 5\n6\n") == static_cast<int>(ParseError::Code::WeightExceedsCapacity));
  CHECK(code_of("1 0\n1\n") == static_cast<int>(ParseError::Code::NonPositiveCapacity));
  CHECK(code_of("") == static_cast<int>(ParseError::Code::Malformed));
}

TEST_CASE("scale factor matches reference") {
  const AlgoParams params;
  CHECK(scale_factor(knapcount::testing::small_instance(), params) == 1024);
  CHECK(scale_factor(knapcount::testing::mid_instance(), params) == 65536);
  const auto scaled = scale_instance(knapcount::testing::small_instance(), params);
  CHECK(scaled.capacity == 5 * 1024);
  CHECK(scaled.weights[0] == 2 * 1024);
}

TEST_CASE("derived parameters") {
  AlgoParams p;
  CHECK(p.bin_cap(10) == 10);
  CHECK(p.sample_multiplier(10) == doctest::Approx(96));
  CHECK(p.root_delta(10) == doctest::Approx(1.5625e-05));
  CHECK_NOTHROW(p.validate(10));
  p.epsilon = 0.3;
  CHECK_THROWS_AS(p.validate(10), std::invalid_argument);
  p.epsilon = 0.25;
  p.scale_exp = -1;
  CHECK_THROWS_AS(p.validate(10), std::invalid_argument);
}

TEST_CASE("generator is deterministic and respects its ranges") {
  GeneratorSpec spec;
  spec.n = 10;
  spec.capacity = 1000;
  spec.seed = 7;
  const auto a = generate(spec), b = generate(spec);
  CHECK(a == b);
  for (const auto& w : a.weights) CHECK((w >= 1 && w <= 1000));

  spec.kind = GeneratorKind::BoundedRatio;
  spec.ell = 4;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    for (const auto& w : generate(spec).weights) CHECK((4 * w > 1000 && 4 * w <= 2000));
  }

  spec.kind = GeneratorKind::CustomClasses;
  spec.classes = {2, 8};
  for (const auto& w : generate(spec).weights) {
    const bool in2 = 2 * w > 1000 && 2 * w <= 2000;
    const bool in8 = 8 * w > 1000 && 8 * w <= 2000;
    CHECK((in2 || in8));
  }

  spec.kind = GeneratorKind::TinyAdversarial;
  spec.capacity = pow2(60);
  const auto tiny = generate(spec);
  CHECK(tiny.weights.front() < tiny.weights.back());
  CHECK(parse_generator_kind(to_string(GeneratorKind::TinyAdversarial)) == GeneratorKind::TinyAdversarial);
}

TEST_CASE("scaling preserves the instance shape on random inputs") {
  const AlgoParams params;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorSpec spec;
    spec.n = 1 + seed % 9;
    spec.capacity = big_from_u64(100 + seed * 37);
    spec.seed = seed;
    const auto inst = generate(spec);
    const auto scaled = scale_instance(inst, params);
    const BigInt c = scale_factor(inst, params);
    CHECK(scaled.capacity == inst.capacity * c);
    CHECK(mpz_popcount(c.get_mpz_t()) == 1);
    const double bound = std::pow(static_cast<double>(inst.size()) / params.epsilon, 3.0);
    CHECK(scaled.weights.front().get_d() >= bound - 1);
  }
}
