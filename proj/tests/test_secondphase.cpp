#include "knapcount/secondphase.hpp"

#include <doctest.h>

#include <cmath>

using namespace knapcount;

namespace {

SecondPhaseInstance reference_instance() {
  SecondPhaseInstance in;
  in.tiny_weights = {9, 5, 4, 2, 1};
  in.candidate_weights = {80, 95, 99, 101, 120};
  in.capacity = 100;
  in.epsilon = 0.25;
  in.n = 20;
  return in;
}

}  // namespace

TEST_CASE("exact count matches brute force") { CHECK(second_phase_exact(reference_instance()) == 40); }

TEST_CASE("cleanup removes and absorbs candidates") {
  const auto clean = second_phase_cleanup(reference_instance());
  CHECK(clean.removed == 2);
  CHECK(clean.absorbed == 0);
  CHECK(clean.reduced.candidate_weights == std::vector<BigInt>{80, 95, 99});
  auto in = reference_instance();
  in.candidate_weights = {70, 79, 80};
  const auto light = second_phase_cleanup(in);
  CHECK(light.absorbed == 2);
  CHECK(light.base == XReal::from_u64(64));
  CHECK(light.reduced.candidate_weights == std::vector<BigInt>{80});
}

TEST_CASE("round count matches reference") {
  auto in = reference_instance();
  CHECK(second_phase_rounds(in) == 5);
  in.n = 50;
  in.tiny_weights.assign(40, 1);
  CHECK(second_phase_rounds(in) == 30);
}

TEST_CASE("estimate lands near the exact count") {
  const auto in = reference_instance();
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto rep = second_phase_estimate(in, AlgoParams{}, rng);
    CHECK(rep.rounds == 5);
    ok += std::fabs(rep.value.to_double() - 40.0) <= 40.0 / 24.0;
  }
  CHECK(ok >= 18);
}

TEST_CASE("unsorted tiny weights are rejected") {
  auto in = reference_instance();
  in.tiny_weights = {1, 9};
  Rng rng(1);
  CHECK_THROWS_AS(second_phase_estimate(in, AlgoParams{}, rng), std::invalid_argument);
}
