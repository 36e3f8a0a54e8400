#include "fixtures.hpp"

#include "knapcount/estimator.hpp"
#include "knapcount/oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace knapcount;
using namespace knapcount::testing;

TEST_CASE("split index and popular class match reference values") {
  CHECK(split_index(mid_instance()) == 6);
  CHECK(find_popular_ell(mid_instance()) == 8);
  CHECK(popular_class_size(mid_instance(), 8) == 3);
  CHECK(split_index(mixed_instance()) == 9);
  CHECK(find_popular_ell(mixed_instance()) == 16);
  CHECK_THROWS(find_popular_ell(instance_of({1, 2}, 100)));
}

TEST_CASE("weight classes match reference values") {
  const auto part = partition_classes(mid_instance());
  CHECK(part.g == 4);
  REQUIRE(part.classes.size() == 5);
  const std::vector<std::uint64_t> expected{32, 32, 16, 8, 8, 8, 4, 4, 4, 4, 2, 2};
  for (const auto& c : part.classes) {
    for (const auto i : c.items) CHECK(expected[i] == c.m);
  }
  CHECK(part.classes.back().last);
}

TEST_CASE("class delta budget folds back to the root delta") {
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto budget = class_delta_budget(k, 1e-3);
    REQUIRE(budget.size() == k);
    double acc = budget[0];
    for (std::size_t i = 1; i < k; ++i) acc = 4.0 * (acc + budget[i]);
    CHECK(acc == doctest::Approx(1e-3));
  }
  const auto three = class_delta_budget(3, 1.0);
  CHECK(three[0] == doctest::Approx(1.0 / 48));
  CHECK(three[1] == doctest::Approx(1.0 / 48));
  CHECK(three[2] == doctest::Approx(1.0 / 12));
}

TEST_CASE("trivial instances use the exact shortcut") {
  const auto inst = instance_of({1, 2, 3}, 100);
  Rng rng(1);
  const auto rep = estimate_subquadratic(inst, AlgoParams{}, rng);
  CHECK(rep.exact_shortcut);
  CHECK(rep.estimate == XReal::from_u64(8));
}

TEST_CASE("popular class count bound holds on random instances") {
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    GeneratorSpec spec;
    spec.n = 2 + rng.below(40);
    spec.capacity = big_from_u64(spec.n + rng.below(1000000));
    spec.seed = rng();
    const auto inst = generate(spec);
    if (inst.total_weight() <= inst.capacity) continue;
    CHECK(popular_count_bound_holds(inst, find_popular_ell(inst)));
  }
}

TEST_CASE("estimates are deterministic in the seed") {
  const auto inst = scale_instance(mixed_instance(), AlgoParams{});
  Rng a(3), b(3);
  CHECK(estimate_subquadratic(inst, AlgoParams{}, a).estimate == estimate_subquadratic(inst, AlgoParams{}, b).estimate);
  Rng c(3), d(3);
  CHECK(estimate_dyer(inst, AlgoParams{}, c).estimate == estimate_dyer(inst, AlgoParams{}, d).estimate);
}

TEST_CASE("both estimators land near the exact count") {
  const auto inst = mixed_instance();
  const double exact = 520392.0;
  int sub_ok = 0, dyer_ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng r1(seed), r2(seed);
    const double s = estimate_subquadratic(inst, AlgoParams{}, r1).estimate.to_double();
    const double d = estimate_dyer(inst, AlgoParams{}, r2).estimate.to_double();
    sub_ok += std::fabs(s - exact) <= 0.25 * exact;
    dyer_ok += std::fabs(d - exact) <= 0.25 * exact;
  }
  CHECK(sub_ok >= 8);
  CHECK(dyer_ok >= 8);
}

TEST_CASE("baseline grid size") {
  Rng rng(1);
  const auto rep = estimate_dyer(mid_instance(), AlgoParams{}, rng);
  CHECK(rep.dyer_k == 22);
  CHECK(rep.dyer_capacity == 2 * 22 * 12 + 22);
}

TEST_CASE("phase one diagnostics") {
  const auto inst = scale_instance(mixed_instance(), AlgoParams{});
  Rng rng(2);
  const auto out = phase_one(inst, AlgoParams{}, rng);
  CHECK(out.ell == 16);
  CHECK(!out.samples.empty());
  for (const auto& s : out.samples) {
    BigInt w = 0;
    for (const auto i : s.items) w += inst.weights[i];
    CHECK(w == s.weight);
  }
  CHECK(out.failure_bound < 1e-3);
  CHECK(out.omega_prime.to_double() >= 520392.0 * 0.75);
}
