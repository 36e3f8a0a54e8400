#include "knapcount/sampler.hpp"

#include <doctest.h>

#include <algorithm>

using namespace knapcount;

namespace {

std::vector<Item> items_of(std::initializer_list<std::uint64_t> weights, std::size_t first_id = 0) {
  std::vector<Item> out;
  for (const auto w : weights) out.push_back({first_id + out.size(), big_from_u64(w)});
  return out;
}

// Exact f(x) from the frozen support.
std::vector<double> support_histogram(const Sampler& s) {
  std::vector<double> h(static_cast<std::size_t>(s.length() + 1), 0.0);
  for (const auto& e : s.enumerate_support()) h[static_cast<std::size_t>(e.units)] += 1.0;
  return h;
}

void check_counts_match_support(const Sampler& s) {
  const auto h = support_histogram(s);
  const auto c = s.counts();
  REQUIRE(c.size() == h.size());
  for (std::size_t x = 0; x < h.size(); ++x) {
    CHECK(c[x].to_double() == doctest::Approx(h[x]).epsilon(std::max(s.delta(), 1e-12)));
  }
}

}  // namespace

TEST_CASE("level scales match reference values") {
  CHECK(level_scale(BigInt(1000000000000), 3, 12.5) == BigInt(28284271248));
  CHECK(level_scale(BigInt(1000), 0, 3.0) == 334);
  CHECK(level_scale(BigInt(5), 10, 100.0) == 1);
}

TEST_CASE("subset sum counts modulo a prime") {
  const std::vector<std::int64_t> a{1, 2, 2, 3, 5};
  CHECK(subset_sums_count_mod_p(a, 8, 11) == std::vector<BigInt>{1, 1, 2, 3, 2, 4, 3, 3, 4});
  const std::vector<std::int64_t> ones(6, 1);
  CHECK(subset_sums_count_mod_p(ones, 6, 7) == std::vector<BigInt>{1, 6, 1, 6, 1, 6, 1});
  CHECK_THROWS(subset_sums_count_mod_p(ones, 6, 5));
}

TEST_CASE("neutral sampler holds only the empty set") {
  const Sampler s = Sampler::neutral(7);
  CHECK(s.is_neutral());
  CHECK(s.length() == 0);
  REQUIRE(s.counts().size() == 1);
  CHECK(s.counts()[0] == XReal::from_u64(1));
  Rng rng(1);
  const auto q = s.query_units(0, rng);
  REQUIRE(q.has_value());
  CHECK(q->items.empty());
}

TEST_CASE("leaf rounding stays between floor and ceiling") {
  const auto items = items_of({37, 58, 91, 14, 5});
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    const Sampler s = leaf_dp_build(items, 10, 3, 0.01, rng);
    const auto units = s.rounded_units();
    REQUIRE(units.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::int64_t lo = big_to_i64(items[i].weight) / 10;
      CHECK((units[i] == lo || units[i] == lo + 1));
    }
  }
}

TEST_CASE("leaf counts equal the frozen support") {
  Rng rng(2);
  check_counts_match_support(leaf_dp_build(items_of({12, 33, 47, 51, 68, 70}), 10, 4, 0.01, rng));
  check_counts_match_support(leaf_cc_build(items_of({12, 33, 47, 51, 68, 70, 99}), 10, 3, 0.01, rng));
  check_counts_match_support(small_items_build(items_of({3, 7, 9, 2}), 10, 0.01, rng));
  const std::vector<Candidate> cands{{{0}, 25}, {{1, 2}, 41}, {{3}, 7}};
  check_counts_match_support(nchoose1_build(cands, 10, rng));
}

TEST_CASE("leaf support respects the size cap") {
  Rng rng(3);
  const Sampler s = leaf_dp_build(items_of({12, 33, 47, 51, 68, 70}), 10, 2, 0.01, rng);
  const auto support = s.enumerate_support();
  CHECK(support.size() == 1 + 6 + 15);
  for (const auto& e : support) CHECK(e.items.size() <= 2);
  CHECK_THROWS(s.enumerate_support(4));
}

TEST_CASE("merge and round keep counts consistent with the support") {
  Rng rng(4);
  const Sampler left = leaf_dp_build(items_of({12, 33, 47}), 8, 3, 1e-4, rng);
  const Sampler right = leaf_dp_build(items_of({20, 26, 61}, 3), 8, 3, 1e-4, rng);
  const Sampler merged = merge_samplers(left, right, rng);
  CHECK(merged.kind() == NodeKind::Merge);
  CHECK(merged.enumerate_support().size() == 64);
  check_counts_match_support(merged);
  const Sampler rounded = round_sampler(merged, 20, rng);
  CHECK(rounded.kind() == NodeKind::Round);
  CHECK(rounded.enumerate_support().size() == 64);
  check_counts_match_support(rounded);
  CHECK(rounded.failure_bound() >= merged.failure_bound());
}

TEST_CASE("queries land in the support below the capacity") {
  Rng rng(5);
  const Sampler left = leaf_cc_build(items_of({12, 33, 47, 80}), 8, 3, 1e-3, rng);
  const Sampler right = leaf_dp_build(items_of({20, 26, 61}, 4), 8, 3, 1e-3, rng);
  const Sampler root = merge_samplers(left, right, rng);
  const auto support = root.enumerate_support();
  for (std::int64_t cap : {0L, 5L, 20L, root.length()}) {
    for (std::uint64_t i = 0; i < 50; ++i) {
      Rng q(i);
      const auto r = root.query_units(cap, q);
      REQUIRE(r.has_value());
      CHECK(r->units <= cap);
      const bool found = std::any_of(support.begin(), support.end(), [&](const SupportElement& e) {
        return e.items == r->items && e.units == r->units;
      });
      CHECK(found);
    }
  }
}

TEST_CASE("batched queries equal one-at-a-time queries") {
  Rng rng(6);
  const Sampler left = leaf_dp_build(items_of({12, 33, 47, 80}), 8, 3, 1e-3, rng);
  const Sampler right = leaf_dp_build(items_of({20, 26, 61}, 4), 8, 3, 1e-3, rng);
  const Sampler root = round_sampler(merge_samplers(left, right, rng), 13, rng);
  const Rng base(77);
  std::vector<QueryTask> tasks;
  for (std::uint64_t i = 0; i < 200; ++i) tasks.push_back({static_cast<std::int64_t>(i % (root.length() + 1)), base.split(i), {}, true});
  root.query_batch(tasks);
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng r = base.split(i);
    const auto single = root.query_units(tasks[i].capacity, r);
    REQUIRE(single.has_value() == tasks[i].ok);
    if (single) CHECK(single->items == tasks[i].result.items);
  }
}

TEST_CASE("tree builder produces a root at the coarsest scale") {
  Rng rng(7);
  std::vector<BigInt> scales{BigInt(40), BigInt(28), BigInt(20)};
  std::vector<Sampler> leaves;
  for (std::size_t i = 0; i < 4; ++i) leaves.push_back(leaf_dp_build(items_of({100 + 17 * i}, i), 20, 1, 1e-4, rng));
  const Sampler root = build_tree(std::move(leaves), scales, rng);
  CHECK(root.scale() == 40);
  CHECK(root.items().size() == 4);
  CHECK(root.enumerate_support().size() == 16);
  CHECK_FALSE(root.describe().empty());
}

TEST_CASE("fast floats sample proportionally") {
  const std::vector<FastFloat> w{FastFloat::from(1.0L), FastFloat::from(0.0L), FastFloat::from(3.0L)};
  Rng rng(8);
  std::array<int, 3> hits{};
  for (int i = 0; i < 40000; ++i) ++hits[static_cast<std::size_t>(sample_index(w, rng))];
  CHECK(hits[1] == 0);
  CHECK(hits[2] / 40000.0 == doctest::Approx(0.75).epsilon(0.03));
  const std::vector<FastFloat> zeros{FastFloat::from(0.0L)};
  CHECK(sample_index(zeros, rng) == -1);
}
