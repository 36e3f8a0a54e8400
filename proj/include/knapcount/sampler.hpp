#pragma once

#include "knapcount/bigint.hpp"
#include "knapcount/oracle.hpp"
#include "knapcount/rng.hpp"
#include "knapcount/xreal.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace knapcount {

enum class NodeKind { LeafDp, LeafCc, SmallItems, NChoose1, Merge, Round };

std::string to_string(NodeKind k);

struct Item {
  std::size_t id = 0;
  BigInt weight;
};

// A candidate of an n-choose-1 sampler: an item set carried as one unit.
struct Candidate {
  ItemSet items;
  BigInt weight;
};

struct QueryResult {
  ItemSet items;                         // sorted, tiny items excluded
  std::optional<std::size_t> candidate;  // chosen n-choose-1 candidate, if any
  std::int64_t units = 0;                // rounded weight in units of the scale
};

// One draw of a batch. Each task owns its stream, so a batch yields the same
// results as issuing the tasks one at a time.
struct QueryTask {
  std::int64_t capacity = 0;  // in units of the sampler's scale
  Rng rng;
  QueryResult result;
  bool ok = true;  // false when no element fits
};

// An element of the sampler's set together with its frozen rounded weight.
struct SupportElement {
  ItemSet items;  // sorted, tiny items included
  std::optional<std::size_t> candidate;
  std::int64_t units = 0;
};

// Immutable approximate knapsack sampler. Copies share the node tree.
class Sampler {
 public:
  // Sampler for {empty set} at scale 1.
  Sampler();
  static Sampler neutral(const BigInt& scale);

  NodeKind kind() const;
  const BigInt& scale() const;
  std::int64_t length() const;
  // 4 sigma^2, kept exact.
  const BigInt& sigma2_x4() const;
  double sigma() const;
  double delta() const;
  std::span<const XReal> counts() const;
  const ItemSet& items() const;       // every item id the node covers
  const ItemSet& tiny_items() const;  // items rounded to zero
  bool is_neutral() const;

  std::size_t num_children() const;
  const Sampler& child(std::size_t i) const;

  // Frozen randomness: per-item (leaves, small items) or per-candidate units.
  std::span<const std::int64_t> rounded_units() const;
  // Round nodes: thresholds r_y and the map from child units to node units.
  std::span<const BigInt> thresholds() const;
  std::span<const std::int64_t> alpha() const;
  // Leaf nodes: exact-weight counts indexed [size][units].
  std::vector<std::vector<long double>> size_weight_counts() const;
  // Leaf-DP cap on set size; also the CC variant's.
  std::size_t size_cap() const;

  // Declared construction failure probability summed over the subtree.
  double failure_bound() const;
  // Rejection-loop overflows observed during queries, summed over the subtree.
  std::uint64_t overflow_events() const;

  // Capacity is an absolute weight; clipped to L * S.
  std::optional<QueryResult> query(const BigInt& capacity, Rng& rng) const;
  std::optional<QueryResult> query_units(std::int64_t capacity, Rng& rng) const;
  void query_batch(std::span<QueryTask> tasks) const;

  // All elements of the node's set with their rounded weights; throws when
  // the set has more than limit elements.
  std::vector<SupportElement> enumerate_support(std::size_t limit = std::size_t{1} << 20) const;

  // Indented tree of node kind, S, L, sigma^2, delta and ledger.
  std::string describe() const;

  struct Node;

 private:
  explicit Sampler(std::shared_ptr<Node> node);
  std::shared_ptr<Node> node_;

  friend Sampler leaf_dp_build(std::span<const Item>, const BigInt&, std::size_t, double, Rng&);
  friend Sampler leaf_cc_build(std::span<const Item>, const BigInt&, std::size_t, double, Rng&);
  friend Sampler small_items_build(std::span<const Item>, const BigInt&, double, Rng&);
  friend Sampler nchoose1_build(std::span<const Candidate>, const BigInt&, Rng&);
  friend Sampler round_sampler(const Sampler&, const BigInt&, Rng&);
  friend Sampler merge_samplers(const Sampler&, const Sampler&, Rng&, std::optional<double>);
};

// Sets of at most B items, per-item unbiased rounding, size-weight table.
Sampler leaf_dp_build(std::span<const Item> items, const BigInt& scale, std::size_t cap, double delta, Rng& rng);
// Same contract; counts from subset sums mod a prime, queries by color-coded
// rejection sampling.
Sampler leaf_cc_build(std::span<const Item> items, const BigInt& scale, std::size_t cap, double delta, Rng& rng);
// Items no heavier than the scale; weights round to 0 or S.
Sampler small_items_build(std::span<const Item> items, const BigInt& scale, double delta, Rng& rng);
// Exactly one candidate per element; exact counts.
Sampler nchoose1_build(std::span<const Candidate> candidates, const BigInt& scale, Rng& rng);
Sampler round_sampler(const Sampler& child, const BigInt& new_scale, Rng& rng);
// delta_conv defaults to 4 (delta_left + delta_right) / 10 and must be
// positive; the merged node declares max(4 (dl + dr), 10 delta_conv).
Sampler merge_samplers(const Sampler& left, const Sampler& right, Rng& rng,
                       std::optional<double> delta_conv = std::nullopt);

// ceil(total / (2^{level/2} * divisor)), at least 1.
BigInt level_scale(const BigInt& total, int level, double divisor);

// Complete binary tree over 2^H leaves at scale scales[H]: each parent merges
// its children at scales[h+1] and rounds to scales[h]. Returns the root.
Sampler build_tree(std::vector<Sampler> leaves, std::span<const BigInt> scales, Rng& rng);

// g[s] = |{X : sum_{i in X} a_i = s}| mod p for s <= t.
std::vector<BigInt> subset_sums_count_mod_p(std::span<const std::int64_t> a, std::int64_t t, const BigInt& p);

// Value m * 2^e with m in [0.5, 1) or 0; cheap products for sampling weights.
struct FastFloat {
  double m = 0.0;
  std::int64_t e = 0;
  static FastFloat from(const XReal& x);
  static FastFloat from(long double x);
  friend FastFloat operator*(FastFloat a, FastFloat b);
};

// Index drawn with probability proportional to weights; -1 if all are zero.
std::ptrdiff_t sample_index(std::span<const FastFloat> weights, Rng& rng);

}  // namespace knapcount
