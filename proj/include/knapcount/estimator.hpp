#pragma once

#include "knapcount/bigint.hpp"
#include "knapcount/instance.hpp"
#include "knapcount/rng.hpp"
#include "knapcount/sampler.hpp"
#include "knapcount/xreal.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace knapcount {

// First 1-based index i with W_1 + ... + W_i >= T/2.
std::size_t split_index(const KnapsackInstance& inst);

// Items j <= split_index with W_j in (T/ell, 2T/ell].
std::size_t popular_class_size(const KnapsackInstance& inst, std::uint64_t ell);

// Power of two ell in [2, 2^ceil(log2 4n)] maximizing the weight of the
// popular class; ties go to the smaller ell. Requires sum W > T.
std::uint64_t find_popular_ell(const KnapsackInstance& inst);

// |popular class| > ell / (8 log2 8n).
bool popular_count_bound_holds(const KnapsackInstance& inst, std::uint64_t ell);

struct WeightClass {
  std::uint64_t m = 2;  // class holds W in (T/m, 2T/m]; the last class W <= 2T/m
  bool last = false;
  std::vector<std::size_t> items;
};

// Classes m = 2, 4, ..., 2^g with g = ceil(log2 n), then the last class of
// items W <= T/2^g with m = 2^{g+1}.
struct WeightClassPartition {
  std::size_t g = 0;
  std::vector<WeightClass> classes;
};

WeightClassPartition partition_classes(const KnapsackInstance& inst);

struct ClassBuildInfo {
  std::uint64_t m = 0;
  std::size_t size = 0;
  bool small_items_case = false;
  LeafVariant variant = LeafVariant::Dp;
  std::size_t nonempty_bins = 0;
  double delta = 0.0;
};

// Scale of every class root: ceil(T / (ell P)).
BigInt root_scale(const KnapsackInstance& inst, std::uint64_t ell, const AlgoParams& params);

// Case (a): hash into m bins, leaves at the finest level scale, then a merge
// and round tree up to the root scale. Case (b): one small-items sampler
// rounded to the root scale.
Sampler build_class_sampler(const KnapsackInstance& inst, const WeightClass& cls, std::uint64_t ell, double delta,
                            const AlgoParams& params, Rng& rng, ClassBuildInfo* info = nullptr);

// Left fold of merges; a single sampler is returned unchanged.
Sampler build_global_sampler(std::span<const Sampler> classes, Rng& rng);

// Declared delta for each of k left-folded classes so the root declares delta.
std::vector<double> class_delta_budget(std::size_t k, double delta);

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct PartialSample {
  ItemSet items;  // tiny items excluded
  BigInt weight;  // original weight of items
};

struct PhaseOneOutput {
  std::uint64_t ell = 0;
  BigInt scale;          // root scale S0
  std::int64_t threshold = 0;  // t, before clipping to L
  ItemSet tiny;
  std::vector<PartialSample> samples;
  XReal omega_prime;     // sum of counts up to min(t, L)
  std::vector<ClassBuildInfo> classes;
  std::int64_t root_length = 0;
  double root_delta = 0.0;
  double failure_bound = 0.0;
  std::uint64_t overflow_events = 0;
  bool timed_out = false;
  std::vector<StageTiming> timings;
  Sampler root;
};

// Wall-clock budget; inactive when constructed with a nonpositive budget.
class Deadline {
 public:
  explicit Deadline(double budget_ms = 0);
  bool expired() const;

 private:
  bool active_ = false;
  std::chrono::steady_clock::time_point end_;
};

// Builds every sampler, computes the count of Omega' and draws the partial
// samples. Requires a nontrivial instance (sum W > T).
PhaseOneOutput phase_one(const KnapsackInstance& inst, const AlgoParams& params, Rng& rng,
                         const Deadline* deadline = nullptr);

struct EstimateReport {
  std::string algo;
  XReal estimate;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  bool exact_shortcut = false;
  bool timed_out = false;
  std::vector<StageTiming> timings;
  // Sub-quadratic diagnostics.
  std::uint64_t ell = 0;
  std::vector<ClassBuildInfo> classes;
  std::size_t tiny_items = 0;
  std::size_t samples = 0;
  std::vector<std::size_t> second_phase_draws;
  std::int64_t root_length = 0;
  double root_delta = 0.0;
  double failure_bound = 0.0;
  std::uint64_t overflow_events = 0;
  // Dyer diagnostics.
  std::uint64_t dyer_k = 0;
  std::int64_t dyer_capacity = 0;
  std::uint64_t hits = 0;
};

EstimateReport estimate_subquadratic(const KnapsackInstance& inst, const AlgoParams& params, Rng& rng);
EstimateReport estimate_dyer(const KnapsackInstance& inst, const AlgoParams& params, Rng& rng);

}  // namespace knapcount
