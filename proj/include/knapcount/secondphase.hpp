#pragma once

#include "knapcount/bigint.hpp"
#include "knapcount/instance.hpp"
#include "knapcount/rng.hpp"
#include "knapcount/xreal.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace knapcount {

// Count pairs (X0, i) with X0 a subset of the tiny items and
// W_{X0} + W_{X_i} <= T.
struct SecondPhaseInstance {
  std::vector<BigInt> tiny_weights;       // non-increasing
  std::vector<BigInt> candidate_weights;  // W_{X_i}, one per partial sample
  BigInt capacity;
  double epsilon = 0.25;
  std::size_t n = 1;  // original item count, for the constants
};

struct CleanupResult {
  SecondPhaseInstance reduced;  // candidates with T - W_{I0} < W_{X_i} <= T
  XReal base;                   // 2^{|I0|} per always-feasible candidate
  std::size_t removed = 0;
  std::size_t absorbed = 0;
};

CleanupResult second_phase_cleanup(const SecondPhaseInstance& inst);

// min(|I0|, ceil(log2(100000 n (log2 n)^2 / eps))).
std::size_t second_phase_rounds(const SecondPhaseInstance& inst);

struct SecondPhaseReport {
  XReal value;
  std::size_t rounds = 0;
  std::size_t retained = 0;
  std::size_t removed = 0;
  std::size_t absorbed = 0;
  std::vector<std::size_t> draws_per_round;  // N' per heaviest tiny item, 0 when skipped
  double failure_bound = 0.0;
  std::uint64_t overflow_events = 0;
};

// Cleans up, then estimates each class of solutions keyed by its heaviest
// tiny item with a sampler over 2^{lighter tiny items} x {candidates}.
SecondPhaseReport second_phase_estimate(const SecondPhaseInstance& inst, const AlgoParams& params, Rng& rng);

// Exact pair count by enumeration; |I0| <= 24.
BigInt second_phase_exact(const SecondPhaseInstance& inst);

}  // namespace knapcount
