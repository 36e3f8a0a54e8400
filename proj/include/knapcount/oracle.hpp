#pragma once

#include "knapcount/bigint.hpp"
#include "knapcount/instance.hpp"
#include "knapcount/xreal.hpp"

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace knapcount {

// |{X : W_X <= T}| by meet-in-the-middle enumeration; n <= 30.
BigInt count_enum(const KnapsackInstance& inst);
// Same count, single-threaded two-pointer merge; reference for count_enum.
BigInt count_enum_serial(const KnapsackInstance& inst);
// |{X : W_X <= cap}| for arbitrary cap (may be negative); n <= 30.
BigInt count_at_most(std::span<const BigInt> weights, const BigInt& cap);
// Capacity-indexed table; T <= 1e7.
BigInt count_dp(const KnapsackInstance& inst);
// |{X : lo < W_X <= hi}|.
BigInt count_band(const KnapsackInstance& inst, const BigInt& lo, const BigInt& hi);

using ItemSet = std::vector<std::size_t>;

// Half the L1 distance between the empirical distribution of samples and
// target (probabilities summing to 1).
double empirical_tv(std::span<const ItemSet> samples, const std::map<ItemSet, double>& target);

}  // namespace knapcount
