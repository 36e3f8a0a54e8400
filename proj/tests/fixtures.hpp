#pragma once

#include "knapcount/instance.hpp"

#include <cstdint>
#include <vector>

namespace knapcount::testing {

inline KnapsackInstance instance_of(std::vector<std::uint64_t> weights, std::uint64_t capacity) {
  std::vector<BigInt> w;
  for (const auto x : weights) w.push_back(big_from_u64(x));
  return make_instance(std::move(w), big_from_u64(capacity));
}

// Reference values from tests/oracles/expected.py.
inline KnapsackInstance small_instance() { return instance_of({2, 3, 5}, 5); }
inline KnapsackInstance mid_instance() { return instance_of({3, 7, 12, 19, 25, 31, 44, 58, 60, 71, 80, 95}, 150); }
inline KnapsackInstance mixed_instance() {
  return instance_of({17, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103}, 600);
}

}  // namespace knapcount::testing
