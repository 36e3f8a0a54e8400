#include "knapcount/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace knapcount {

namespace {

constexpr std::size_t kEnumLimit = 30;
constexpr unsigned long kDpLimit = 10'000'000;

std::vector<BigInt> subset_sums(std::span<const BigInt> w) {
  std::vector<BigInt> sums{0};
  sums.reserve(std::size_t{1} << w.size());
  for (const auto& x : w) {
    const std::size_t k = sums.size();
    for (std::size_t i = 0; i < k; ++i) sums.push_back(sums[i] + x);
  }
  std::sort(sums.begin(), sums.end());
  return sums;
}

void check_enum_size(std::size_t n) {
  if (n > kEnumLimit) throw std::invalid_argument("enumeration limited to n <= 30");
}

}  // namespace

BigInt count_at_most(std::span<const BigInt> weights, const BigInt& cap) {
  check_enum_size(weights.size());
  const std::size_t h = weights.size() / 2;
  const auto left = subset_sums(weights.first(h));
  const auto right = subset_sums(weights.subspan(h));
  const auto nl = static_cast<std::int64_t>(left.size());
  unsigned long long total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (std::int64_t i = 0; i < nl; ++i) {
    const BigInt rest = cap - left[static_cast<std::size_t>(i)];
    total += static_cast<unsigned long long>(std::upper_bound(right.begin(), right.end(), rest) - right.begin());
  }
  return big_from_u64(total);
}

BigInt count_enum(const KnapsackInstance& inst) { return count_at_most(inst.weights, inst.capacity); }

BigInt count_enum_serial(const KnapsackInstance& inst) {
  check_enum_size(inst.size());
  const std::size_t h = inst.size() / 2;
  const std::span<const BigInt> w(inst.weights);
  const auto left = subset_sums(w.first(h));
  const auto right = subset_sums(w.subspan(h));
  unsigned long long total = 0;
  std::size_t j = right.size();
  for (const auto& a : left) {
    while (j > 0 && a + right[j - 1] > inst.capacity) --j;
    total += j;
  }
  return big_from_u64(total);
}

BigInt count_dp(const KnapsackInstance& inst) {
  if (!inst.capacity.fits_ulong_p() || inst.capacity.get_ui() > kDpLimit) {
    throw std::invalid_argument("count_dp limited to T <= 1e7");
  }
  const std::size_t t = inst.capacity.get_ui();
  auto run = [&](auto zero) {
    using Count = decltype(zero);
    std::vector<Count> exact(t + 1, zero);
    exact[0] = Count(1);
    for (const auto& wb : inst.weights) {
      const std::size_t w = wb.get_ui();
      for (std::size_t s = t; s >= w; --s) {
        exact[s] += exact[s - w];
        if (s == w) break;
      }
    }
    Count total = zero;
    for (const auto& c : exact) total += c;
    return total;
  };
  if (inst.size() <= 120) return u128_to_big(run(u128{0}));
  return run(BigInt(0));
}

BigInt count_band(const KnapsackInstance& inst, const BigInt& lo, const BigInt& hi) {
  if (lo >= hi) throw std::invalid_argument("count_band needs lo < hi");
  return count_at_most(inst.weights, hi) - count_at_most(inst.weights, lo);
}

double empirical_tv(std::span<const ItemSet> samples, const std::map<ItemSet, double>& target) {
  if (samples.empty()) throw std::invalid_argument("empirical_tv needs samples");
  std::map<ItemSet, std::size_t> freq;
  for (const auto& s : samples) {
    if (!target.contains(s)) throw std::invalid_argument("sample outside target support");
    ++freq[s];
  }
  const double n = static_cast<double>(samples.size());
  double sum = 0;
  for (const auto& [x, p] : target) {
    const auto it = freq.find(x);
    const double q = it == freq.end() ? 0.0 : static_cast<double>(it->second) / n;
    sum += std::abs(q - p);
  }
  return 0.5 * sum;
}

}  // namespace knapcount
