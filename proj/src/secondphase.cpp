#include "knapcount/secondphase.hpp"

#include "knapcount/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace knapcount {

namespace {

BigInt sum_of(std::span<const BigInt> v) {
  BigInt s = 0;
  for (const auto& x : v) s += x;
  return s;
}

struct RoundOutcome {
  XReal value;
  std::size_t draws = 0;
  double failure = 0.0;
  std::uint64_t overflow = 0;
};

// Solutions whose heaviest tiny item is the j-th heaviest.
RoundOutcome estimate_round(const std::vector<BigInt>& tiny, std::size_t j, const BigInt& rest,
                            std::span<const BigInt> candidates, const BigInt& capacity, std::size_t n,
                            double delta, const AlgoParams& params, Rng& rng) {
  RoundOutcome out;
  const std::size_t lighter = tiny.size() - j - 1;
  const BigInt low = capacity - tiny[j] - rest;
  std::vector<Candidate> kept;
  std::vector<BigInt> shifted;
  std::uint64_t absorbed = 0;
  for (const auto& w : candidates) {
    if (w > capacity - tiny[j]) continue;
    if (w + tiny[j] + rest <= capacity) {
      ++absorbed;
      continue;
    }
    shifted.push_back(w - low);
    kept.push_back({{kept.size()}, shifted.back()});
  }
  out.value = XReal::from_u64(absorbed).ldexp(static_cast<std::int64_t>(lighter));
  if (kept.empty()) return out;

  const std::size_t m = std::bit_ceil(lighter);
  const auto height = static_cast<std::size_t>(std::countr_zero(m));
  const double divisor = static_cast<double>(m) * params.log_pow(n);
  std::vector<BigInt> scales(height + 1);
  for (std::size_t h = 0; h <= height; ++h) scales[h] = level_scale(rest, static_cast<int>(h), divisor);
  const double leaf_delta = delta / (4.0 * std::pow(static_cast<double>(m), 3.0));

  // Tiny item ids are offsets past the candidate ids.
  const std::size_t base_id = kept.size();
  std::vector<Sampler> leaves(m, Sampler::neutral(scales[height]));
  for (std::size_t i = 0; i < lighter; ++i) {
    const Item it{base_id + i, tiny[j + 1 + i]};
    Rng r = rng.split(1, i);
    leaves[i] = leaf_dp_build(std::span<const Item>(&it, 1), scales[height], 1, leaf_delta, r);
  }
  Rng tree_rng = rng.split(2);
  const Sampler tree = build_tree(std::move(leaves), scales, tree_rng);
  Rng cand_rng = rng.split(3);
  const Sampler cands = nchoose1_build(kept, scales[0], cand_rng);
  Rng merge_rng = rng.split(4);
  const Sampler joint = merge_samplers(tree, cands, merge_rng);

  // Threshold t_j with the capacity slack, clipped to L.
  mpf_class slack(rest, 256);
  slack /= mpf_class(static_cast<double>(std::max<std::size_t>(lighter, 1)) * params.slack_pow(n), 256);
  const mpf_class top = ceil((mpf_class(rest, 256) + slack) / mpf_class(scales[0], 256));
  const BigInt t_big(top);
  const std::int64_t t = t_big > joint.length() ? joint.length() : big_to_i64(t_big);

  const double mult = params.sample_multiplier(n);
  const auto draws = static_cast<std::size_t>(std::ceil(mult / (params.epsilon * params.epsilon)));
  Rng draw_rng = rng.split(5);
  std::vector<QueryTask> tasks(draws);
  for (std::size_t d = 0; d < draws; ++d) tasks[d] = {t, draw_rng.split(d), {}, true};
  joint.query_batch(tasks);
  std::uint64_t hits = 0;
  for (const auto& task : tasks) {
    if (!task.ok || !task.result.candidate) continue;
    BigInt w = shifted[*task.result.candidate];
    for (const auto id : task.result.items) {
      if (id >= base_id) w += tiny[j + 1 + (id - base_id)];
    }
    if (w <= rest) ++hits;
  }
  XReal mass;
  const auto counts = joint.counts();
  for (std::int64_t x = 0; x <= t; ++x) mass += counts[static_cast<std::size_t>(x)];
  out.value += XReal::from_u64(hits) * mass / XReal::from_u64(draws);
  out.draws = draws;
  out.failure = joint.failure_bound();
  out.overflow = joint.overflow_events();
  return out;
}

}  // namespace

CleanupResult second_phase_cleanup(const SecondPhaseInstance& inst) {
  CleanupResult out;
  out.reduced = inst;
  out.reduced.candidate_weights.clear();
  const BigInt tiny_total = sum_of(inst.tiny_weights);
  std::uint64_t absorbed = 0;
  for (const auto& w : inst.candidate_weights) {
    if (w > inst.capacity) {
      ++out.removed;
    } else if (w + tiny_total <= inst.capacity) {
      ++absorbed;
    } else {
      out.reduced.candidate_weights.push_back(w);
    }
  }
  out.absorbed = absorbed;
  out.base = XReal::from_u64(absorbed).ldexp(static_cast<std::int64_t>(inst.tiny_weights.size()));
  return out;
}

std::size_t second_phase_rounds(const SecondPhaseInstance& inst) {
  const double lg = std::max(1.0, std::log2(static_cast<double>(std::max<std::size_t>(inst.n, 2))));
  const double arg = 100000.0 * static_cast<double>(inst.n) * lg * lg / inst.epsilon;
  const auto cap = static_cast<std::size_t>(std::ceil(std::log2(arg)));
  return std::min(inst.tiny_weights.size(), cap);
}

SecondPhaseReport second_phase_estimate(const SecondPhaseInstance& inst, const AlgoParams& params, Rng& rng) {
  if (!std::is_sorted(inst.tiny_weights.begin(), inst.tiny_weights.end(), std::greater<>())) {
    throw std::invalid_argument("tiny weights must be non-increasing");
  }
  const CleanupResult clean = second_phase_cleanup(inst);
  SecondPhaseReport rep;
  rep.removed = clean.removed;
  rep.absorbed = clean.absorbed;
  rep.retained = clean.reduced.candidate_weights.size();
  rep.value = clean.base + XReal::from_u64(rep.retained);
  rep.rounds = rep.retained == 0 ? 0 : second_phase_rounds(inst);
  rep.draws_per_round.assign(rep.rounds, 0);
  if (rep.rounds == 0) return rep;

  const auto& tiny = inst.tiny_weights;
  std::vector<BigInt> suffix(tiny.size() + 1, 0);
  for (std::size_t i = tiny.size(); i-- > 0;) suffix[i] = suffix[i + 1] + tiny[i];
  const double delta = params.root_delta(inst.n) / static_cast<double>(rep.rounds);
  std::vector<RoundOutcome> outcomes(rep.rounds);
  const Rng base = rng.split(0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < rep.rounds; ++j) {
    Rng r = base.split(j);
    outcomes[j] = estimate_round(tiny, j, suffix[j + 1], clean.reduced.candidate_weights, inst.capacity, inst.n,
                                 delta, params, r);
  }
  for (std::size_t j = 0; j < rep.rounds; ++j) {
    rep.value += outcomes[j].value;
    rep.draws_per_round[j] = outcomes[j].draws;
    rep.failure_bound += outcomes[j].failure;
    rep.overflow_events += outcomes[j].overflow;
  }
  rng = rng.split(1);
  return rep;
}

BigInt second_phase_exact(const SecondPhaseInstance& inst) {
  const std::size_t k = inst.tiny_weights.size();
  if (k > 24) throw std::invalid_argument("second_phase_exact supports at most 24 tiny items");
  std::vector<BigInt> sums(std::size_t{1} << k, 0);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    sums[mask] = sums[mask & (mask - 1)] + inst.tiny_weights[low];
  }
  std::sort(sums.begin(), sums.end());
  BigInt total = 0;
  for (const auto& w : inst.candidate_weights) {
    if (w > inst.capacity) continue;
    const BigInt room = inst.capacity - w;
    total += static_cast<unsigned long>(std::upper_bound(sums.begin(), sums.end(), room) - sums.begin());
  }
  return total;
}

}  // namespace knapcount
