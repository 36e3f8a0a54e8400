#include "knapcount/estimator.hpp"

#include "knapcount/secondphase.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace knapcount {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::size_t ceil_log2(std::size_t x) { return x <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(x - 1)); }

BigInt ceil_mpf(const mpf_class& v) {
  const mpf_class c = ceil(v);
  return BigInt(c);
}

}  // namespace

Deadline::Deadline(double budget_ms) {
  if (budget_ms > 0) {
    active_ = true;
    end_ = Clock::now() + std::chrono::microseconds(static_cast<std::int64_t>(budget_ms * 1000.0));
  }
}

bool Deadline::expired() const { return active_ && Clock::now() >= end_; }

std::size_t split_index(const KnapsackInstance& inst) {
  BigInt prefix = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    prefix += inst.weights[i];
    if (2 * prefix >= inst.capacity) return i + 1;
  }
  return inst.size();
}

namespace {

// Items j <= i* in (T/ell, 2T/ell]: count and total weight.
std::pair<std::size_t, BigInt> popular_class(const KnapsackInstance& inst, std::uint64_t ell) {
  const std::size_t istar = split_index(inst);
  std::size_t count = 0;
  BigInt weight = 0;
  for (std::size_t j = 0; j < istar; ++j) {
    const BigInt scaled = inst.weights[j] * static_cast<unsigned long>(ell);
    if (scaled > inst.capacity && scaled <= 2 * inst.capacity) {
      ++count;
      weight += inst.weights[j];
    }
  }
  return {count, weight};
}

}  // namespace

std::size_t popular_class_size(const KnapsackInstance& inst, std::uint64_t ell) { return popular_class(inst, ell).first; }

std::uint64_t find_popular_ell(const KnapsackInstance& inst) {
  if (inst.total_weight() <= inst.capacity) throw std::invalid_argument("find_popular_ell needs sum W > T");
  const std::size_t top = ceil_log2(4 * inst.size());
  std::uint64_t best = 0;
  BigInt best_weight = 0;
  for (std::size_t e = 1; e <= top; ++e) {
    const std::uint64_t ell = std::uint64_t{1} << e;
    const BigInt w = popular_class(inst, ell).second;
    if (w > best_weight) {
      best = ell;
      best_weight = w;
    }
  }
  if (best == 0) throw std::logic_error("no popular weight class");
  return best;
}

bool popular_count_bound_holds(const KnapsackInstance& inst, std::uint64_t ell) {
  const double bound = static_cast<double>(ell) / (8.0 * std::log2(8.0 * static_cast<double>(inst.size())));
  return static_cast<double>(popular_class_size(inst, ell)) > bound;
}

WeightClassPartition partition_classes(const KnapsackInstance& inst) {
  WeightClassPartition out;
  out.g = ceil_log2(inst.size());
  for (std::size_t j = 1; j <= out.g; ++j) out.classes.push_back({std::uint64_t{1} << j, false, {}});
  out.classes.push_back({std::uint64_t{1} << (out.g + 1), true, {}});
  const BigInt& t = inst.capacity;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const BigInt& w = inst.weights[i];
    // Smallest j >= 1 with W > T/2^j, i.e. W * 2^j > T.
    std::size_t j = 1;
    while (j <= out.g && (w << static_cast<mp_bitcnt_t>(j)) <= t) ++j;
    out.classes[j - 1].items.push_back(i);
  }
  return out;
}

BigInt root_scale(const KnapsackInstance& inst, std::uint64_t ell, const AlgoParams& params) {
  return level_scale(inst.capacity, 0, static_cast<double>(ell) * params.log_pow(inst.size()));
}

Sampler build_class_sampler(const KnapsackInstance& inst, const WeightClass& cls, std::uint64_t ell, double delta,
                            const AlgoParams& params, Rng& rng, ClassBuildInfo* info) {
  if (!std::has_single_bit(cls.m)) throw std::invalid_argument("class denominator must be a power of two");
  const std::size_t n = inst.size();
  const double divisor = static_cast<double>(ell) * params.log_pow(n);
  const auto height = static_cast<std::size_t>(std::countr_zero(cls.m));
  std::vector<BigInt> scales(height + 1);
  for (std::size_t h = 0; h <= height; ++h) scales[h] = level_scale(inst.capacity, static_cast<int>(h), divisor);

  std::vector<Item> items;
  BigInt heaviest = 0;
  for (const auto i : cls.items) {
    items.push_back({i, inst.weights[i]});
    if (inst.weights[i] > heaviest) heaviest = inst.weights[i];
  }
  ClassBuildInfo local{cls.m, items.size(), false, LeafVariant::Dp, 0, delta};
  if (items.empty()) {
    if (info) *info = local;
    return Sampler::neutral(scales[0]);
  }

  const bool case_b =
      static_cast<double>(cls.m) >= params.case_b_threshold(n, ell) && heaviest <= scales[height];
  if (case_b) {
    local.small_items_case = true;
    Rng r = rng.split(1);
    const Sampler small = small_items_build(items, scales[height], delta, r);
    Rng rr = rng.split(2);
    if (info) *info = local;
    return round_sampler(small, scales[0], rr);
  }

  LeafVariant variant = params.leaf_variant;
  if (variant == LeafVariant::Auto) {
    variant = static_cast<double>(ell) <= std::sqrt(static_cast<double>(n)) ? LeafVariant::Dp : LeafVariant::Cc;
  }
  local.variant = variant;
  const std::size_t cap = params.bin_cap(n);
  const double leaf_delta = delta / std::pow(static_cast<double>(cls.m), 3.0);

  std::vector<std::vector<Item>> bins(cls.m);
  Rng hash = rng.split(0);
  for (const auto& it : items) bins[hash.below(cls.m)].push_back(it);
  std::vector<Sampler> leaves(cls.m);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < cls.m; ++b) {
    Rng r = rng.split(1, b);
    leaves[b] = variant == LeafVariant::Cc ? leaf_cc_build(bins[b], scales[height], cap, leaf_delta, r)
                                           : leaf_dp_build(bins[b], scales[height], cap, leaf_delta, r);
  }
  for (const auto& b : bins) local.nonempty_bins += b.empty() ? 0 : 1;
  Rng tree_rng = rng.split(2);
  if (info) *info = local;
  return build_tree(std::move(leaves), scales, tree_rng);
}

Sampler build_global_sampler(std::span<const Sampler> classes, Rng& rng) {
  if (classes.empty()) throw std::invalid_argument("global sampler needs at least one class");
  Sampler acc = classes.front();
  for (std::size_t i = 1; i < classes.size(); ++i) {
    Rng r = rng.split(i);
    acc = merge_samplers(acc, classes[i], r);
  }
  return acc;
}

std::vector<double> class_delta_budget(std::size_t k, double delta) {
  std::vector<double> out(k);
  if (k == 0) return out;
  const double kd = static_cast<double>(k);
  out[0] = delta / (kd * std::pow(4.0, kd - 1.0));
  for (std::size_t i = 1; i < k; ++i) out[i] = delta / (kd * std::pow(4.0, kd - static_cast<double>(i)));
  return out;
}

PhaseOneOutput phase_one(const KnapsackInstance& inst, const AlgoParams& params, Rng& rng, const Deadline* deadline) {
  PhaseOneOutput out;
  const std::size_t n = inst.size();
  auto start = Clock::now();
  out.ell = find_popular_ell(inst);
  const WeightClassPartition part = partition_classes(inst);
  std::vector<const WeightClass*> live;
  for (const auto& c : part.classes) {
    if (!c.items.empty()) live.push_back(&c);
  }
  const auto budget = class_delta_budget(live.size(), params.root_delta(n));
  std::vector<Sampler> samplers(live.size());
  out.classes.resize(live.size());
  const Rng class_rng = rng.split(1);
  for (std::size_t i = 0; i < live.size(); ++i) {
    Rng r = class_rng.split(live[i]->m);
    samplers[i] = build_class_sampler(inst, *live[i], out.ell, budget[i], params, r, &out.classes[i]);
  }
  out.timings.push_back({"build_classes", ms_since(start)});
  if (deadline && deadline->expired()) {
    out.timed_out = true;
    return out;
  }

  start = Clock::now();
  Rng merge_rng = rng.split(2);
  out.root = build_global_sampler(samplers, merge_rng);
  out.timings.push_back({"merge_classes", ms_since(start)});
  if (deadline && deadline->expired()) {
    out.timed_out = true;
    return out;
  }

  start = Clock::now();
  out.scale = out.root.scale();
  out.root_length = out.root.length();
  out.root_delta = out.root.delta();
  out.tiny = out.root.tiny_items();
  const BigInt& t_cap = inst.capacity;
  mpf_class slack(t_cap, 256);
  slack /= mpf_class(static_cast<double>(out.ell) * params.slack_pow(n), 256);
  const BigInt t_big = ceil_mpf((mpf_class(t_cap, 256) + slack) / mpf_class(out.scale, 256));
  out.threshold = big_to_i64(t_big);
  const std::int64_t clipped = std::min(out.threshold, out.root_length);
  const auto counts = out.root.counts();
  for (std::int64_t x = 0; x <= clipped; ++x) out.omega_prime += counts[static_cast<std::size_t>(x)];

  const double mult = params.sample_multiplier(n);
  const auto draws = static_cast<std::size_t>(
      std::ceil(mult * static_cast<double>(n) / (static_cast<double>(out.ell) * params.epsilon * params.epsilon)));
  out.samples.resize(draws);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (draws + kChunk - 1) / kChunk;
  const Rng draw_rng = rng.split(3);
  bool late = false;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < chunks; ++c) {
    if (deadline && deadline->expired()) {
#pragma omp atomic write
      late = true;
      continue;
    }
    const std::size_t lo = c * kChunk, hi = std::min(draws, lo + kChunk);
    std::vector<QueryTask> tasks(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) tasks[i - lo] = {clipped, draw_rng.split(i), {}, true};
    out.root.query_batch(tasks);
    for (std::size_t i = lo; i < hi; ++i) {
      auto& s = out.samples[i];
      s.items = std::move(tasks[i - lo].result.items);
      s.weight = 0;
      for (const auto id : s.items) s.weight += inst.weights[id];
    }
  }
  out.timed_out = late;
  out.failure_bound = out.root.failure_bound();
  out.overflow_events = out.root.overflow_events();
  out.timings.push_back({"sample", ms_since(start)});
  return out;
}

EstimateReport estimate_subquadratic(const KnapsackInstance& inst, const AlgoParams& params, Rng& rng) {
  EstimateReport rep;
  rep.algo = "subquad";
  rep.epsilon = params.epsilon;
  rep.seed = rng.seed();
  rep.n = inst.size();
  params.validate(inst.size());
  const Deadline deadline(params.time_budget_ms);
  if (inst.total_weight() <= inst.capacity) {
    rep.exact_shortcut = true;
    rep.estimate = XReal::pow2(static_cast<std::int64_t>(inst.size()));
    return rep;
  }
  auto start = Clock::now();
  const KnapsackInstance scaled = scale_instance(inst, params);
  rep.timings.push_back({"scale", ms_since(start)});

  Rng phase_rng = rng.split(1);
  PhaseOneOutput p1 = phase_one(scaled, params, phase_rng, &deadline);
  rep.timings.insert(rep.timings.end(), p1.timings.begin(), p1.timings.end());
  rep.ell = p1.ell;
  rep.classes = p1.classes;
  rep.tiny_items = p1.tiny.size();
  rep.samples = p1.samples.size();
  rep.root_length = p1.root_length;
  rep.root_delta = p1.root_delta;
  rep.failure_bound = p1.failure_bound;
  rep.overflow_events = p1.overflow_events;
  if (p1.timed_out) {
    rep.timed_out = true;
    return rep;
  }

  start = Clock::now();
  SecondPhaseInstance sp;
  for (const auto i : p1.tiny) sp.tiny_weights.push_back(scaled.weights[i]);
  std::sort(sp.tiny_weights.begin(), sp.tiny_weights.end(), std::greater<>());
  for (const auto& s : p1.samples) sp.candidate_weights.push_back(s.weight);
  sp.capacity = scaled.capacity;
  sp.epsilon = params.epsilon;
  sp.n = scaled.size();
  Rng second_rng = rng.split(2);
  const SecondPhaseReport sr = second_phase_estimate(sp, params, second_rng);
  rep.second_phase_draws = sr.draws_per_round;
  rep.failure_bound += sr.failure_bound;
  rep.overflow_events += sr.overflow_events;
  rep.timings.push_back({"second_phase", ms_since(start)});
  if (deadline.expired()) {
    rep.timed_out = true;
    return rep;
  }
  const XReal denom = XReal::from_u64(p1.samples.size()).ldexp(static_cast<std::int64_t>(p1.tiny.size()));
  rep.estimate = p1.omega_prime * sr.value / denom;
  return rep;
}

namespace {

template <class Real>
void dyer_run(const KnapsackInstance& inst, const std::vector<std::int64_t>& units, std::int64_t cap,
              std::size_t draws, const Rng& draw_rng, EstimateReport& rep) {
  const std::size_t n = inst.size();
  const auto cols = static_cast<std::size_t>(cap + 1);
  std::vector<Real> table((n + 1) * cols);
  auto at = [&](std::size_t i, std::int64_t c) -> Real& { return table[i * cols + static_cast<std::size_t>(c)]; };
  for (std::int64_t c = 0; c <= cap; ++c) at(0, c) = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::int64_t u = units[i - 1];
    for (std::int64_t c = 0; c <= cap; ++c) at(i, c) = at(i - 1, c) + (c >= u ? at(i - 1, c - u) : Real(0));
  }
  std::uint64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::size_t d = 0; d < draws; ++d) {
    Rng r = draw_rng.split(d);
    std::int64_t c = cap;
    BigInt w = 0;
    for (std::size_t i = n; i >= 1; --i) {
      const std::int64_t u = units[i - 1];
      if (c < u) continue;
      const Real take = at(i - 1, c - u);
      if (static_cast<Real>(r.uniform()) * at(i, c) < take) {
        c -= u;
        w += inst.weights[i - 1];
      }
    }
    if (w <= inst.capacity) ++hits;
  }
  rep.hits = hits;
  const auto total = static_cast<long double>(at(n, cap));
  int e = 0;
  const long double fr = std::frexp(total, &e);
  const XReal omega = XReal::from_scaled(static_cast<std::uint64_t>(std::ldexp(fr, 64)), e - 64);
  rep.estimate = omega * XReal::from_u64(hits) / XReal::from_u64(draws);
}

}  // namespace

EstimateReport estimate_dyer(const KnapsackInstance& inst, const AlgoParams& params, Rng& rng) {
  EstimateReport rep;
  rep.algo = "dyer";
  rep.epsilon = params.epsilon;
  rep.seed = rng.seed();
  rep.n = inst.size();
  params.validate(inst.size());
  const std::size_t n = inst.size();
  if (inst.total_weight() <= inst.capacity) {
    rep.exact_shortcut = true;
    rep.estimate = XReal::pow2(static_cast<std::int64_t>(n));
    return rep;
  }
  if (n > 16000) throw std::invalid_argument("Dyer baseline supports n <= 16000");
  auto start = Clock::now();
  const double nd = static_cast<double>(n);
  const auto k = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(params.dyer_c * std::sqrt(nd * std::log(nd)))));
  const std::uint64_t grid = 2 * k * n;  // T maps to grid units
  rep.dyer_k = k;
  Rng round_rng = rng.split(1);
  std::vector<std::int64_t> units(n);
  for (std::size_t i = 0; i < n; ++i) {
    BigInt q, r;
    const BigInt scaled = inst.weights[i] * static_cast<unsigned long>(grid);
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled.get_mpz_t(), inst.capacity.get_mpz_t());
    units[i] = big_to_i64(q);
    if (sgn(r) != 0 && round_rng.below(inst.capacity) < r) ++units[i];
  }
  const auto cap = static_cast<std::int64_t>(grid + k);
  rep.dyer_capacity = cap;
  rep.timings.push_back({"round", ms_since(start)});

  start = Clock::now();
  const double mult = params.sample_multiplier(n);
  const auto draws = static_cast<std::size_t>(std::ceil(mult * nd / (params.epsilon * params.epsilon)));
  rep.samples = draws;
  const Rng draw_rng = rng.split(2);
  if (n < 1000) dyer_run<double>(inst, units, cap, draws, draw_rng, rep);
  else dyer_run<long double>(inst, units, cap, draws, draw_rng, rep);
  rep.timings.push_back({"count_and_sample", ms_since(start)});
  return rep;
}

}  // namespace knapcount
