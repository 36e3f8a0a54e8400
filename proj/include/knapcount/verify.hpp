#pragma once

#include "knapcount/estimator.hpp"
#include "knapcount/instance.hpp"
#include "knapcount/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace knapcount {

struct VerifyRow {
  std::string suite;
  std::string name;
  std::string expected;
  std::string got;
  bool pass = false;
};

struct VerifyOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
};

// Conv paths agree on one random pair (length <= 512, values <= 2^128).
VerifyRow check_conv_paths(Rng& rng, std::size_t index);
// Every prefix sum of sum_approx_conv within (1 +- delta) of the exact one.
VerifyRow check_sum_approx(Rng& rng, std::size_t index, std::size_t length = 512, std::size_t bits = 200,
                           double delta = 1e-4);
// maxplus_witness_fast equals the reference: C exactly, w to 2^-80 relative.
VerifyRow check_witness(Rng& rng, std::size_t index, std::size_t n = 256, std::int64_t bound = 100,
                        std::uint64_t max_weight = 1u << 16);

// Per constructor and subset of a 3-item fixture: mean of w(X) within
// 4 sigma / sqrt(replays) of W_X and Pr[|w(X) - W_X| > 4 sigma] <= 0.01.
std::vector<VerifyRow> check_rounding(std::uint64_t seed, std::size_t replays);

// Fixture samplers with enumerable support: one leaf-DP, one leaf-CC and a
// two-level merge tree.
struct SamplerFixture {
  std::string name;
  Sampler sampler;
  std::int64_t capacity = 0;  // query capacity in units
};
std::vector<SamplerFixture> sampler_fixtures(std::uint64_t seed);

// TV between queries and the uniform distribution over the frozen support
// below the capacity; passes when TV <= 0.05 + 2 delta.
std::vector<VerifyRow> check_uniformity(std::uint64_t seed, std::size_t queries);
// Every node of the fixtures: f-hat prefix sums within (1 +- delta) of exact.
std::vector<VerifyRow> check_count_fidelity(std::uint64_t seed);

// Bands Omega_d for d <= 3 and the Omega_1 bound on one random instance with n <= max_n.
std::vector<VerifyRow> check_structure(Rng& rng, std::size_t index, std::size_t max_n = 16);

// One random second-phase instance (|I0| <= 10, N <= 8).
VerifyRow check_second_phase(Rng& rng, std::size_t index, double epsilon = 0.25);

// Random instance for the accuracy suites: uniform, bounded-ratio and
// tiny-adversarial in turn, n in [5, 18].
KnapsackInstance accuracy_instance(std::uint64_t seed, std::size_t index);

// Estimate within (1 +- eps) of count_enum.
VerifyRow check_accuracy(std::string_view algo, const KnapsackInstance& inst, const AlgoParams& params,
                         std::uint64_t seed, std::size_t index);

// Dyer and sub-quadratic estimates within a factor (1 + eps)^2 on a
// bounded-ratio instance.
VerifyRow check_cross(std::size_t n, std::uint64_t ell, const AlgoParams& params, std::uint64_t seed,
                      std::size_t index);

// Runs a named suite: oracle, conv, sampler, structure, secondphase or all.
std::vector<VerifyRow> run_suite(std::string_view suite, const VerifyOptions& opts);
bool is_suite(std::string_view suite);

void write_csv(std::ostream& out, const std::vector<VerifyRow>& rows);

struct BenchRow {
  std::size_t n = 0;
  std::string algo;
  std::string digest;
  std::string stage;
  double ms = 0.0;
};

// Defaults for the benchmark: B = 5, P = log(n/eps), sample multiplier 16.
AlgoParams bench_params();

// Whether the baseline's table fits in the given number of entries.
bool dyer_feasible(std::size_t n, const AlgoParams& params, std::size_t max_entries = std::size_t{1} << 27);

// Bounded-ratio instances per size; algo is subquad, dyer or both.
std::vector<BenchRow> run_bench(std::span<const std::size_t> sizes, std::string_view algo, const AlgoParams& params,
                                std::uint64_t ell, std::uint64_t seed);

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace knapcount
