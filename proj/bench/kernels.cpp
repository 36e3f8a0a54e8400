#include "knapcount/convolution.hpp"
#include "knapcount/estimator.hpp"
#include "knapcount/oracle.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace knapcount;

KnapsackInstance enum_instance(std::size_t n) {
  GeneratorSpec spec;
  spec.n = n;
  spec.capacity = BigInt(1000000);
  spec.seed = 11;
  return generate(spec);
}

void BM_CountEnum(benchmark::State& state) {
  const auto inst = enum_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(count_enum(inst));
}
BENCHMARK(BM_CountEnum)->Arg(18)->Arg(22)->Unit(benchmark::kMillisecond);

void BM_CountEnumSerial(benchmark::State& state) {
  const auto inst = enum_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(count_enum_serial(inst));
}
BENCHMARK(BM_CountEnumSerial)->Arg(18)->Arg(22)->Unit(benchmark::kMillisecond);

std::vector<BigInt> random_values(std::size_t len, std::size_t bits, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BigInt> out(len);
  for (auto& x : out) x = rng.below(pow2(bits));
  return out;
}

template <auto Conv>
void BM_Conv(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(len, 128, 1), b = random_values(len, 128, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Conv(a, b));
}
BENCHMARK(BM_Conv<conv_ntt>)->Name("BM_ConvNtt")->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv<conv_kronecker>)->Name("BM_ConvKronecker")->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv<conv_schoolbook>)->Name("BM_ConvSchoolbook")->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

// Root sampler of a bounded-ratio instance and its query threshold.
struct QueryFixture {
  PhaseOneOutput phase;
  std::int64_t capacity = 0;
};

const QueryFixture& query_fixture() {
  static const QueryFixture fx = [] {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::BoundedRatio;
    spec.n = 256;
    spec.ell = 8;
    spec.capacity = pow2(40);
    spec.seed = 5;
    AlgoParams params;
    params.bin_cap_exp = 0;
    params.scale_exp = 1;
    params.sample_exp = 0;
    const auto inst = scale_instance(generate(spec), params);
    Rng rng(9);
    QueryFixture out{phase_one(inst, params, rng), 0};
    out.capacity = std::min(out.phase.threshold, out.phase.root.length());
    return out;
  }();
  return fx;
}

void BM_QueryBatch(benchmark::State& state) {
  const auto& fx = query_fixture();
  const auto draws = static_cast<std::size_t>(state.range(0));
  const Rng base(3);
  for (auto _ : state) {
    std::vector<QueryTask> tasks(draws);
    for (std::size_t i = 0; i < draws; ++i) tasks[i] = {fx.capacity, base.split(i), {}, true};
    fx.phase.root.query_batch(tasks);
    benchmark::DoNotOptimize(tasks);
  }
}
BENCHMARK(BM_QueryBatch)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_QuerySingle(benchmark::State& state) {
  const auto& fx = query_fixture();
  const auto draws = static_cast<std::size_t>(state.range(0));
  const Rng base(3);
  for (auto _ : state) {
    for (std::size_t i = 0; i < draws; ++i) {
      Rng r = base.split(i);
      benchmark::DoNotOptimize(fx.phase.root.query_units(fx.capacity, r));
    }
  }
}
BENCHMARK(BM_QuerySingle)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
