// One [PASS]/[FAIL] line per acceptance criterion; exit status 1 if any fail.
#include "knapcount/convolution.hpp"
#include "knapcount/estimator.hpp"
#include "knapcount/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace knapcount;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::size_t passed(const std::vector<VerifyRow>& rows) {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; }));
}

std::string ratio(std::size_t ok, std::size_t total) { return std::to_string(ok) + "/" + std::to_string(total); }

void log_failures(const std::vector<VerifyRow>& rows) {
  for (const auto& r : rows) {
    if (!r.pass) std::cerr << "  " << r.suite << " " << r.name << ": expected " << r.expected << ", got " << r.got << '\n';
  }
}

Verdict accuracy(std::string_view algo) {
  constexpr std::size_t kRuns = 200;
  AlgoParams params;
  params.epsilon = 0.25;
  const auto start = std::chrono::steady_clock::now();
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < kRuns; ++i) rows.push_back(check_accuracy(algo, accuracy_instance(1, i), params, 1, i));
  const double secs = seconds_since(start);
  const std::size_t ok = passed(rows);
  char buf[64];
  std::snprintf(buf, sizeof buf, " in %.1fs", secs);
  return {ok * 4 >= kRuns * 3 && secs < 600.0, ratio(ok, kRuns) + " within (1 +- eps)" + buf};
}

Verdict sum_approx() {
  Rng rng(11);
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < 100; ++i) rows.push_back(check_sum_approx(rng, i, 512, 200, 1e-4));
  log_failures(rows);
  return {passed(rows) >= 99, ratio(passed(rows), 100) + " trials"};
}

Verdict witness() {
  Rng rng(12);
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < 100; ++i) rows.push_back(check_witness(rng, i, 256, 100, 1u << 16));
  log_failures(rows);
  return {passed(rows) == 100, ratio(passed(rows), 100) + " instances"};
}

Verdict all_rows(const std::vector<VerifyRow>& rows, const std::string& what) {
  log_failures(rows);
  return {passed(rows) == rows.size() && !rows.empty(), ratio(passed(rows), rows.size()) + " " + what};
}

Verdict structure() {
  Rng rng(13);
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < 100; ++i) rows.push_back(check_structure(rng, i, 16).front());
  return all_rows(rows, "instances");
}

Verdict second_phase() {
  Rng rng(14);
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < 100; ++i) rows.push_back(check_second_phase(rng, i, 0.25));
  log_failures(rows);
  return {passed(rows) >= 90, ratio(passed(rows), 100) + " instances"};
}

Verdict cross() {
  AlgoParams params;
  params.epsilon = 0.25;
  const std::uint64_t ells[] = {4, 8, 16, 32};
  std::vector<VerifyRow> rows;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < 20; ++i) {
    rows.push_back(check_cross(200, ells[i % 4], params, 15, i));
    std::cerr << "  " << rows.back().name << ": " << rows.back().got << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, " seeds in %.1fs", seconds_since(start));
  return {passed(rows) >= 16, ratio(passed(rows), 20) + buf};
}

Verdict bench() {
  const std::vector<std::size_t> sizes{1024, 4096, 16384};
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_bench(sizes, "both", bench_params(), 16, 1);
  bool ok = true;
  for (const auto n : sizes) {
    const bool timed = std::any_of(rows.begin(), rows.end(), [&](const BenchRow& r) {
      return r.n == n && r.algo == "subquad" && r.stage == "total";
    });
    ok = ok && timed;
  }
  write_csv(std::cerr, rows);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu rows in %.1fs", rows.size(), seconds_since(start));
  return {ok, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 oracle accuracy (sub-quadratic)", [] { return accuracy("subquad"); }},
      {"2 oracle accuracy (baseline)", [] { return accuracy("dyer"); }},
      {"3 sum-approximation convolution", sum_approx},
      {"4 weighted max-plus witness", witness},
      {"5 rounding unbiasedness and concentration", [] { return all_rows(check_rounding(16, 100000), "rows"); }},
      {"6 sampler uniformity", [] { return all_rows(check_uniformity(17, 100000), "fixtures"); }},
      {"7 count-function fidelity", [] { return all_rows(check_count_fidelity(17), "nodes"); }},
      {"8 structural inequalities", structure},
      {"9 second-phase hybrid error", second_phase},
      {"10 cross-estimator consistency at n = 200", cross},
      {"11 benchmark stage timings", bench},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << name << ": " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
