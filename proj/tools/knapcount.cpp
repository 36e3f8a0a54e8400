#include "knapcount/estimator.hpp"
#include "knapcount/oracle.hpp"
#include "knapcount/report.hpp"
#include "knapcount/verify.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace knapcount;

enum Exit : int { kOk = 0, kFail = 1, kUsage = 2, kInternal = 3 };

// Thrown for bad input that CLI11 cannot catch at parse time.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  AlgoParams params;
  std::string leaf = "auto";
  std::vector<CLI::Option*> options;

  void attach(CLI::App& app) {
    options = {
        app.add_option("--epsilon", params.epsilon, "relative error, in (0, 1/4]"),
        app.add_option("--bin-cap-exp", params.bin_cap_exp, "B = ceil(log^x) + 4"),
        app.add_option("--scale-exp", params.scale_exp, "log power in the level scales"),
        app.add_option("--delta-exp", params.delta_exp, "root delta (eps/n)^x"),
        app.add_option("--sample-exp", params.sample_exp, "sample multiplier 16 ceil(log)^x"),
        app.add_option("--slack-exp", params.slack_exp, "capacity slack divisor log^x"),
        app.add_option("--input-scale-exp", params.input_scale_exp, "input scaling bound (n/eps)^x"),
        app.add_option("--case-b-factor", params.case_b_factor, "small-items case threshold factor"),
        app.add_option("--dyer-c", params.dyer_c, "baseline grid constant"),
        app.add_flag("--theory", params.theory_mode, "use the literal polylog constants"),
        app.add_option("--leaf", leaf, "leaf variant")->check(CLI::IsMember({"auto", "dp", "cc"})),
        app.add_option("--time-budget-ms", params.time_budget_ms, "abort after this many ms; 0 disables"),
    };
  }

  bool any_given() const {
    return std::any_of(options.begin(), options.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }

  AlgoParams resolve(std::uint64_t seed) const {
    AlgoParams p = params;
    p.seed = seed;
    p.leaf_variant = leaf == "dp" ? LeafVariant::Dp : leaf == "cc" ? LeafVariant::Cc : LeafVariant::Auto;
    return p;
  }
};

KnapsackInstance read_instance(const std::string& path) {
  if (path == "-") return parse_instance(std::cin);
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return parse_instance(in);
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

std::string command_echo(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) out += ' ';
    out += argv[i];
  }
  return out;
}

EstimateReport exact_report(const std::string& algo, const KnapsackInstance& inst, std::uint64_t seed,
                            BigInt& exact) {
  exact = algo == "exact-enum" ? count_enum(inst) : count_dp(inst);
  EstimateReport rep;
  rep.algo = algo;
  rep.estimate = XReal::from_integer(exact);
  rep.seed = seed;
  rep.n = inst.size();
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate and exact counting of 0/1 knapsack solutions"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads; 0 keeps the runtime default")->envname("KNAPCOUNT_THREADS");

  // generate
  auto* gen = app.add_subcommand("generate", "write a random instance");
  std::string gen_kind = "uniform", gen_cap = "1000", gen_out = "-";
  GeneratorSpec spec;
  gen->add_option("--kind", gen_kind)->check(
      CLI::IsMember({"uniform", "bounded_ratio", "tiny_adversarial", "custom_classes"}));
  gen->add_option("--n", spec.n)->check(CLI::PositiveNumber);
  gen->add_option("--T", gen_cap, "capacity (decimal)");
  gen->add_option("--ell", spec.ell, "bounded_ratio: weights in (T/ell, 2T/ell]");
  gen->add_option("--classes", spec.classes, "custom_classes: class denominators")->delimiter(',');
  gen->add_option("--seed", spec.seed);
  gen->add_option("--out", gen_out, "output file, - for stdout");

  // count
  auto* cnt = app.add_subcommand("count", "estimate or count the solutions of an instance");
  std::string cnt_in = "-", cnt_algo = "subquad";
  std::uint64_t cnt_seed = 1;
  std::size_t repeats = 1;
  bool strict = false, with_timings = false;
  ParamFlags cnt_params;
  cnt->add_option("input", cnt_in, "instance file, - for stdin");
  cnt->add_option("--algo", cnt_algo)->check(CLI::IsMember({"subquad", "dyer", "exact-enum", "exact-dp"}));
  cnt->add_option("--seed", cnt_seed);
  cnt->add_option("--repeats", repeats, "report the median of this many runs")->check(CLI::PositiveNumber);
  cnt->add_flag("--strict", strict, "exit 1 when a run hits the time budget");
  cnt->add_flag("--timings", with_timings, "include per-stage wall-clock times");
  cnt_params.attach(*cnt);

  // verify
  auto* ver = app.add_subcommand("verify", "run a verification suite; CSV to stdout");
  std::string ver_suite = "all";
  VerifyOptions ver_opts;
  ver->add_option("--suite", ver_suite)->check(
      CLI::IsMember({"oracle", "conv", "sampler", "structure", "secondphase", "all"}));
  ver->add_option("--trials", ver_opts.trials)->check(CLI::PositiveNumber);
  ver->add_option("--seed", ver_opts.seed);

  // bench
  auto* bench = app.add_subcommand("bench", "stage timings on bounded-ratio instances; CSV to stdout");
  std::vector<std::size_t> sizes{1024, 4096, 16384};
  std::string bench_algo = "both";
  std::uint64_t bench_ell = 16, bench_seed = 1;
  ParamFlags bench_flags;
  bench->add_option("--sizes", sizes)->delimiter(',');
  bench->add_option("--algo", bench_algo)->check(CLI::IsMember({"subquad", "dyer", "both"}));
  bench->add_option("--ell", bench_ell);
  bench->add_option("--seed", bench_seed);
  bench_flags.attach(*bench);

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact counts; JSON to stdout");
  std::string orc_in = "-", orc_method = "enum";
  std::string band;
  orc->add_option("input", orc_in, "instance file, - for stdin");
  orc->add_option("--method", orc_method)->check(CLI::IsMember({"enum", "enum-serial", "dp"}));
  orc->add_option("--band", band, "lo,hi: count sets with weight in (lo, hi]");

  // conv-selftest
  auto* conv = app.add_subcommand("conv-selftest", "convolution self-test; CSV to stdout");
  VerifyOptions conv_opts;
  conv->add_option("--trials", conv_opts.trials)->check(CLI::PositiveNumber);
  conv->add_option("--seed", conv_opts.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  set_threads(threads);

  try {
    if (*gen) {
      spec.kind = parse_generator_kind(gen_kind);
      spec.capacity = BigInt(gen_cap);
      const std::string text = serialize_instance(generate(spec));
      if (gen_out == "-") {
        std::cout << text;
      } else {
        std::ofstream out(gen_out);
        if (!out) throw UsageError("cannot write " + gen_out);
        out << text;
      }
      return kOk;
    }

    if (*cnt) {
      const KnapsackInstance inst = read_instance(cnt_in);
      const AlgoParams params = cnt_params.resolve(cnt_seed);
      const bool exact = cnt_algo == "exact-enum" || cnt_algo == "exact-dp";
      if (!exact) params.validate(inst.size());
      std::vector<EstimateReport> runs;
      BigInt exact_value;
      const Rng base(cnt_seed);
      for (std::size_t r = 0; r < (exact ? 1 : repeats); ++r) {
        Rng rng = repeats == 1 ? base : base.split(r);
        if (exact) {
          runs.push_back(exact_report(cnt_algo, inst, cnt_seed, exact_value));
        } else if (cnt_algo == "dyer") {
          runs.push_back(estimate_dyer(inst, params, rng));
        } else {
          runs.push_back(estimate_subquadratic(inst, params, rng));
        }
      }
      std::vector<std::size_t> order(runs.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return runs[a].estimate < runs[b].estimate; });
      const EstimateReport& median = runs[order[(order.size() - 1) / 2]];
      nlohmann::json j = report_to_json(median);
      if (exact) j["estimate"] = exact_value.get_str();
      if (!with_timings) j["timings_ms"] = nlohmann::json::object();
      j["command"] = command_echo(argc, argv);
      j["instance_digest"] = instance_digest(inst);
      j["repeats"] = runs.size();
      if (runs.size() > 1) {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& r : runs) all.push_back(xreal_to_json(r.estimate));
        j["estimates"] = all;
      }
      std::cout << j.dump(2) << '\n';
      const bool timed_out = std::any_of(runs.begin(), runs.end(), [](const auto& r) { return r.timed_out; });
      if (timed_out) std::cerr << "time budget exceeded\n";
      return strict && timed_out ? kFail : kOk;
    }

    if (*ver) {
      const auto rows = run_suite(ver_suite, ver_opts);
      write_csv(std::cout, rows);
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const VerifyRow& r) { return !r.pass; });
      std::cerr << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size() << " rows pass\n";
      return failed == 0 ? kOk : kFail;
    }

    if (*bench) {
      AlgoParams params = bench_flags.any_given() ? bench_flags.resolve(bench_seed) : bench_params();
      params.seed = bench_seed;
      write_csv(std::cout, run_bench(sizes, bench_algo, params, bench_ell, bench_seed));
      return kOk;
    }

    if (*orc) {
      const KnapsackInstance inst = read_instance(orc_in);
      nlohmann::json j = {{"method", orc_method}, {"n", inst.size()}, {"instance_digest", instance_digest(inst)}};
      if (!band.empty()) {
        const auto comma = band.find(',');
        if (comma == std::string::npos) throw UsageError("--band expects lo,hi");
        BigInt lo, hi;
        if (lo.set_str(band.substr(0, comma), 10) != 0 || hi.set_str(band.substr(comma + 1), 10) != 0) {
          throw UsageError("--band expects two integers");
        }
        if (lo >= hi) throw UsageError("--band needs lo < hi");
        j["band"] = {lo.get_str(), hi.get_str()};
        j["count"] = count_band(inst, lo, hi).get_str();
      } else {
        const BigInt c = orc_method == "dp" ? count_dp(inst) : orc_method == "enum" ? count_enum(inst)
                                                                                    : count_enum_serial(inst);
        j["count"] = c.get_str();
      }
      std::cout << j.dump(2) << '\n';
      return kOk;
    }

    if (*conv) {
      const auto rows = run_suite("conv", conv_opts);
      write_csv(std::cout, rows);
      const bool ok = std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; });
      return ok ? kOk : kFail;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
