#include "knapcount/verify.hpp"

#include "knapcount/convolution.hpp"
#include "knapcount/oracle.hpp"
#include "knapcount/report.hpp"
#include "knapcount/secondphase.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace knapcount {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string row_name(std::string_view base, std::size_t index) { return std::string(base) + "-" + std::to_string(index); }

// |a - b| <= tol * max(a, b).
bool close_relative(const XReal& a, const XReal& b, const XReal& tol) {
  const XReal& hi = a < b ? b : a;
  const XReal& lo = a < b ? a : b;
  return sub_nonneg(hi, lo) <= tol * hi;
}

std::vector<BigInt> random_big(Rng& rng, std::size_t len, std::size_t bits, bool sparse) {
  std::vector<BigInt> out(len);
  for (auto& x : out) {
    if (sparse && rng.below(3) == 0) continue;
    x = 1 + rng.below(pow2(1 + rng.below(bits)));
  }
  return out;
}

MonotoneArray random_monotone(Rng& rng, std::size_t n, std::int64_t bound) {
  MonotoneArray a;
  a.bound = bound;
  const std::size_t lead = rng.below(2) ? rng.below(n / 4 + 1) : 0;
  std::int64_t v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(bound / 4 + 1)));
  for (std::size_t i = 0; i < n; ++i) {
    if (i < lead) {
      a.entries.push_back(kNegInf);
      continue;
    }
    if (rng.below(4) == 0) v = std::min<std::int64_t>(bound, v + static_cast<std::int64_t>(rng.below(8)));
    a.entries.push_back(v);
  }
  return a;
}

std::vector<Item> items_of(std::span<const std::uint64_t> weights, std::size_t first_id = 0) {
  std::vector<Item> out;
  for (std::size_t i = 0; i < weights.size(); ++i) out.push_back({first_id + i, BigInt(static_cast<unsigned long>(weights[i]))});
  return out;
}

}  // namespace

VerifyRow check_conv_paths(Rng& rng, std::size_t index) {
  const std::size_t la = 1 + rng.below(512), lb = 1 + rng.below(512);
  const auto a = random_big(rng, la, 128, false);
  const auto b = random_big(rng, lb, 128, false);
  const auto s = conv_schoolbook(a, b);
  const bool ok = s == conv_ntt(a, b) && s == conv_kronecker(a, b) && s == conv_exact(a, b);
  return {"conv", row_name("paths", index), "ntt = kronecker = schoolbook", ok ? "equal" : "mismatch", ok};
}

VerifyRow check_sum_approx(Rng& rng, std::size_t index, std::size_t length, std::size_t bits, double delta) {
  const auto fi = random_big(rng, length, bits, true);
  const auto gi = random_big(rng, length, bits, true);
  std::vector<XReal> f, g;
  std::vector<BigInt> fe, ge;
  for (const auto& x : fi) {
    f.push_back(XReal::from_integer(x));
    fe.push_back(f.back().floor_integer());
  }
  for (const auto& x : gi) {
    g.push_back(XReal::from_integer(x));
    ge.push_back(g.back().floor_integer());
  }
  const auto exact = conv_exact(fe, ge);
  const auto h = prefix_sums(sum_approx_conv(f, g, delta, rng));
  BigInt acc = 0;
  double worst = 0.0;
  bool ok = h.size() == exact.size();
  const XReal tol = XReal::from_double(delta);
  for (std::size_t k = 0; ok && k < exact.size(); ++k) {
    acc += exact[k];
    const XReal e = XReal::from_integer(acc);
    if (e.is_zero()) {
      ok = h[k].is_zero();
      continue;
    }
    const XReal diff = h[k] < e ? sub_nonneg(e, h[k]) : sub_nonneg(h[k], e);
    worst = std::max(worst, (diff / e).to_double());
    if (diff > tol * e) ok = false;
  }
  return {"conv", row_name("sum-approx", index), "prefix rel err <= " + fmt(delta), fmt(worst), ok};
}

VerifyRow check_witness(Rng& rng, std::size_t index, std::size_t n, std::int64_t bound, std::uint64_t max_weight) {
  const auto a = random_monotone(rng, n, bound);
  const auto b = random_monotone(rng, n, bound);
  std::vector<XReal> u(n), v(n);
  for (auto& x : u) x = XReal::from_u64(rng.below(max_weight + 1));
  for (auto& x : v) x = XReal::from_u64(rng.below(max_weight + 1));
  const auto ref = maxplus_witness_ref(a, b, u, v);
  const auto fast = maxplus_witness_fast(a, b, u, v, rng);
  bool ok = ref.C == fast.C && ref.w.size() == fast.w.size();
  const XReal tol = XReal::pow2(-80);
  for (std::size_t k = 0; ok && k < ref.w.size(); ++k) ok = close_relative(ref.w[k], fast.w[k], tol);
  return {"conv", row_name("witness", index), "fast = reference", ok ? "equal" : "mismatch", ok};
}

std::vector<VerifyRow> check_rounding(std::uint64_t seed, std::size_t replays) {
  const std::vector<std::uint64_t> heavy{37, 58, 91};
  const std::vector<std::uint64_t> light{3, 7, 9};
  const BigInt scale = 10, coarse = 25;
  struct Built {
    std::vector<std::int64_t> units;  // w(X) / S per subset mask
    double sigma = 0.0;
    BigInt scale;
  };
  auto per_subset = [](const Sampler& s, std::span<const std::int64_t> per_item) {
    std::vector<std::int64_t> out(8, 0);
    for (std::size_t mask = 0; mask < 8; ++mask) {
      for (std::size_t i = 0; i < 3; ++i) {
        if (mask >> i & 1) out[mask] += per_item[i];
      }
    }
    (void)s;
    return out;
  };
  using Builder = std::function<Built(Rng&)>;
  const std::vector<std::pair<std::string, Builder>> ctors{
      {"leaf-dp",
       [&](Rng& r) {
         const auto s = leaf_dp_build(items_of(heavy), scale, 3, 0.01, r);
         return Built{per_subset(s, s.rounded_units()), s.sigma(), s.scale()};
       }},
      {"leaf-cc",
       [&](Rng& r) {
         const auto s = leaf_cc_build(items_of(heavy), scale, 3, 0.01, r);
         return Built{per_subset(s, s.rounded_units()), s.sigma(), s.scale()};
       }},
      {"small-items",
       [&](Rng& r) {
         const auto s = small_items_build(items_of(light), scale, 0.01, r);
         return Built{per_subset(s, s.rounded_units()), s.sigma(), s.scale()};
       }},
      {"round",
       [&](Rng& r) {
         const auto child = leaf_dp_build(items_of(heavy), scale, 3, 0.01, r);
         const auto s = round_sampler(child, coarse, r);
         auto units = per_subset(child, child.rounded_units());
         for (auto& u : units) u = s.alpha()[static_cast<std::size_t>(u)];
         return Built{units, s.sigma(), s.scale()};
       }},
  };
  std::vector<VerifyRow> rows;
  const Rng base(seed);
  for (std::size_t c = 0; c < ctors.size(); ++c) {
    const auto& weights = ctors[c].first == "small-items" ? light : heavy;
    std::vector<double> sum(8, 0.0);
    std::vector<std::size_t> far(8, 0);
    double sigma = 0.0;
    for (std::size_t r = 0; r < replays; ++r) {
      Rng rng = base.split(c, r);
      const Built b = ctors[c].second(rng);
      sigma = b.sigma;
      const double s = b.scale.get_d();
      for (std::size_t mask = 0; mask < 8; ++mask) {
        double exact = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          if (mask >> i & 1) exact += static_cast<double>(weights[i]);
        }
        const double w = static_cast<double>(b.units[mask]) * s;
        sum[mask] += w;
        if (std::fabs(w - exact) > 4.0 * sigma) ++far[mask];
      }
    }
    for (std::size_t mask = 0; mask < 8; ++mask) {
      double exact = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        if (mask >> i & 1) exact += static_cast<double>(weights[i]);
      }
      const double mean = sum[mask] / static_cast<double>(replays);
      const double tail = static_cast<double>(far[mask]) / static_cast<double>(replays);
      const double tol = 4.0 * sigma / std::sqrt(static_cast<double>(replays));
      const bool ok = std::fabs(mean - exact) <= tol && tail <= 0.01;
      rows.push_back({"sampler", "rounding-" + ctors[c].first + "-X" + std::to_string(mask),
                      "mean " + fmt(exact) + " +- " + fmt(tol) + ", tail <= 0.01",
                      "mean " + fmt(mean) + ", tail " + fmt(tail), ok});
    }
  }
  return rows;
}

std::vector<SamplerFixture> sampler_fixtures(std::uint64_t seed) {
  const Rng base(seed);
  Rng gen = base.split(0);
  auto weights = [&](std::size_t k) {
    std::vector<std::uint64_t> w(k);
    for (auto& x : w) x = 10 + gen.below(90);
    return w;
  };
  std::vector<SamplerFixture> out;
  {
    Rng r = base.split(1);
    const auto s = leaf_dp_build(items_of(weights(6)), 10, 4, 0.01, r);
    out.push_back({"leaf-dp", s, s.length() / 2});
  }
  {
    Rng r = base.split(2);
    const auto s = leaf_cc_build(items_of(weights(7)), 10, 3, 0.01, r);
    out.push_back({"leaf-cc", s, s.length() / 2});
  }
  {
    Rng r = base.split(3);
    const auto w = weights(7);
    const std::vector<std::pair<std::size_t, std::size_t>> parts{{0, 2}, {2, 4}, {4, 6}, {6, 7}};
    std::vector<Sampler> leaves;
    for (const auto& [lo, hi] : parts) {
      const std::span<const std::uint64_t> piece(w.data() + lo, hi - lo);
      leaves.push_back(leaf_dp_build(items_of(piece, lo), 8, 2, 1e-4, r));
    }
    const Sampler left = round_sampler(merge_samplers(leaves[0], leaves[1], r), 12, r);
    const Sampler right = round_sampler(merge_samplers(leaves[2], leaves[3], r), 12, r);
    const Sampler root = merge_samplers(left, right, r);
    out.push_back({"merge-tree", root, root.length() * 3 / 5});
  }
  return out;
}

std::vector<VerifyRow> check_uniformity(std::uint64_t seed, std::size_t queries) {
  std::vector<VerifyRow> rows;
  const Rng base(seed);
  for (const auto& fx : sampler_fixtures(seed)) {
    const auto support = fx.sampler.enumerate_support();
    std::map<ItemSet, double> target;
    double total = 0.0;
    for (const auto& e : support) {
      if (e.units <= fx.capacity) {
        target[e.items] += 1.0;
        total += 1.0;
      }
    }
    for (auto& [k, v] : target) v /= total;
    std::vector<ItemSet> samples;
    samples.reserve(queries);
    const Rng qrng = base.split(7, std::hash<std::string>{}(fx.name) & 0xffff);
    constexpr std::size_t kChunk = 1024;
    for (std::size_t lo = 0; lo < queries; lo += kChunk) {
      std::vector<QueryTask> tasks;
      for (std::size_t i = lo; i < std::min(queries, lo + kChunk); ++i) tasks.push_back({fx.capacity, qrng.split(i), {}, true});
      fx.sampler.query_batch(tasks);
      for (auto& t : tasks) {
        if (t.ok) samples.push_back(std::move(t.result.items));
      }
    }
    const double bound = 0.05 + 2.0 * fx.sampler.delta();
    const bool complete = samples.size() == queries;
    const double tv = samples.empty() ? 1.0 : empirical_tv(samples, target);
    rows.push_back({"sampler", "uniformity-" + fx.name, "TV <= " + fmt(bound) + " over " + fmt(total) + " sets",
                    "TV " + fmt(tv), complete && tv <= bound});
  }
  return rows;
}

std::vector<VerifyRow> check_count_fidelity(std::uint64_t seed) {
  std::vector<VerifyRow> rows;
  for (const auto& fx : sampler_fixtures(seed)) {
    std::size_t node = 0;
    auto visit = [&](const Sampler& s, const std::string& path, auto&& self) -> void {
      const auto support = s.enumerate_support();
      std::vector<std::uint64_t> hist(static_cast<std::size_t>(s.length() + 1), 0);
      for (const auto& e : support) ++hist[static_cast<std::size_t>(e.units)];
      const auto approx = prefix_sums(s.counts());
      const XReal tol = XReal::from_double(s.delta());
      std::uint64_t exact = 0;
      bool ok = true;
      double worst = 0.0;
      for (std::size_t x = 0; x < hist.size(); ++x) {
        exact += hist[x];
        const XReal e = XReal::from_u64(exact);
        if (e.is_zero()) {
          ok = ok && approx[x].is_zero();
          continue;
        }
        const XReal diff = approx[x] < e ? sub_nonneg(e, approx[x]) : sub_nonneg(approx[x], e);
        worst = std::max(worst, (diff / e).to_double());
        if (diff > tol * e) ok = false;
      }
      rows.push_back({"sampler", "fidelity-" + fx.name + "-" + path + "-" + to_string(s.kind()),
                      "prefix rel err <= " + fmt(s.delta()), fmt(worst), ok});
      ++node;
      for (std::size_t i = 0; i < s.num_children(); ++i) self(s.child(i), path + std::to_string(i), self);
    };
    visit(fx.sampler, "r", visit);
  }
  return rows;
}

std::vector<VerifyRow> check_structure(Rng& rng, std::size_t index, std::size_t max_n) {
  KnapsackInstance inst;
  do {
    GeneratorSpec spec;
    spec.n = 4 + rng.below(max_n - 3);
    spec.seed = rng();
    spec.capacity = BigInt(static_cast<unsigned long>(spec.n + rng.below(100000)));
    switch (rng.below(3)) {
      case 0: spec.kind = GeneratorKind::Uniform; break;
      case 1:
        spec.kind = GeneratorKind::BoundedRatio;
        spec.ell = std::uint64_t{1} << (1 + rng.below(3));
        spec.capacity += 100;
        break;
      default:
        spec.kind = GeneratorKind::CustomClasses;
        spec.classes = {2, 4, 8, 16};
        break;
    }
    inst = generate(spec);
  } while (inst.total_weight() <= inst.capacity);

  const std::size_t n = inst.size();
  const std::uint64_t ell = find_popular_ell(inst);
  const BigInt omega = count_enum(inst);
  const BigInt& t = inst.capacity;
  std::vector<VerifyRow> rows;
  std::ostringstream got;
  bool ok = true;
  BigInt omega1 = 0;
  for (unsigned d = 1; d <= 3; ++d) {
    const BigInt lo = t + floor_div(t * (d - 1), BigInt(static_cast<unsigned long>(ell)));
    const BigInt hi = t + floor_div(t * d, BigInt(static_cast<unsigned long>(ell)));
    const BigInt band = lo < hi ? count_band(inst, lo, hi) : BigInt(0);
    if (d == 1) omega1 = band;
    BigInt bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), n, d);
    bound *= omega;
    got << "d" << d << "=" << band.get_str() << "/" << bound.get_str() << " ";
    if (band > bound) ok = false;
  }
  const double lg = std::log2(static_cast<double>(n));
  const double coef = 15000.0 * static_cast<double>(n) * lg * lg / static_cast<double>(ell);
  const bool ok1 = omega1.get_d() <= coef * omega.get_d();
  got << "omega1=" << omega1.get_str() << " omega=" << omega.get_str();
  rows.push_back({"structure", row_name("bands", index),
                  "|Omega_d| <= n^d |Omega|, |Omega_1| <= " + fmt(coef) + " |Omega| (n=" + std::to_string(n) +
                      ", ell=" + std::to_string(ell) + ")",
                  got.str(), ok && ok1});
  const bool count_ok = popular_count_bound_holds(inst, ell);
  rows.push_back({"structure", row_name("ell-count", index), "popular class > ell / (8 log2 8n)",
                  std::to_string(popular_class_size(inst, ell)), count_ok});
  return rows;
}

VerifyRow check_second_phase(Rng& rng, std::size_t index, double epsilon) {
  SecondPhaseInstance in;
  in.epsilon = epsilon;
  in.n = 5 + rng.below(40);
  in.capacity = BigInt(static_cast<unsigned long>(100000 + rng.below(10000000)));
  const std::size_t k = rng.below(11), cands = 1 + rng.below(8);
  BigInt tiny_total = 0;
  const std::uint64_t tiny_max = 1 + rng.below(in.capacity.get_ui() / 100);
  for (std::size_t i = 0; i < k; ++i) {
    in.tiny_weights.push_back(BigInt(static_cast<unsigned long>(1 + rng.below(tiny_max))));
    tiny_total += in.tiny_weights.back();
  }
  std::sort(in.tiny_weights.begin(), in.tiny_weights.end(), std::greater<>());
  for (std::size_t i = 0; i < cands; ++i) {
    // Mostly inside (T - W_I0, T], with a few outside on either side.
    const BigInt lo = in.capacity - tiny_total - (tiny_total / 10 + 1);
    const BigInt span = tiny_total + tiny_total / 5 + 2;
    in.candidate_weights.push_back(lo + rng.below(span));
  }
  const AlgoParams params{.epsilon = epsilon};
  const BigInt exact = second_phase_exact(in);
  const SecondPhaseReport rep = second_phase_estimate(in, params, rng);
  const double lg = std::log2(static_cast<double>(in.n));
  const double additive =
      epsilon * static_cast<double>(cands) * std::ldexp(1.0, static_cast<int>(k)) / (90000.0 * static_cast<double>(in.n) * lg * lg);
  const double ex = exact.get_d(), got = rep.value.to_double();
  const bool ok = std::fabs(got - ex) <= epsilon / 6.0 * ex + additive;
  return {"secondphase", row_name("instance", index), exact.get_str() + " +- " + fmt(epsilon / 6.0 * ex + additive),
          fmt(got), ok};
}

KnapsackInstance accuracy_instance(std::uint64_t seed, std::size_t index) {
  Rng g = Rng(seed).split(index);
  GeneratorSpec spec;
  spec.n = static_cast<std::size_t>(g.between(5, 18));
  spec.seed = g();
  spec.capacity = BigInt(static_cast<long>(g.between(1000, 1000000)));
  switch (index % 3) {
    case 0: spec.kind = GeneratorKind::Uniform; break;
    case 1:
      spec.kind = GeneratorKind::BoundedRatio;
      spec.ell = std::uint64_t{1} << g.between(1, 3);
      break;
    default:
      spec.kind = GeneratorKind::TinyAdversarial;
      spec.capacity = pow2(60);
      break;
  }
  return generate(spec);
}

VerifyRow check_accuracy(std::string_view algo, const KnapsackInstance& inst, const AlgoParams& params,
                         std::uint64_t seed, std::size_t index) {
  Rng rng = Rng(seed).split(index);
  const EstimateReport rep = algo == "dyer" ? estimate_dyer(inst, params, rng) : estimate_subquadratic(inst, params, rng);
  const BigInt exact = count_enum(inst);
  const XReal e = XReal::from_integer(exact);
  const XReal diff = rep.estimate < e ? sub_nonneg(e, rep.estimate) : sub_nonneg(rep.estimate, e);
  const bool ok = diff <= XReal::from_double(params.epsilon) * e;
  return {std::string(algo), row_name("accuracy", index), exact.get_str(), rep.estimate.to_decimal(8), ok};
}

VerifyRow check_cross(std::size_t n, std::uint64_t ell, const AlgoParams& params, std::uint64_t seed,
                      std::size_t index) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::BoundedRatio;
  spec.n = n;
  spec.ell = ell;
  spec.capacity = BigInt(1000000000);
  spec.seed = Rng(seed).split(index)();
  const KnapsackInstance inst = generate(spec);
  Rng r1 = Rng(seed).split(index, 1);
  Rng r2 = Rng(seed).split(index, 2);
  const auto sub = estimate_subquadratic(inst, params, r1);
  const auto dyer = estimate_dyer(inst, params, r2);
  const double gap = std::fabs(sub.estimate.log2() - dyer.estimate.log2());
  const double bound = 2.0 * std::log2(1.0 + params.epsilon);
  return {"cross", row_name("n" + std::to_string(n) + "-ell" + std::to_string(ell), index),
          "|log2 ratio| <= " + fmt(bound),
          sub.estimate.to_decimal(8) + " vs " + dyer.estimate.to_decimal(8) + " (" + fmt(gap) + ")", gap <= bound};
}

namespace {

std::vector<VerifyRow> oracle_suite(const VerifyOptions& opts) {
  std::vector<VerifyRow> rows;
  Rng rng = Rng(opts.seed).split(1);
  for (std::size_t i = 0; i < opts.trials; ++i) {
    GeneratorSpec spec;
    spec.n = 1 + rng.below(12);
    spec.capacity = BigInt(static_cast<unsigned long>(spec.n + rng.below(200)));
    spec.seed = rng();
    const auto inst = generate(spec);
    const BigInt a = count_enum(inst), b = count_dp(inst), c = count_enum_serial(inst);
    rows.push_back({"oracle", row_name("dp-vs-enum", i), a.get_str(), b.get_str() + "/" + c.get_str(), a == b && a == c});
  }
  for (std::size_t i = 0; i < opts.trials; ++i) {
    GeneratorSpec spec;
    spec.n = 1 + rng.below(15);
    spec.capacity = BigInt(static_cast<unsigned long>(spec.n + rng.below(1000)));
    spec.seed = rng();
    const auto inst = generate(spec);
    const auto scaled = scale_instance(inst, AlgoParams{});
    const BigInt a = count_enum(inst), b = count_enum(scaled);
    rows.push_back({"oracle", row_name("scale-invariance", i), a.get_str(), b.get_str(), a == b});
  }
  return rows;
}

std::vector<VerifyRow> conv_suite(const VerifyOptions& opts) {
  std::vector<VerifyRow> rows;
  Rng rng = Rng(opts.seed).split(2);
  for (std::size_t i = 0; i < opts.trials; ++i) {
    const VerifyRow a = check_conv_paths(rng, i);
    const VerifyRow b = check_witness(rng, i);
    const VerifyRow c = check_sum_approx(rng, i);
    rows.push_back({"conv", row_name("trial", i), "paths equal, witness equal, sum-approx within 1e-4",
                    a.got + ", " + b.got + ", " + c.got, a.pass && b.pass && c.pass});
  }
  return rows;
}

std::vector<VerifyRow> sampler_suite(const VerifyOptions& opts) {
  auto rows = check_rounding(opts.seed, std::max<std::size_t>(1000, opts.trials * 1000));
  for (auto& r : check_uniformity(opts.seed, 100000)) rows.push_back(std::move(r));
  for (auto& r : check_count_fidelity(opts.seed)) rows.push_back(std::move(r));
  return rows;
}

std::vector<VerifyRow> structure_suite(const VerifyOptions& opts) {
  std::vector<VerifyRow> rows;
  Rng rng = Rng(opts.seed).split(4);
  for (std::size_t i = 0; i < opts.trials; ++i) {
    for (auto& r : check_structure(rng, i)) rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<VerifyRow> secondphase_suite(const VerifyOptions& opts) {
  std::vector<VerifyRow> rows;
  Rng rng = Rng(opts.seed).split(5);
  for (std::size_t i = 0; i < opts.trials; ++i) rows.push_back(check_second_phase(rng, i));
  return rows;
}

}  // namespace

bool is_suite(std::string_view suite) {
  return suite == "oracle" || suite == "conv" || suite == "sampler" || suite == "structure" ||
         suite == "secondphase" || suite == "all";
}

std::vector<VerifyRow> run_suite(std::string_view suite, const VerifyOptions& opts) {
  if (suite == "oracle") return oracle_suite(opts);
  if (suite == "conv") return conv_suite(opts);
  if (suite == "sampler") return sampler_suite(opts);
  if (suite == "structure") return structure_suite(opts);
  if (suite == "secondphase") return secondphase_suite(opts);
  if (suite == "all") {
    std::vector<VerifyRow> rows;
    for (const auto* s : {"oracle", "conv", "sampler", "structure", "secondphase"}) {
      for (auto& r : run_suite(s, opts)) rows.push_back(std::move(r));
    }
    return rows;
  }
  throw std::invalid_argument("unknown suite: " + std::string(suite));
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<VerifyRow>& rows) {
  out << "suite,case,expected,got,pass\n";
  for (const auto& r : rows) {
    out << csv_field(r.suite) << ',' << csv_field(r.name) << ',' << csv_field(r.expected) << ',' << csv_field(r.got)
        << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

AlgoParams bench_params() {
  AlgoParams p;
  p.bin_cap_exp = 0.0;
  p.scale_exp = 1.0;
  p.sample_exp = 0.0;
  return p;
}

bool dyer_feasible(std::size_t n, const AlgoParams& params, std::size_t max_entries) {
  if (n > 16000) return false;
  const double nd = static_cast<double>(n);
  const double k = std::max(1.0, std::ceil(params.dyer_c * std::sqrt(nd * std::log(std::max(nd, 1.0)))));
  const double entries = (nd + 1.0) * (2.0 * k * nd + k + 1.0);
  return entries <= static_cast<double>(max_entries);
}

std::vector<BenchRow> run_bench(std::span<const std::size_t> sizes, std::string_view algo, const AlgoParams& params,
                                std::uint64_t ell, std::uint64_t seed) {
  if (algo != "subquad" && algo != "dyer" && algo != "both") throw std::invalid_argument("unknown bench algo");
  std::vector<BenchRow> rows;
  for (const std::size_t n : sizes) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::BoundedRatio;
    spec.n = n;
    spec.ell = ell;
    spec.capacity = pow2(40);
    spec.seed = Rng(seed).split(n)();
    const KnapsackInstance inst = generate(spec);
    const std::string digest = instance_digest(inst).substr(0, 16);
    auto emit = [&](const std::string& name, const EstimateReport& rep, double total) {
      for (const auto& t : rep.timings) rows.push_back({n, name, digest, t.stage, t.ms});
      rows.push_back({n, name, digest, "total", total});
    };
    for (const std::string name : {"subquad", "dyer"}) {
      if (algo != "both" && algo != name) continue;
      if (name == "dyer" && !dyer_feasible(n, params)) {
        rows.push_back({n, name, digest, "skipped", 0.0});
        continue;
      }
      Rng rng = Rng(seed).split(n, name == "dyer" ? 2 : 1);
      const auto start = std::chrono::steady_clock::now();
      const EstimateReport rep = name == "dyer" ? estimate_dyer(inst, params, rng) : estimate_subquadratic(inst, params, rng);
      const double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      emit(name, rep, total);
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,algo,digest,stage,ms\n";
  for (const auto& r : rows) out << r.n << ',' << r.algo << ',' << r.digest << ',' << r.stage << ',' << fmt(r.ms) << '\n';
}

}  // namespace knapcount
