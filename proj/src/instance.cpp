#include "knapcount/instance.hpp"

#include "knapcount/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace knapcount {

BigInt KnapsackInstance::total_weight() const {
  BigInt s = 0;
  for (const auto& w : weights) s += w;
  return s;
}

KnapsackInstance make_instance(std::vector<BigInt> weights, BigInt capacity) {
  using C = ParseError::Code;
  if (sgn(capacity) <= 0) throw ParseError(C::NonPositiveCapacity, "capacity must be positive");
  for (const auto& w : weights) {
    if (sgn(w) <= 0) throw ParseError(C::NonPositiveWeight, "weight must be positive: " + w.get_str());
    if (w > capacity) throw ParseError(C::WeightExceedsCapacity, "weight exceeds capacity: " + w.get_str());
  }
  std::sort(weights.begin(), weights.end());
  return {std::move(weights), std::move(capacity)};
}

namespace {

bool is_decimal(const std::string& tok) {
  std::size_t i = (!tok.empty() && (tok[0] == '-' || tok[0] == '+')) ? 1 : 0;
  if (i == tok.size()) return false;
  return std::all_of(tok.begin() + static_cast<std::ptrdiff_t>(i), tok.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

BigInt parse_decimal(const std::string& tok) {
  if (!is_decimal(tok)) throw ParseError(ParseError::Code::Malformed, "malformed token: '" + tok + "'");
  return BigInt(tok[0] == '+' ? tok.substr(1) : tok, 10);
}

}  // namespace

KnapsackInstance parse_instance(std::istream& in) {
  using C = ParseError::Code;
  std::string tok;
  if (!(in >> tok)) throw ParseError(C::Malformed, "missing item count");
  const BigInt n = parse_decimal(tok);
  if (sgn(n) < 0 || !n.fits_ulong_p()) throw ParseError(C::Malformed, "invalid item count");
  if (!(in >> tok)) throw ParseError(C::Malformed, "missing capacity");
  BigInt capacity = parse_decimal(tok);
  if (sgn(capacity) <= 0) throw ParseError(C::NonPositiveCapacity, "capacity must be positive");
  std::vector<BigInt> weights;
  while (in >> tok) weights.push_back(parse_decimal(tok));
  if (weights.size() != n.get_ui()) {
    throw ParseError(C::CountMismatch, "expected " + n.get_str() + " weights, found " + std::to_string(weights.size()));
  }
  return make_instance(std::move(weights), std::move(capacity));
}

KnapsackInstance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

std::string serialize_instance(const KnapsackInstance& inst) {
  std::string out = std::to_string(inst.size()) + " " + inst.capacity.get_str() + "\n";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (i) out += ' ';
    out += inst.weights[i].get_str();
  }
  out += '\n';
  return out;
}

void AlgoParams::validate(std::size_t n) const {
  if (theory_mode) {
    const double lo = std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -1.5);
    if (!(epsilon > lo && epsilon <= 1e-4)) throw std::invalid_argument("theory mode requires n^-1.5 < epsilon <= 1e-4");
  } else if (!(epsilon > 0 && epsilon <= 0.25)) {
    throw std::invalid_argument("epsilon must lie in (0, 1/4]");
  }
  for (double x : {bin_cap_exp, scale_exp, delta_exp, sample_exp, slack_exp, input_scale_exp}) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("polylog exponents must be finite and nonnegative");
  }
  if (!(case_b_factor > 0) || !(dyer_c > 0)) throw std::invalid_argument("constants must be positive");
}

double AlgoParams::log_term(std::size_t n) const {
  return std::max(1.0, std::log2(static_cast<double>(std::max<std::size_t>(n, 1)) / epsilon));
}

std::size_t AlgoParams::bin_cap(std::size_t n) const {
  const double l = log_term(n);
  if (theory_mode) return static_cast<std::size_t>(std::ceil(std::pow(l, 10.0)));
  return static_cast<std::size_t>(std::ceil(std::pow(l, bin_cap_exp))) + 4;
}

double AlgoParams::log_pow(std::size_t n) const {
  return std::max(1.0, std::pow(log_term(n), theory_mode ? 50.0 : scale_exp));
}

double AlgoParams::root_delta(std::size_t n) const {
  const double r = epsilon / static_cast<double>(std::max<std::size_t>(n, 1));
  return std::pow(r, theory_mode ? 20.0 : delta_exp);
}

double AlgoParams::sample_multiplier(std::size_t n) const {
  const double l = log_term(n);
  if (theory_mode) return 5000.0 * std::pow(l, 10.0);
  return 16.0 * std::pow(std::ceil(l), sample_exp);
}

double AlgoParams::slack_pow(std::size_t n) const {
  return std::max(1.0, std::pow(log_term(n), theory_mode ? 10.0 : slack_exp));
}

double AlgoParams::case_b_threshold(std::size_t n, std::uint64_t ell) const {
  const double l2 = static_cast<double>(ell) * static_cast<double>(ell);
  if (theory_mode) return 20.0 * l2 * std::pow(log_term(n), 100.0);
  const double p = log_pow(n);
  return case_b_factor * l2 * p * p;
}

double AlgoParams::input_scale_exponent() const { return theory_mode ? 50.0 : input_scale_exp; }

BigInt scale_factor(const KnapsackInstance& inst, const AlgoParams& params) {
  if (inst.size() == 0) return 1;
  const double x = params.input_scale_exponent();
  mpf_class base(static_cast<double>(inst.size()), 256);
  base /= mpf_class(params.epsilon, 256);
  mpf_class bound(1, 256);
  if (x == std::floor(x)) {
    mpf_pow_ui(bound.get_mpf_t(), base.get_mpf_t(), static_cast<unsigned long>(x));
  } else {
    bound = mpf_class(std::pow(base.get_d(), x), 256);
  }
  mpf_ceil(bound.get_mpf_t(), bound.get_mpf_t());
  const BigInt need(bound);
  const BigInt q = ceil_div(need, inst.weights.front());
  if (q <= 1) return 1;
  return pow2(bit_length(q - 1));
}

KnapsackInstance scale_instance(const KnapsackInstance& inst, const AlgoParams& params) {
  const BigInt c = scale_factor(inst, params);
  KnapsackInstance out = inst;
  out.capacity *= c;
  for (auto& w : out.weights) w *= c;
  return out;
}

GeneratorKind parse_generator_kind(std::string_view s) {
  if (s == "uniform") return GeneratorKind::Uniform;
  if (s == "bounded_ratio") return GeneratorKind::BoundedRatio;
  if (s == "tiny_adversarial") return GeneratorKind::TinyAdversarial;
  if (s == "custom_classes") return GeneratorKind::CustomClasses;
  throw std::invalid_argument("unknown generator kind: " + std::string(s));
}

std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Uniform: return "uniform";
    case GeneratorKind::BoundedRatio: return "bounded_ratio";
    case GeneratorKind::TinyAdversarial: return "tiny_adversarial";
    case GeneratorKind::CustomClasses: return "custom_classes";
  }
  return "?";
}

namespace {

BigInt draw_in_class(Rng& rng, const BigInt& t, std::uint64_t m) {
  const BigInt lo = floor_div(t, big_from_u64(m));
  const BigInt hi = floor_div(2 * t, big_from_u64(m));
  if (hi <= lo) throw std::invalid_argument("class (T/m, 2T/m] holds no integer");
  return lo + 1 + rng.below(BigInt(hi - lo));
}

}  // namespace

KnapsackInstance generate(const GeneratorSpec& spec) {
  const std::size_t n = spec.n;
  const BigInt& t = spec.capacity;
  if (n < 1) throw std::invalid_argument("generator needs n >= 1");
  if (t < big_from_u64(n)) throw std::invalid_argument("generator needs T >= n");
  Rng rng(spec.seed);
  std::vector<BigInt> w;
  w.reserve(n);
  switch (spec.kind) {
    case GeneratorKind::Uniform:
      for (std::size_t i = 0; i < n; ++i) w.push_back(rng.below(t) + 1);
      break;
    case GeneratorKind::BoundedRatio:
      if (spec.ell < 1) throw std::invalid_argument("bounded_ratio needs ell >= 1");
      for (std::size_t i = 0; i < n; ++i) w.push_back(draw_in_class(rng, t, spec.ell));
      break;
    case GeneratorKind::TinyAdversarial: {
      const auto ell = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n)))));
      BigInt n10;
      mpz_ui_pow_ui(n10.get_mpz_t(), n, 10);
      const BigInt large = floor_div(t * (n10 - 1), big_from_u64(ell) * n10);
      BigInt tiny = floor_div(10 * t, n10 * big_from_u64(n));
      if (tiny < 1) tiny = 1;
      if (large < 1) throw std::invalid_argument("tiny_adversarial: capacity too small");
      for (std::size_t i = 0; i < n / 2; ++i) w.push_back(large);
      while (w.size() < n) w.push_back(tiny);
      break;
    }
    case GeneratorKind::CustomClasses: {
      std::vector<std::uint64_t> classes = spec.classes;
      if (classes.empty()) classes = {2, 4, 8};
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t m = classes[rng.below(classes.size())];
        if (m < 2) throw std::invalid_argument("custom_classes needs m >= 2");
        w.push_back(draw_in_class(rng, t, m));
      }
      break;
    }
  }
  return make_instance(std::move(w), t);
}

}  // namespace knapcount
