#pragma once

#include "knapcount/bigint.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace knapcount {

struct KnapsackInstance {
  std::vector<BigInt> weights;  // non-decreasing
  BigInt capacity;

  std::size_t size() const { return weights.size(); }
  BigInt total_weight() const;
  bool operator==(const KnapsackInstance&) const = default;
};

// Builds a normalized instance; validates 0 < W_i <= T.
KnapsackInstance make_instance(std::vector<BigInt> weights, BigInt capacity);

class ParseError : public std::runtime_error {
 public:
  enum class Code { Malformed, CountMismatch, NonPositiveWeight, WeightExceedsCapacity, NonPositiveCapacity };
  ParseError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

KnapsackInstance parse_instance(std::istream& in);
KnapsackInstance parse_instance(std::string_view text);
std::string serialize_instance(const KnapsackInstance& inst);

enum class LeafVariant { Auto, Dp, Cc };

// Tuning surface for every polylog power in the algorithm. With theory_mode
// set the accessors return the literal constants instead.
struct AlgoParams {
  double epsilon = 0.25;
  std::uint64_t seed = 1;
  double bin_cap_exp = 1.0;     // B = ceil(log^x) + 4
  double scale_exp = 2.0;       // divisor log-power in S and S_h
  double delta_exp = 3.0;       // root delta (eps/n)^x
  double sample_exp = 1.0;      // N, N' multiplier 16 * ceil(log)^x
  double slack_exp = 1.0;       // capacity slack divisor log^x
  double input_scale_exp = 3.0; // scale_instance bound (n/eps)^x
  double case_b_factor = 20.0;  // small-items case when m >= factor * ell^2 * P^2
  double dyer_c = 4.0;
  bool theory_mode = false;
  LeafVariant leaf_variant = LeafVariant::Auto;
  double time_budget_ms = 0;    // 0 disables the timer

  void validate(std::size_t n) const;

  double log_term(std::size_t n) const;  // log2(n / eps), at least 1
  std::size_t bin_cap(std::size_t n) const;
  double log_pow(std::size_t n) const;    // P in S = T / (ell * P)
  double root_delta(std::size_t n) const;
  double sample_multiplier(std::size_t n) const;
  double slack_pow(std::size_t n) const;
  double case_b_threshold(std::size_t n, std::uint64_t ell) const;
  double input_scale_exponent() const;
};

// Multiplies T and all weights by the smallest power of two C with
// min W * C >= (n/eps)^x; the solution set is unchanged.
KnapsackInstance scale_instance(const KnapsackInstance& inst, const AlgoParams& params);
// Power of two used by scale_instance.
BigInt scale_factor(const KnapsackInstance& inst, const AlgoParams& params);

enum class GeneratorKind { Uniform, BoundedRatio, TinyAdversarial, CustomClasses };

GeneratorKind parse_generator_kind(std::string_view s);
std::string to_string(GeneratorKind k);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Uniform;
  std::size_t n = 10;
  BigInt capacity = 1000;
  std::uint64_t ell = 4;                  // bounded_ratio
  std::vector<std::uint64_t> classes;     // custom_classes: class denominators m
  std::uint64_t seed = 1;
};

KnapsackInstance generate(const GeneratorSpec& spec);

}  // namespace knapcount
