#include "knapcount/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <stdexcept>

namespace knapcount {

std::string instance_digest(const KnapsackInstance& inst) {
  const std::string text = serialize_instance(inst);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

nlohmann::json xreal_to_json(const XReal& x) {
  return {{"hex", x.to_hex()}, {"log2", x.is_zero() ? nlohmann::json(nullptr) : nlohmann::json(x.log2())},
          {"decimal", x.to_decimal()}};
}

XReal xreal_from_json(const nlohmann::json& j) { return XReal::from_hex(j.at("hex").get<std::string>()); }

namespace {

std::string variant_name(LeafVariant v) {
  switch (v) {
    case LeafVariant::Auto: return "auto";
    case LeafVariant::Dp: return "dp";
    case LeafVariant::Cc: return "cc";
  }
  return "?";
}

LeafVariant variant_from(const std::string& s) {
  if (s == "dp") return LeafVariant::Dp;
  if (s == "cc") return LeafVariant::Cc;
  return LeafVariant::Auto;
}

}  // namespace

nlohmann::json report_to_json(const EstimateReport& rep) {
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& t : rep.timings) timings[t.stage] = t.ms;
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : rep.classes) {
    classes.push_back({{"m", c.m},
                       {"size", c.size},
                       {"small_items_case", c.small_items_case},
                       {"variant", variant_name(c.variant)},
                       {"nonempty_bins", c.nonempty_bins},
                       {"delta", c.delta}});
  }
  nlohmann::json diag = {{"exact_shortcut", rep.exact_shortcut},
                         {"timed_out", rep.timed_out},
                         {"samples", rep.samples},
                         {"failure_bound", rep.failure_bound},
                         {"overflow_events", rep.overflow_events}};
  if (rep.algo == "subquad") {
    diag["ell"] = rep.ell;
    diag["classes"] = classes;
    diag["tiny_items"] = rep.tiny_items;
    diag["second_phase_draws"] = rep.second_phase_draws;
    diag["root_length"] = rep.root_length;
    diag["root_delta"] = rep.root_delta;
  } else if (rep.algo == "dyer") {
    diag["k"] = rep.dyer_k;
    diag["grid_capacity"] = rep.dyer_capacity;
    diag["hits"] = rep.hits;
  }
  return {{"algo", rep.algo},
          {"estimate", rep.estimate.is_integer() ? rep.estimate.floor_integer().get_str() : rep.estimate.to_decimal()},
          {"estimate_exact", xreal_to_json(rep.estimate)},
          {"epsilon", rep.epsilon},
          {"seed", rep.seed},
          {"n", rep.n},
          {"timings_ms", timings},
          {"diagnostics", diag}};
}

EstimateReport report_from_json(const nlohmann::json& j) {
  EstimateReport rep;
  rep.algo = j.at("algo").get<std::string>();
  rep.estimate = xreal_from_json(j.at("estimate_exact"));
  rep.epsilon = j.at("epsilon").get<double>();
  rep.seed = j.at("seed").get<std::uint64_t>();
  rep.n = j.at("n").get<std::size_t>();
  for (const auto& [stage, ms] : j.at("timings_ms").items()) rep.timings.push_back({stage, ms.get<double>()});
  const auto& d = j.at("diagnostics");
  rep.exact_shortcut = d.value("exact_shortcut", false);
  rep.timed_out = d.value("timed_out", false);
  rep.samples = d.value("samples", std::size_t{0});
  rep.failure_bound = d.value("failure_bound", 0.0);
  rep.overflow_events = d.value("overflow_events", std::uint64_t{0});
  rep.ell = d.value("ell", std::uint64_t{0});
  rep.tiny_items = d.value("tiny_items", std::size_t{0});
  rep.second_phase_draws = d.value("second_phase_draws", std::vector<std::size_t>{});
  rep.root_length = d.value("root_length", std::int64_t{0});
  rep.root_delta = d.value("root_delta", 0.0);
  rep.dyer_k = d.value("k", std::uint64_t{0});
  rep.dyer_capacity = d.value("grid_capacity", std::int64_t{0});
  rep.hits = d.value("hits", std::uint64_t{0});
  if (d.contains("classes")) {
    for (const auto& c : d.at("classes")) {
      rep.classes.push_back({c.at("m").get<std::uint64_t>(), c.at("size").get<std::size_t>(),
                             c.at("small_items_case").get<bool>(), variant_from(c.at("variant").get<std::string>()),
                             c.at("nonempty_bins").get<std::size_t>(), c.at("delta").get<double>()});
    }
  }
  return rep;
}

}  // namespace knapcount
