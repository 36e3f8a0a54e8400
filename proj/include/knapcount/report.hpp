#pragma once

#include "knapcount/estimator.hpp"

#include <json.hpp>

#include <string>

namespace knapcount {

// Hex digest of the serialized instance.
std::string instance_digest(const KnapsackInstance& inst);

// Estimates carry the exact hex float, its binary exponent and a decimal rendering.
nlohmann::json xreal_to_json(const XReal& x);
XReal xreal_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EstimateReport& rep);
EstimateReport report_from_json(const nlohmann::json& j);

}  // namespace knapcount
