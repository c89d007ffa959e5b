#pragma once

#include <span>

#include <nlohmann/json.hpp>

#include "berthstay/engine.hpp"
#include "berthstay/eval.hpp"
#include "berthstay/mdgs.hpp"
#include "berthstay/regress.hpp"
#include "berthstay/synth.hpp"

// JSON forms of the library's artifacts. Readers throw FormatError on
// malformed documents; writers produce key order that is stable across runs.
namespace berthstay::json {

using Json = nlohmann::ordered_json;

Json to_json(const TruncatedMixture& mix);
TruncatedMixture mixture_from_json(const nlohmann::json& j);

// Array of {terminal, group, shipment, a, b, n_train}.
Json to_json(const RegressionCatalog& catalog);
RegressionCatalog catalog_from_json(const nlohmann::json& j);

Json to_json(const TerminalProfile& profile);
TerminalProfile profile_from_json(const nlohmann::json& j);

Json to_json(const ModelRegistry& registry);
ModelRegistry registry_from_json(const nlohmann::json& j);

// {scenario, point_hours, per_block, quantiles{p10,p50,p90}}
Json to_json(const Prediction& prediction);

Json to_json(const ScenarioReport& report);
Json to_json(const FitReport& report);
Json to_json(std::span<const TruthEntry> truth);
Json to_json(std::span<const Corruption> manifest);

// Parses text, mapping parse failures to FormatError naming `what`.
nlohmann::json parse(std::string_view text, std::string_view what);

}  // namespace berthstay::json
