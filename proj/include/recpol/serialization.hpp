#pragma once

#include <string>

#include "json.hpp"
#include "recpol/decomposition.hpp"
#include "recpol/distributions.hpp"
#include "recpol/estimation.hpp"
#include "recpol/experiment.hpp"
#include "recpol/lfm.hpp"
#include "recpol/policy.hpp"

namespace recpol {

using Json = nlohmann::ordered_json;

// Policy: ordered object {x: "N" | "none" | "H"}.
Json policy_to_json(const Policy& policy);
Policy policy_from_json(const Json& j);

// Population: {"rows": [{"role", "type", "ability", "count"}, ...]}.
Json population_to_json(const PopulationSpec& spec);
PopulationSpec population_from_json(const Json& j);

// Baseline joint: {"atoms": [{"x", "d0", "y", "w"}, ...]}.
Json baseline_to_json(const BaselineJoint& base);
BaselineJoint baseline_from_json(const Json& j);

// Mistake statistics: {x: {"p", "h", "m_N", "m_H"}}, null for undefined.
Json stats_to_json(const MistakeStats& stats);

Json summary_to_json(const SimulationSummary& summary);
Json decomposition_to_json(const DecompositionReport& report);

/// Agent model spec:
///   {"compliance": {"kind": "perfect"} |
///                  {"kind": "selective", "ignored": [u, ...]} |
///                  {"kind": "constant", "p": v},
///    "active": {"kind": "random", "p": v} | {"kind": "sophisticated"} |
///              {"kind": "probability-matching"}}
/// Population-backed rules resolve against `pop`.
AgentModel model_from_json(const Json& j, const PopulationDistribution& pop,
                           const LossSpec& spec);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace recpol
