#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "peakmdp/mdp.hpp"
#include "peakmdp/scenario_gen.hpp"

namespace peakmdp {

/// Malformed JSON or a document that does not have the scenario shape.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid form:
//   {"grid": {"width": W, "height": H}, "gamma": G,
//    "rewards": [{"x": X, "y": Y, "value": V}, ...]}
// Graph form (-1 marks an unavailable action):
//   {"graph": {"states": N, "actions": M, "next": [[s', ...], ...]}, "gamma": G,
//    "rewards": [{"state": S, "value": V}, ...]}
//
// Parsing checks shape only; call validate_scenario for the semantic checks.
// Throws FormatError, or InvalidScenario when the world itself cannot be
// built (1x1 grid, reward cell outside the grid, bad transition table).
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Two-space indented JSON, newline terminated. Deterministic for a given scenario.
std::string scenario_to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

//   {"grid": {"width": W, "height": H}, "rewards": K, "values": [lo, hi],
//    "gamma": G, "seed": S}
// Missing keys keep the GenSpec defaults.
GenSpec parse_genspec(std::string_view json_text);
std::string genspec_to_json(const GenSpec& spec);

}  // namespace peakmdp
