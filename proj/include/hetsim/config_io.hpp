#pragma once

#include <string>

#include "hetsim/net_model.hpp"
#include "hetsim/utility.hpp"

namespace hetsim {

// Scenario file: one JSON object whose keys mirror NetworkConfig (see
// docs in README). Unknown keys are rejected so typos fail loudly.
struct ScenarioConfig {
  NetworkConfig network;
  UtilityFamily utility;
  int profile_refresh = 10;
};

ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::string& path);
std::string scenario_config_to_json(const ScenarioConfig& config);

// The desk-scale defaults used by `compare` when no file is given.
ScenarioConfig default_scenario_config();

}  // namespace hetsim
