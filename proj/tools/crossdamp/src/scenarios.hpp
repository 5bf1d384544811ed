#ifndef CROSSDAMP_TOOL_SCENARIOS_HPP
#define CROSSDAMP_TOOL_SCENARIOS_HPP

#include "config.hpp"
#include "json.hpp"
#include "output.hpp"

namespace cdtool {

// Runs one scenario, writing its tables into `out`. Returns a small summary
// object that is copied into the manifest.
nlohmann::ordered_json run_scenario(const ScenarioConfig& cfg, OutputSet& out);

}  // namespace cdtool

#endif
