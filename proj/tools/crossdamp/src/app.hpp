#ifndef CROSSDAMP_TOOL_APP_HPP
#define CROSSDAMP_TOOL_APP_HPP

#include <filesystem>
#include <ostream>
#include <string>

#include "config.hpp"
#include "json.hpp"

namespace cdtool {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O problems, verify mismatches
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunOutcome {
  std::filesystem::path out_dir;
  nlohmann::ordered_json manifest;
};

// Loads, runs and writes a scenario including manifest.json. Throws on
// failure after removing the files the run had created.
RunOutcome run_config_file(const std::string& config_path, const Overrides& overrides);

// Checks every output listed in a manifest. Returns kExitOk, kExitFailure on
// any mismatch or missing file, kExitValidation for an unreadable manifest.
int verify_manifest(const std::string& manifest_path, std::ostream& out, std::ostream& err);

nlohmann::ordered_json list_json();

int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdtool

#endif
