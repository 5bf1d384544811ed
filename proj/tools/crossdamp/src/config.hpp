#ifndef CROSSDAMP_TOOL_CONFIG_HPP
#define CROSSDAMP_TOOL_CONFIG_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace cdtool {

// Bad configuration or command line; carries file:line:col when known.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { population, fim, crb, mle, entangle_evolve, entangle_scan, dfs_null };

struct ScenarioInfo {
  Scenario id;
  const char* name;
  const char* summary;
};

const std::vector<ScenarioInfo>& scenarios();
std::optional<Scenario> scenario_from_name(const std::string& name);
const char* scenario_name(Scenario s);

enum class TimeUnit { seconds, inverse_omega };

struct TimeGridSpec {
  std::vector<double> values;  // in `unit`
  TimeUnit unit = TimeUnit::seconds;
  std::optional<double> start, stop;
  std::size_t points = 0;
};

struct ScanAxisSpec {
  std::string axis;  // t | gamma12_over_gamma | temperature_ratio | r
  std::vector<double> values;
};

// Fully resolved scenario configuration: every field holds a value, either
// from the file or from the scenario default (listed in `defaulted`).
struct ScenarioConfig {
  Scenario scenario = Scenario::population;
  std::string source;  // config path

  // model
  double omega0 = 0.0;
  double coupling = 0.0;  // rad/s
  double gamma = 0.0;     // 1/s
  std::vector<double> gamma12_ratios;  // one curve per value
  double nbar = 0.0;
  std::optional<double> temperature_ratio;

  // initial state
  double n1 = 0.0, n2 = 0.0;  // thermal occupations (n1(0), n2(0))
  std::complex<double> m1{}, m2{};  // optional anomalous moments for fim
  double squeeze_r = 0.0;     // ion 2 squeezing for entanglement scenarios

  TimeGridSpec time;
  std::vector<double> times_seconds;  // resolved grid

  // fim
  std::vector<std::pair<int, int>> fim_entries;
  bool fim_dimensionless = false;

  // crb / mle
  std::size_t repetitions = 1;
  std::size_t trials = 1;
  std::string target = "nbar";
  double bracket_lo = 0.0, bracket_hi = 1.0;

  // entangle-scan
  std::vector<ScanAxisSpec> axes;

  std::string out_dir;
  std::string format = "csv";
  std::uint64_t seed = 1;
  unsigned workers = 1;

  std::vector<std::string> defaulted;

  nlohmann::ordered_json resolved_json() const;
};

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> format;
};

ScenarioConfig load_config(const std::string& path, const Overrides& overrides);

// Default fixture of a scenario as JSON (used by `list`).
nlohmann::ordered_json default_fixture(Scenario s);

}  // namespace cdtool

#endif
