#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "crossdamp/model.hpp"

namespace cdtool {

const std::vector<ScenarioInfo>& scenarios() {
  static const std::vector<ScenarioInfo> list = {
      {Scenario::population, "population", "mean phonon number of both ions versus time, one curve per gamma12/gamma"},
      {Scenario::fim, "fim", "Fisher information matrix entries of the ion-1 phonon distribution versus time"},
      {Scenario::crb, "crb", "Cramer-Rao bounds 1/(M F_aa) and the pseudo-inverse matrix bound at selected times"},
      {Scenario::mle, "mle", "Monte-Carlo maximum-likelihood estimates of one parameter compared with its bound"},
      {Scenario::entangle_evolve, "entangle-evolve", "separability function Y(t) for a thermal x squeezed-thermal start"},
      {Scenario::entangle_scan, "entangle-scan", "Y on a grid over two or three of t, gamma12/gamma, hbar w0/kT, r"},
      {Scenario::dfs_null, "dfs-null", "late-time growth of the damping-rate information at gamma12 = gamma"},
  };
  return list;
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
  for (const auto& s : scenarios())
    if (name == s.name) return s.id;
  return std::nullopt;
}

const char* scenario_name(Scenario s) {
  for (const auto& x : scenarios())
    if (x.id == s) return x.name;
  return "?";
}

namespace {

// Scenario defaults: the reference fixtures of the model (n1 = 0.35,
// n2 = 2.3, Omega = 3.1 pi kHz, gamma / Omega = 0.05 or 0.02). Grids and the
// entanglement-run temperatures are choices of this tool. Whatever a config
// leaves out is listed under defaults_applied in the manifest.
const char* default_yaml(Scenario s) {
  switch (s) {
    case Scenario::population:
      return R"(
model:
  coupling: {value: 3.1, unit: pi-kHz}
  gamma_over_omega: 0.05
  gamma12_over_gamma: [0.0, 0.5, 0.8, 1.0]
  temperature_ratio: 0.10
initial: {n1: 0.35, n2: 2.3}
time: {start: 0, stop: 4000, points: 2001, unit: inverse-Omega}
)";
    case Scenario::fim:
      return R"(
model:
  coupling: {value: 3.1, unit: pi-kHz}
  gamma_over_omega: 0.02
  gamma12_over_gamma: [0.0, 0.5, 0.8, 1.0]
  temperature_ratio: 1.0
initial: {n1: 0.35, n2: 2.3}
time: {start: 0, stop: 1000, points: 2001, unit: inverse-Omega}
fim: {entries: [F11, F12, F22, F33, F44, F45, F55, F66], view: raw}
)";
    case Scenario::crb:
      return R"(
model:
  coupling: {value: 3.1, unit: pi-kHz}
  gamma_over_omega: 0.02
  gamma12_over_gamma: [0.0, 0.5, 0.8, 1.0]
  temperature_ratio: 1.0
initial: {n1: 0.35, n2: 2.3}
time: {values: [50, 250, 500, 2500], unit: inverse-Omega}
estimation: {repetitions: 10000}
)";
    case Scenario::mle:
      return R"(
model:
  coupling: {value: 3.1, unit: pi-kHz}
  gamma_over_omega: 0.02
  gamma12_over_gamma: [0.5]
  temperature_ratio: 1.0
initial: {n1: 0.35, n2: 2.3}
time: {values: [2500], unit: inverse-Omega}
estimation: {target: nbar, repetitions: 100000, trials: 200, bracket: [0.0, 10.0]}
)";
    case Scenario::entangle_evolve:
      return R"(
model:
  coupling: 0.0
  gamma: 1.0
  gamma12_over_gamma: [1.0]
  temperature_ratio: 3.0
initial: {n1: 0.35, n2: 0.35, r: 2.0}
time: {start: 0, stop: 20, points: 401, unit: seconds}
)";
    case Scenario::entangle_scan:
      return R"(
model:
  coupling: 0.0
  gamma: 1.0
  gamma12_over_gamma: [1.0]
  temperature_ratio: 3.0
initial: {n1: 0.35, n2: 0.35, r: 2.0}
scan:
  axes:
    - {axis: t, start: 0.25, stop: 20, points: 80}
    - {axis: gamma12_over_gamma, start: 0.0, stop: 1.0, points: 21}
    - {axis: temperature_ratio, start: 0.5, stop: 5.0, points: 10}
)";
    case Scenario::dfs_null:
      return R"(
model:
  coupling: {value: 3.1, unit: pi-kHz}
  gamma_over_omega: 0.02
  gamma12_over_gamma: [1.0]
  temperature_ratio: 1.0
initial: {n1: 0.35, n2: 2.3}
time: {start: 500, stop: 5000, points: 91, unit: inverse-Omega}
)";
  }
  return "";
}

std::string where(const std::string& file, const YAML::Mark& m) {
  std::ostringstream os;
  os << file;
  if (!m.is_null()) os << ":" << m.line + 1 << ":" << m.column + 1;
  return os.str();
}

// Looks up values in the user document first and the scenario defaults
// second, remembering which quantities fell back to defaults.
class Resolver {
 public:
  Resolver(std::string file, YAML::Node user, YAML::Node defaults)
      : file_(std::move(file)), user_(std::move(user)), def_(std::move(defaults)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ValidationError(where(file_, at.IsDefined() ? at.Mark() : user_.Mark()) + ": error: " + msg);
  }

  // Undefined node when the section is absent or empty.
  const YAML::Node user_section(const std::string& name) const {
    const YAML::Node& u = user_;
    if (u.IsMap()) {
      const YAML::Node n = u[name];
      if (n && !n.IsNull()) return n;
    }
    return YAML::Node(YAML::NodeType::Undefined);
  }

  // The key itself, for error positions at the start of the line.
  static YAML::Node key_node(const YAML::Node& map, const std::string& key) {
    for (const auto& kv : map)
      if (kv.first.Scalar() == key) return kv.first;
    return map[key];
  }

  void check_keys(const YAML::Node& map, const std::string& where_name, const std::set<std::string>& allowed) const {
    if (!map.IsDefined() || map.IsNull()) return;
    if (!map.IsMap()) fail(map, "'" + where_name + "' must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where_name);
    }
  }

  struct Found {
    std::string key;
    YAML::Node node;
    bool from_user = false;
  };

  // One of several mutually exclusive spellings of a quantity.
  std::optional<Found> pick(const std::string& section, const std::vector<std::string>& keys,
                            const std::string& label) {
    const YAML::Node us = user_section(section);
    std::optional<Found> hit;
    if (us.IsMap()) {
      for (const auto& k : keys) {
        if (!us[k]) continue;
        if (hit)
          fail(key_node(us, k), "'" + section + "." + k + "' conflicts with '" + section + "." + hit->key +
                          "': give " + label + " only once");
        hit = Found{k, us[k], true};
      }
    }
    if (hit) return hit;
    const YAML::Node ds = def_[section];
    if (ds.IsMap())
      for (const auto& k : keys)
        if (ds[k]) {
          defaulted_.push_back(section + "." + k);
          return Found{k, ds[k], false};
        }
    return std::nullopt;
  }

  Found require(const std::string& section, const std::vector<std::string>& keys, const std::string& label) {
    auto f = pick(section, keys, label);
    if (!f) fail(user_section(section), "missing " + label + " (" + section + "." + keys.front() + ")");
    return *f;
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, what + " must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  std::uint64_t count(const YAML::Node& n, const std::string& what) const {
    const double v = number(n, what);
    if (v < 0 || std::floor(v) != v || v > 9.0e15) fail(n, what + " must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& what) const {
    std::vector<double> out;
    if (n.IsSequence()) {
      for (const auto& x : n) out.push_back(number(x, what));
    } else {
      out.push_back(number(n, what));
    }
    return out;
  }

  const std::vector<std::string>& defaulted() const { return defaulted_; }
  const std::string& file() const { return file_; }

 private:
  std::string file_;
  YAML::Node user_;
  YAML::Node def_;
  std::vector<std::string> defaulted_;
};

double frequency(Resolver& r, const YAML::Node& n, const std::string& what) {
  if (n.IsMap()) {
    r.check_keys(n, what, {"value", "unit"});
    if (!n["value"]) r.fail(n, what + " needs a 'value'");
    const double v = r.number(n["value"], what + ".value");
    const std::string unit = n["unit"] ? r.text(n["unit"], what + ".unit") : "rad/s";
    if (unit == "rad/s") return v;
    if (unit == "pi-kHz") return v * M_PI * 1e3;
    r.fail(n["unit"], what + ".unit must be 'rad/s' or 'pi-kHz'");
  }
  return r.number(n, what);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// {start, stop, points} or {values: [...]}; returns the values.
std::vector<double> grid_values(Resolver& r, const YAML::Node& n, const std::string& what,
                                std::optional<double>* start = nullptr, std::optional<double>* stop = nullptr,
                                std::size_t* points = nullptr) {
  if (n["values"]) {
    if (n["start"] || n["stop"] || n["points"]) r.fail(n["values"], what + ": give either values or start/stop/points");
    auto v = r.numbers(n["values"], what + ".values");
    if (v.empty()) r.fail(n["values"], what + ": empty grid");
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) r.fail(n["values"], what + ": grid must be strictly increasing");
    if (points) *points = v.size();
    return v;
  }
  for (const char* k : {"start", "stop", "points"})
    if (!n[k]) r.fail(n, what + ": missing '" + k + "'");
  const double a = r.number(n["start"], what + ".start");
  const double b = r.number(n["stop"], what + ".stop");
  const auto np = r.count(n["points"], what + ".points");
  if (np == 0) r.fail(n["points"], what + ": empty grid (points = 0)");
  if (np == 1 && a != b) r.fail(n["points"], what + ": a single point needs start == stop");
  if (np > 1 && !(b > a)) r.fail(n["stop"], what + ": grid must be strictly increasing (stop > start)");
  if (np > 50'000'000) r.fail(n["points"], what + ": too many points");
  if (start) *start = a;
  if (stop) *stop = b;
  if (points) *points = np;
  auto v = linspace(a, b, np);
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) r.fail(n, what + ": grid spacing below floating-point resolution");
  return v;
}

std::pair<int, int> parse_entry(Resolver& r, const YAML::Node& n) {
  const std::string s = r.text(n, "fim.entries item");
  if (s.size() == 3 && s[0] == 'F' && s[1] >= '1' && s[1] <= '6' && s[2] >= '1' && s[2] <= '6') {
    int a = s[1] - '0', b = s[2] - '0';
    return {std::min(a, b), std::max(a, b)};
  }
  r.fail(n, "fim.entries items look like F11 .. F66, got '" + s + "'");
}

const std::set<std::string> kScanAxes = {"t", "gamma12_over_gamma", "temperature_ratio", "r"};

}  // namespace

ScenarioConfig load_config(const std::string& path, const Overrides& ov) {
  YAML::Node user;
  {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": error: cannot open configuration file");
    try {
      user = YAML::Load(in);
    } catch (const YAML::ParserException& e) {
      throw ValidationError(where(path, e.mark) + ": error: " + e.msg);
    }
  }
  if (!user.IsMap()) throw ValidationError(path + ": error: configuration must be a mapping");
  if (!user["scenario"]) throw ValidationError(path + ":1:1: error: missing 'scenario'");

  ScenarioConfig c;
  c.source = path;
  {
    const YAML::Node s = user["scenario"];
    const auto id = s.IsScalar() ? scenario_from_name(s.Scalar()) : std::nullopt;
    if (!id) {
      std::string names;
      for (const auto& x : scenarios()) names += std::string(names.empty() ? "" : ", ") + x.name;
      throw ValidationError(where(path, s.Mark()) + ": error: unknown scenario; expected one of " + names);
    }
    c.scenario = *id;
  }

  Resolver r(path, user, YAML::Load(default_yaml(c.scenario)));
  r.check_keys(user, "the top level", {"scenario", "seed", "workers", "output", "model", "initial", "time", "fim", "estimation", "scan"});
  r.check_keys(r.user_section("output"), "output", {"dir", "format"});
  r.check_keys(r.user_section("model"), "model",
               {"omega0", "coupling", "trap", "gamma", "gamma_over_omega", "gamma12", "gamma12_over_gamma", "nbar",
                "temperature_ratio"});
  r.check_keys(r.user_section("initial"), "initial", {"n1", "n2", "m1", "m2", "r"});
  r.check_keys(r.user_section("time"), "time", {"start", "stop", "points", "values", "unit"});
  r.check_keys(r.user_section("fim"), "fim", {"entries", "view"});
  r.check_keys(r.user_section("estimation"), "estimation", {"target", "repetitions", "trials", "bracket"});
  r.check_keys(r.user_section("scan"), "scan", {"axes"});

  const bool entangle = c.scenario == Scenario::entangle_evolve || c.scenario == Scenario::entangle_scan;

  // --- model --------------------------------------------------------------
  if (auto trap = r.pick("model", {"trap"}, "the trap geometry")) {
    if (r.user_section("model")["coupling"]) r.fail(r.user_section("model")["coupling"], "'model.coupling' conflicts with 'model.trap'");
    if (r.user_section("model")["omega0"]) r.fail(r.user_section("model")["omega0"], "'model.omega0' conflicts with 'model.trap'");
    const YAML::Node t = trap->node;
    r.check_keys(t, "model.trap", {"mass", "charge", "separation", "trap_frequency"});
    crossdamp::PhysicalParams pp;
    for (const char* k : {"mass", "charge", "separation", "trap_frequency"})
      if (!t[k]) r.fail(t, std::string("model.trap: missing '") + k + "'");
    pp.mass = r.number(t["mass"], "model.trap.mass");
    pp.charge = r.number(t["charge"], "model.trap.charge");
    pp.separation = r.number(t["separation"], "model.trap.separation");
    pp.trap_frequency = frequency(r, t["trap_frequency"], "model.trap.trap_frequency");
    try {
      const auto tc = crossdamp::effective_model(pp);
      c.omega0 = tc.omega0;
      c.coupling = tc.coupling;
    } catch (const std::invalid_argument& e) {
      r.fail(t, e.what());
    }
  } else {
    const auto cp = r.require("model", {"coupling"}, "the coupling Omega");
    c.coupling = frequency(r, cp.node, "model.coupling");
    if (auto w0 = r.pick("model", {"omega0"}, "omega0")) c.omega0 = frequency(r, w0->node, "model.omega0");
  }

  const auto g = r.require("model", {"gamma", "gamma_over_omega"}, "the local damping rate");
  if (g.key == "gamma") {
    c.gamma = r.number(g.node, "model.gamma");
  } else {
    if (c.coupling == 0.0) r.fail(g.node, "model.gamma_over_omega needs a non-zero coupling");
    c.gamma = r.number(g.node, "model.gamma_over_omega") * std::abs(c.coupling);
  }
  if (!(c.gamma > 0.0)) r.fail(g.node, "the local damping rate must be positive");

  const auto g12 = r.require("model", {"gamma12", "gamma12_over_gamma"}, "the cross-damping rate");
  for (double v : r.numbers(g12.node, "model." + g12.key)) {
    const double ratio = g12.key == "gamma12" ? v / c.gamma : v;
    if (ratio < 0.0 || ratio > 1.0) r.fail(g12.node, "cross-damping must satisfy 0 <= gamma12 <= gamma");
    c.gamma12_ratios.push_back(ratio);
  }
  if (c.gamma12_ratios.empty()) r.fail(g12.node, "at least one cross-damping value is required");

  const auto nb = r.require("model", {"nbar", "temperature_ratio"}, "the reservoir occupation");
  if (nb.key == "nbar") {
    c.nbar = r.number(nb.node, "model.nbar");
    if (c.nbar < 0.0) r.fail(nb.node, "model.nbar must be non-negative");
  } else {
    c.temperature_ratio = r.number(nb.node, "model.temperature_ratio");
    if (!(*c.temperature_ratio > 0.0)) r.fail(nb.node, "model.temperature_ratio must be positive");
    c.nbar = crossdamp::bose_occupation(*c.temperature_ratio);
  }

  // --- initial state --------------------------------------------------------
  const auto n1 = r.require("initial", {"n1"}, "n1(0)");
  const auto n2 = r.require("initial", {"n2"}, "n2(0)");
  c.n1 = r.number(n1.node, "initial.n1");
  c.n2 = r.number(n2.node, "initial.n2");
  if (c.n1 < 0.0) r.fail(n1.node, "initial.n1 must be non-negative");
  if (c.n2 < 0.0) r.fail(n2.node, "initial.n2 must be non-negative");
  auto complex_of = [&](const YAML::Node& n, const std::string& what) {
    auto v = r.numbers(n, what);
    if (v.size() == 1) return std::complex<double>(v[0], 0.0);
    if (v.size() != 2) r.fail(n, what + " is a number or [re, im]");
    return std::complex<double>(v[0], v[1]);
  };
  if (auto m = r.pick("initial", {"m1"}, "m1(0)")) c.m1 = complex_of(m->node, "initial.m1");
  if (auto m = r.pick("initial", {"m2"}, "m2(0)")) c.m2 = complex_of(m->node, "initial.m2");
  if ((c.m1 != 0.0 || c.m2 != 0.0) && c.scenario != Scenario::fim)
    r.fail(r.user_section("initial"), "initial.m1/m2 are only used by the fim scenario");
  if (std::norm(c.m1) > c.n1 * (c.n1 + 1.0)) r.fail(r.user_section("initial")["m1"], "initial.m1 violates |m1|^2 <= n1(n1+1)");
  if (std::norm(c.m2) > c.n2 * (c.n2 + 1.0)) r.fail(r.user_section("initial")["m2"], "initial.m2 violates |m2|^2 <= n2(n2+1)");
  if (auto rr = r.pick("initial", {"r"}, "the squeezing parameter")) {
    if (!entangle) r.fail(rr->node, "initial.r is only used by the entanglement scenarios");
    c.squeeze_r = r.number(rr->node, "initial.r");
  } else if (entangle) {
    r.fail(r.user_section("initial"), "missing the squeezing parameter initial.r");
  }

  // --- time grid ------------------------------------------------------------
  if (c.scenario != Scenario::entangle_scan) {
    const YAML::Node ut = r.user_section("time");
    YAML::Node tnode;
    if (ut.IsMap() && (ut["start"] || ut["stop"] || ut["points"] || ut["values"])) {
      tnode = ut;
    } else {
      tnode = YAML::Load(default_yaml(c.scenario))["time"];
      r.pick("time", {"start", "values"}, "the time grid");  // records the default
    }
    c.time.values = grid_values(r, tnode, "time", &c.time.start, &c.time.stop, &c.time.points);
    std::string unit;
    if (ut.IsMap() && ut["unit"]) {
      unit = r.text(ut["unit"], "time.unit");
    } else {
      unit = tnode["unit"] ? tnode["unit"].Scalar() : "seconds";
      if (tnode != ut) r.pick("time", {"unit"}, "the time unit");
    }
    if (unit == "seconds") {
      c.time.unit = TimeUnit::seconds;
    } else if (unit == "inverse-Omega" || unit == "inverse-omega") {
      c.time.unit = TimeUnit::inverse_omega;
      if (c.coupling == 0.0) r.fail(ut["unit"] ? ut["unit"] : ut, "time.unit inverse-Omega needs a non-zero coupling");
    } else {
      r.fail(ut["unit"], "time.unit must be 'seconds' or 'inverse-Omega'");
    }
    const double scale = c.time.unit == TimeUnit::seconds ? 1.0 : 1.0 / std::abs(c.coupling);
    for (double v : c.time.values) {
      if (v < 0.0) r.fail(tnode, "times must be non-negative");
      c.times_seconds.push_back(v * scale);
    }
  } else if (r.user_section("time").IsDefined()) {
    r.fail(r.user_section("time"), "entangle-scan takes its time axis from scan.axes");
  }

  // --- scenario-specific --------------------------------------------------
  if (c.scenario == Scenario::fim) {
    const auto e = r.require("fim", {"entries"}, "the list of FIM entries");
    if (!e.node.IsSequence() || e.node.size() == 0) r.fail(e.node, "fim.entries must be a non-empty list");
    for (const auto& x : e.node) c.fim_entries.push_back(parse_entry(r, x));
    const auto v = r.require("fim", {"view"}, "the FIM view");
    const std::string view = r.text(v.node, "fim.view");
    if (view != "raw" && view != "dimensionless") r.fail(v.node, "fim.view must be 'raw' or 'dimensionless'");
    c.fim_dimensionless = view == "dimensionless";
  } else if (r.user_section("fim").IsDefined()) {
    r.fail(r.user_section("fim"), "'fim' settings only apply to the fim scenario");
  }

  if (c.scenario == Scenario::crb || c.scenario == Scenario::mle) {
    const auto m = r.require("estimation", {"repetitions"}, "the number of repetitions M");
    c.repetitions = r.count(m.node, "estimation.repetitions");
    if (c.repetitions < 1) r.fail(m.node, "estimation.repetitions must be at least 1");
    if (c.scenario == Scenario::mle) {
      const auto tr = r.require("estimation", {"trials"}, "the number of trials");
      c.trials = r.count(tr.node, "estimation.trials");
      if (c.trials < 1) r.fail(tr.node, "estimation.trials must be at least 1");
      const auto tg = r.require("estimation", {"target"}, "the target parameter");
      c.target = r.text(tg.node, "estimation.target");
      static const std::set<std::string> names = {"n1_0", "n2_0", "Omega", "gamma", "gamma12", "nbar"};
      if (!names.count(c.target)) r.fail(tg.node, "estimation.target must be one of n1_0, n2_0, Omega, gamma, gamma12, nbar");
      const auto br = r.require("estimation", {"bracket"}, "the search bracket");
      const auto b = r.numbers(br.node, "estimation.bracket");
      if (b.size() != 2 || !(b[1] > b[0])) r.fail(br.node, "estimation.bracket must be [lo, hi] with lo < hi");
      c.bracket_lo = b[0];
      c.bracket_hi = b[1];
    } else {
      const YAML::Node us = r.user_section("estimation");
      for (const char* k : {"trials", "target", "bracket"})
        if (us.IsMap() && us[k]) r.fail(us[k], std::string("estimation.") + k + " only applies to the mle scenario");
    }
  } else if (r.user_section("estimation").IsDefined()) {
    r.fail(r.user_section("estimation"), "'estimation' settings only apply to the crb and mle scenarios");
  }

  if (c.scenario == Scenario::entangle_scan) {
    const auto a = r.require("scan", {"axes"}, "the scan axes");
    if (!a.node.IsSequence() || a.node.size() < 2 || a.node.size() > 3)
      r.fail(a.node, "scan.axes must list two or three axes");
    for (const auto& ax : a.node) {
      r.check_keys(ax, "scan axis", {"axis", "start", "stop", "points", "values"});
      if (!ax["axis"]) r.fail(ax, "scan axis: missing 'axis'");
      ScanAxisSpec s;
      s.axis = r.text(ax["axis"], "scan axis name");
      if (!kScanAxes.count(s.axis)) r.fail(ax["axis"], "scan axis must be one of t, gamma12_over_gamma, temperature_ratio, r");
      for (const auto& prev : c.axes)
        if (prev.axis == s.axis) r.fail(ax["axis"], "duplicate scan axis '" + s.axis + "'");
      s.values = grid_values(r, ax, "scan axis " + s.axis);
      for (double v : s.values) {
        if (s.axis == "t" && v < 0.0) r.fail(ax, "scan axis t: times must be non-negative");
        if (s.axis == "gamma12_over_gamma" && (v < 0.0 || v > 1.0)) r.fail(ax, "scan axis gamma12_over_gamma must lie in [0, 1]");
        if (s.axis == "temperature_ratio" && !(v > 0.0)) r.fail(ax, "scan axis temperature_ratio must be positive");
      }
      c.axes.push_back(std::move(s));
    }
    bool has_t = false;
    for (const auto& s : c.axes) has_t |= s.axis == "t";
    if (!has_t) r.fail(a.node, "scan.axes must include the time axis t");
    if (c.gamma12_ratios.size() != 1) r.fail(g12.node, "entangle-scan takes a single fixed cross-damping value");
  } else if (r.user_section("scan").IsDefined()) {
    r.fail(r.user_section("scan"), "'scan' settings only apply to the entangle-scan scenario");
  }

  if (c.scenario == Scenario::dfs_null) {
    for (double x : c.gamma12_ratios)
      if (x != 1.0) r.fail(g12.node, "dfs-null requires gamma12 == gamma");
    for (double t : c.times_seconds)
      if (t < 10.0 / c.gamma * (1.0 - 1e-12)) r.fail(r.user_section("time"), "dfs-null requires every time >= 10/gamma");
    if (c.times_seconds.size() < 2) r.fail(r.user_section("time"), "dfs-null needs at least two times");
  }

  // --- run settings -------------------------------------------------------
  if (user["seed"]) c.seed = r.count(user["seed"], "seed");
  if (user["workers"]) {
    c.workers = static_cast<unsigned>(r.count(user["workers"], "workers"));
    if (c.workers < 1) r.fail(user["workers"], "workers must be at least 1");
  }
  const YAML::Node out = r.user_section("output");
  if (out.IsMap() && out["dir"]) c.out_dir = r.text(out["dir"], "output.dir");
  if (out.IsMap() && out["format"]) {
    c.format = r.text(out["format"], "output.format");
    if (c.format != "csv" && c.format != "json") r.fail(out["format"], "output.format must be csv or json");
  }

  if (ov.seed) c.seed = *ov.seed;
  if (ov.workers) c.workers = *ov.workers;
  if (ov.format) c.format = *ov.format;
  if (ov.out_dir) c.out_dir = *ov.out_dir;
  if (c.out_dir.empty()) c.out_dir = std::string("crossdamp-out/") + scenario_name(c.scenario);
  c.defaulted = r.defaulted();
  return c;
}

nlohmann::ordered_json ScenarioConfig::resolved_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario_name(scenario);
  j["model"] = {{"omega0_rad_s", omega0},
                {"coupling_rad_s", coupling},
                {"gamma_per_s", gamma},
                {"gamma12_over_gamma", gamma12_ratios},
                {"nbar", nbar}};
  std::vector<double> g12;
  for (double x : gamma12_ratios) g12.push_back(x * gamma);
  j["model"]["gamma12_per_s"] = g12;
  if (temperature_ratio) j["model"]["temperature_ratio"] = *temperature_ratio;
  j["initial"] = {{"n1", n1}, {"n2", n2}};
  if (m1 != 0.0 || m2 != 0.0) {
    j["initial"]["m1"] = {m1.real(), m1.imag()};
    j["initial"]["m2"] = {m2.real(), m2.imag()};
  }
  if (scenario == Scenario::entangle_evolve || scenario == Scenario::entangle_scan) j["initial"]["r"] = squeeze_r;
  if (!times_seconds.empty()) {
    j["time"] = {{"unit", time.unit == TimeUnit::seconds ? "seconds" : "inverse-Omega"},
                 {"points", times_seconds.size()},
                 {"first_s", times_seconds.front()},
                 {"last_s", times_seconds.back()}};
  }
  if (scenario == Scenario::fim) {
    std::vector<std::string> e;
    for (auto [a, b] : fim_entries) e.push_back("F" + std::to_string(a) + std::to_string(b));
    j["fim"] = {{"entries", e}, {"view", fim_dimensionless ? "dimensionless" : "raw"}};
  }
  if (scenario == Scenario::crb) j["estimation"] = {{"repetitions", repetitions}};
  if (scenario == Scenario::mle)
    j["estimation"] = {{"target", target}, {"repetitions", repetitions}, {"trials", trials},
                       {"bracket", {bracket_lo, bracket_hi}}};
  if (scenario == Scenario::entangle_scan) {
    auto& ax = j["scan"]["axes"] = nlohmann::ordered_json::array();
    for (const auto& a : axes)
      ax.push_back({{"axis", a.axis}, {"points", a.values.size()}, {"first", a.values.front()}, {"last", a.values.back()}});
  }
  return j;
}

nlohmann::ordered_json default_fixture(Scenario s) {
  std::function<nlohmann::ordered_json(const YAML::Node&)> conv = [&](const YAML::Node& n) -> nlohmann::ordered_json {
    if (n.IsMap()) {
      nlohmann::ordered_json o = nlohmann::ordered_json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = conv(kv.second);
      return o;
    }
    if (n.IsSequence()) {
      nlohmann::ordered_json a = nlohmann::ordered_json::array();
      for (const auto& x : n) a.push_back(conv(x));
      return a;
    }
    double d;
    if (YAML::convert<double>::decode(n, d)) return d;
    return n.Scalar();
  };
  return conv(YAML::Load(default_yaml(s)));
}

}  // namespace cdtool
