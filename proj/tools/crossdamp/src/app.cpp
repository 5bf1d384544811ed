#include "app.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "crossdamp/error.hpp"
#include "output.hpp"
#include "scenarios.hpp"

#ifndef CROSSDAMP_VERSION
#define CROSSDAMP_VERSION "0.0.0"
#endif
#ifndef CROSSDAMP_GIT_HASH
#define CROSSDAMP_GIT_HASH "unknown"
#endif

namespace cdtool {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs `fn` with the scenario name prepended to any error message.
template <class Fn>
auto with_context(const ScenarioConfig& cfg, Fn&& fn) {
  const std::string ctx = std::string("scenario '") + scenario_name(cfg.scenario) + "': ";
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + e.what());
  } catch (const crossdamp::numerical_error& e) {
    throw crossdamp::numerical_error(ctx + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(ctx + e.what());
  }
}

}  // namespace

RunOutcome run_config_file(const std::string& config_path, const Overrides& overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const ScenarioConfig cfg = load_config(config_path, overrides);

  RunOutcome res;
  res.out_dir = cfg.out_dir;
  bool made_dir = false;
  {
    std::error_code ec;
    if (!fs::exists(res.out_dir)) {
      made_dir = fs::create_directories(res.out_dir, ec);
      if (ec) throw std::runtime_error("cannot create output directory " + res.out_dir.string() + ": " + ec.message());
    } else if (!fs::is_directory(res.out_dir)) {
      throw ValidationError("output path " + res.out_dir.string() + " exists and is not a directory");
    }
  }

  OutputSet out(res.out_dir);
  try {
    const auto summary = with_context(cfg, [&] { return run_scenario(cfg, out); });

    nlohmann::ordered_json m;
    m["tool"] = "crossdamp";
    m["version"] = CROSSDAMP_VERSION;
    m["git"] = CROSSDAMP_GIT_HASH;
    m["scenario"] = scenario_name(cfg.scenario);
    m["config"] = {{"path", fs::absolute(config_path).lexically_normal().string()},
                   {"sha256", sha256_file(config_path)}};
    m["seed"] = cfg.seed;
    m["workers"] = cfg.workers;
    m["format"] = cfg.format;
    m["resolved"] = cfg.resolved_json();
    m["defaults_applied"] = cfg.defaulted;
    m["summary"] = summary;
    auto& files = m["outputs"] = nlohmann::ordered_json::array();
    for (const auto& f : out.files())
      files.push_back({{"path", f}, {"sha256", sha256_file(out.dir() / f)}, {"bytes", fs::file_size(out.dir() / f)}});
    m["started_at"] = started;
    m["duration_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json_file(out, "manifest.json", m);
    res.manifest = std::move(m);
  } catch (...) {
    out.remove_all();
    std::error_code ec;
    if (made_dir && fs::is_empty(res.out_dir, ec)) fs::remove(res.out_dir, ec);
    throw;
  }
  return res;
}

int verify_manifest(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  nlohmann::json m;
  try {
    std::ifstream in(manifest_path);
    if (!in) {
      err << "crossdamp: error: cannot open manifest " << manifest_path << "\n";
      return kExitValidation;
    }
    m = nlohmann::json::parse(in);
    if (!m.contains("outputs") || !m["outputs"].is_array()) throw std::invalid_argument("no 'outputs' array");
  } catch (const std::exception& e) {
    err << "crossdamp: error: " << manifest_path << ": invalid manifest: " << e.what() << "\n";
    return kExitValidation;
  }
  const fs::path dir = fs::path(manifest_path).parent_path();
  std::size_t bad = 0;
  for (const auto& o : m["outputs"]) {
    std::string path, want;
    std::uintmax_t bytes = 0;
    try {
      path = o.at("path").get<std::string>();
      want = o.at("sha256").get<std::string>();
      bytes = o.at("bytes").get<std::uintmax_t>();
    } catch (const std::exception& e) {
      err << "crossdamp: error: " << manifest_path << ": malformed output entry: " << e.what() << "\n";
      return kExitValidation;
    }
    const fs::path p = dir / path;
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
      out << "MISSING  " << path << "\n";
      ++bad;
      continue;
    }
    const auto size = fs::file_size(p, ec);
    const std::string got = sha256_file(p);
    if (got != want || size != bytes) {
      out << "MISMATCH " << path << "\n";
      ++bad;
    } else {
      out << "ok       " << path << "\n";
    }
  }
  out << (bad ? "verify: FAILED, " + std::to_string(bad) + " problem(s)\n" : std::string("verify: all outputs match\n"));
  return bad ? kExitFailure : kExitOk;
}

nlohmann::ordered_json list_json() {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (const auto& s : scenarios()) a.push_back({{"name", s.name}, {"summary", s.summary}, {"defaults", default_fixture(s.id)}});
  return a;
}

int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"crossdamp: two trapped ions with cross-damping"};
  app.set_version_flag("--version", std::string(CROSSDAMP_VERSION) + " (" + CROSSDAMP_GIT_HASH + ")");
  app.require_subcommand(1);

  std::string config, manifest, list_format = "text";
  Overrides ov;
  std::string out_dir, format;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool list_json_flag = false;

  auto* run = app.add_subcommand("run", "run the scenario described by a YAML configuration");
  run->add_option("config", config, "configuration file")->required();
  auto* o_out = run->add_option("--out-dir", out_dir, "output directory (overrides output.dir)");
  auto* o_seed = run->add_option("--seed", seed, "master random seed");
  auto* o_workers = run->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 4096u));
  auto* o_format = run->add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));

  auto* list = app.add_subcommand("list", "list the available scenarios and their defaults");
  list->add_option("--format", list_format, "text or json")->check(CLI::IsMember({"text", "json"}));
  list->add_flag("--json", list_json_flag, "same as --format json");

  auto* verify = app.add_subcommand("verify", "check output checksums against a manifest");
  verify->add_option("manifest", manifest, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*list) {
    if (list_json_flag || list_format == "json") {
      out << list_json().dump(2) << "\n";
    } else {
      for (const auto& s : scenarios()) {
        char line[160];
        std::snprintf(line, sizeof line, "%-16s %s\n", s.name, s.summary);
        out << line;
      }
      out << "\nDefaults per scenario: crossdamp list --json. The entanglement scenarios default to r = 2.0.\n";
    }
    return kExitOk;
  }

  if (*verify) {
    try {
      return verify_manifest(manifest, out, err);
    } catch (const std::exception& e) {
      err << "crossdamp: error: " << e.what() << "\n";
      return kExitFailure;
    }
  }

  if (*o_out) ov.out_dir = out_dir;
  if (*o_seed) ov.seed = seed;
  if (*o_workers) ov.workers = workers;
  if (*o_format) ov.format = format;
  try {
    const auto res = run_config_file(config, ov);
    out << "wrote " << res.manifest["outputs"].size() << " file(s) to " << res.out_dir.string() << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "crossdamp: error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const crossdamp::numerical_error& e) {
    err << "crossdamp: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "crossdamp: error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "crossdamp: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace cdtool
