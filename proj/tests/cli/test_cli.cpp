#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "app.hpp"
#include "config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using cdtool::load_config;
using cdtool::Overrides;
using cdtool::ValidationError;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("crossdamp_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string validation_message(const fs::path& cfg) {
  try {
    load_config(cfg.string(), {});
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "crossdamp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cdtool::main_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

const char* kSmallPopulation = R"(scenario: population
model:
  coupling: 1.0
  gamma: 0.05
  gamma12_over_gamma: [0.0, 1.0]
  temperature_ratio: 0.1
initial: {n1: 0.35, n2: 2.3}
time: {start: 0, stop: 50, points: 101, unit: inverse-Omega}
)";

}  // namespace

TEST(CliConfig, TemperatureRatioRoundTrips) {
  TempDir d;
  for (double ratio : {0.01, 0.1, 1.0, 3.0, 10.0}) {
    std::ostringstream y;
    y.precision(17);
    y << "scenario: population\nmodel: {temperature_ratio: " << ratio << "}\n";
    const auto c = load_config(d.write("t.yaml", y.str()).string(), {});
    ASSERT_TRUE(c.temperature_ratio.has_value());
    EXPECT_NEAR(std::log1p(1.0 / c.nbar), ratio, 1e-12 * ratio);
  }
}

TEST(CliConfig, CrossDampingAbsoluteAndRatioAgree) {
  TempDir d;
  const auto a = load_config(
      d.write("a.yaml", "scenario: fim\nmodel: {coupling: 2.0, gamma: 0.4, gamma12: [0.1, 0.4]}\n").string(), {});
  const auto b = load_config(
      d.write("b.yaml", "scenario: fim\nmodel: {coupling: 2.0, gamma_over_omega: 0.2, gamma12_over_gamma: [0.25, 1.0]}\n")
          .string(),
      {});
  ASSERT_EQ(a.gamma12_ratios.size(), 2u);
  EXPECT_NEAR(a.gamma, b.gamma, 1e-15);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(a.gamma12_ratios[i], b.gamma12_ratios[i], 1e-12);
  EXPECT_EQ(b.gamma12_ratios[1] * b.gamma, b.gamma);  // the DFS point stays exact
}

TEST(CliConfig, ShorthandsAreExclusive) {
  TempDir d;
  const auto msg = validation_message(
      d.write("x.yaml", "scenario: population\nmodel:\n  gamma: 1.0\n  gamma_over_omega: 0.02\n"));
  EXPECT_NE(msg.find("x.yaml:4:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("conflicts"), std::string::npos) << msg;
  EXPECT_FALSE(validation_message(d.write("y.yaml", "scenario: fim\nmodel: {nbar: 1.0, temperature_ratio: 1.0}\n")).empty());
  EXPECT_FALSE(
      validation_message(d.write("z.yaml", "scenario: fim\nmodel: {gamma12: 0.1, gamma12_over_gamma: 0.5}\n")).empty());
}

TEST(CliConfig, UnknownKeysAndScenariosRejected) {
  TempDir d;
  auto msg = validation_message(d.write("u.yaml", "scenario: population\nmodel:\n  gama: 1.0\n"));
  EXPECT_NE(msg.find("u.yaml:3:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("gama"), std::string::npos);
  msg = validation_message(d.write("s.yaml", "scenario: nope\n"));
  EXPECT_NE(msg.find("unknown scenario"), std::string::npos) << msg;
  msg = validation_message(d.write("p.yaml", "scenario: population\nmodel: [1, 2\n"));
  EXPECT_NE(msg.find("p.yaml:"), std::string::npos) << msg;
}

TEST(CliConfig, EmptyOrBadGridsRejected) {
  TempDir d;
  EXPECT_NE(validation_message(d.write("a.yaml", "scenario: population\ntime: {start: 0, stop: 1, points: 0}\n"))
                .find("empty grid"),
            std::string::npos);
  EXPECT_NE(validation_message(d.write("b.yaml", "scenario: population\ntime: {values: []}\n")).find("empty grid"),
            std::string::npos);
  EXPECT_FALSE(validation_message(d.write("c.yaml", "scenario: population\ntime: {values: [1, 1]}\n")).empty());
  EXPECT_FALSE(validation_message(d.write("e.yaml", "scenario: population\ntime: {start: 2, stop: 1, points: 5}\n")).empty());
  EXPECT_FALSE(validation_message(d.write("f.yaml", "scenario: population\nmodel: {gamma12_over_gamma: 1.5}\n")).empty());
  EXPECT_FALSE(validation_message(d.write("g.yaml", "scenario: dfs-null\nmodel: {gamma12_over_gamma: 0.9}\n")).empty());
}

TEST(CliConfig, DefaultsAreRecorded) {
  TempDir d;
  const auto c = load_config(d.write("a.yaml", "scenario: entangle-scan\ninitial: {r: 1.0}\n").string(), {});
  EXPECT_EQ(c.squeeze_r, 1.0);
  EXPECT_EQ(c.axes.size(), 3u);
  const auto& def = c.defaulted;
  EXPECT_NE(std::find(def.begin(), def.end(), "scan.axes"), def.end());
  EXPECT_EQ(std::find(def.begin(), def.end(), "initial.r"), def.end());
}

TEST(CliConfig, OverridesWin) {
  TempDir d;
  Overrides ov;
  ov.seed = 99;
  ov.workers = 3;
  ov.format = "json";
  ov.out_dir = "elsewhere";
  const auto c = load_config(d.write("a.yaml", "scenario: mle\nseed: 5\noutput: {dir: here, format: csv}\n").string(), ov);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.workers, 3u);
  EXPECT_EQ(c.format, "json");
  EXPECT_EQ(c.out_dir, "elsewhere");
}

TEST(CliRun, DeterministicAcrossRunsAndWorkers) {
  TempDir d;
  const auto cfg = d.write("p.yaml", kSmallPopulation);
  for (const char* fmt : {"csv", "json"}) {
    std::vector<std::string> blobs;
    for (unsigned workers : {1u, 1u, 4u}) {
      Overrides ov;
      ov.format = fmt;
      ov.workers = workers;
      ov.out_dir = (d.path() / ("run" + std::to_string(blobs.size()) + fmt)).string();
      const auto res = cdtool::run_config_file(cfg.string(), ov);
      std::string all;
      for (const auto& o : res.manifest["outputs"]) all += slurp(res.out_dir / o["path"].get<std::string>());
      blobs.push_back(all);
    }
    EXPECT_EQ(blobs[0], blobs[1]);
    EXPECT_EQ(blobs[0], blobs[2]);
  }
}

TEST(CliRun, JsonTablesParse) {
  TempDir d;
  Overrides ov;
  ov.format = "json";
  ov.out_dir = (d.path() / "out").string();
  const auto res = cdtool::run_config_file(d.write("p.yaml", kSmallPopulation).string(), ov);
  const auto rows = nlohmann::json::parse(slurp(res.out_dir / "population.json"));
  ASSERT_EQ(rows.size(), 202u);
  EXPECT_DOUBLE_EQ(rows[0]["n1"].get<double>(), 0.35);
  EXPECT_DOUBLE_EQ(rows[0]["n2"].get<double>(), 2.3);
}

TEST(CliRun, VerifyDetectsTampering) {
  TempDir d;
  const auto out = d.path() / "out";
  ASSERT_EQ(cli({"run", d.write("p.yaml", kSmallPopulation).string(), "--out-dir", out.string()}), 0);
  const std::string manifest = (out / "manifest.json").string();
  std::string text;
  EXPECT_EQ(cli({"verify", manifest}, &text), 0) << text;

  {
    std::fstream f(out / "population.csv", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('9');
  }
  EXPECT_EQ(cli({"verify", manifest}, &text), 1);
  EXPECT_NE(text.find("MISMATCH population.csv"), std::string::npos) << text;
  fs::remove(out / "population.csv");
  EXPECT_EQ(cli({"verify", manifest}, &text), 1);
  EXPECT_NE(text.find("MISSING"), std::string::npos);
  EXPECT_EQ(cli({"verify", d.write("bad.json", "{not json").string()}), 2);
}

TEST(CliRun, ExitCodesAndCleanup) {
  TempDir d;
  std::string err;
  const auto bad = d.write("bad.yaml", "scenario: population\nmodel: {gamma: -1}\n");
  EXPECT_EQ(cli({"run", bad.string(), "--out-dir", (d.path() / "o1").string()}, nullptr, &err), 2);
  EXPECT_NE(err.find("bad.yaml"), std::string::npos) << err;

  // Nothing to learn from an empty mode: the numerical-domain exit code, and
  // no partial artifacts left behind.
  const auto empty = d.write("empty.yaml",
                             "scenario: fim\nmodel: {coupling: 1.0, gamma: 0.1, gamma12: 0.0, nbar: 0.0}\n"
                             "initial: {n1: 0.0, n2: 0.0}\ntime: {values: [1.0]}\n");
  const auto o2 = d.path() / "o2";
  EXPECT_EQ(cli({"run", empty.string(), "--out-dir", o2.string()}, nullptr, &err), 3);
  EXPECT_NE(err.find("scenario 'fim'"), std::string::npos) << err;
  EXPECT_FALSE(fs::exists(o2));

  EXPECT_EQ(cli({"run", (d.path() / "missing.yaml").string()}), 2);
  EXPECT_EQ(cli({"run", bad.string(), "--workers", "0"}), 2);
  EXPECT_EQ(cli({"run", bad.string(), "--format", "xml"}), 2);
  EXPECT_EQ(cli({"frobnicate"}), 2);
}

TEST(CliList, JsonListsEveryScenario) {
  std::string out;
  ASSERT_EQ(cli({"list", "--json"}, &out), 0);
  const auto j = nlohmann::json::parse(out);
  ASSERT_EQ(j.size(), 7u);
  std::vector<std::string> names;
  for (const auto& s : j) names.push_back(s["name"]);
  for (const char* n : {"population", "fim", "crb", "mle", "entangle-evolve", "entangle-scan", "dfs-null"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  for (const auto& s : j)
    if (s["name"] == "entangle-scan") EXPECT_EQ(s["defaults"]["initial"]["r"].get<double>(), 2.0);
  std::string text;
  ASSERT_EQ(cli({"list"}, &text), 0);
  EXPECT_NE(text.find("dfs-null"), std::string::npos);
}
