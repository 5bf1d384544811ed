#ifndef CROSSDAMP_TOOL_OUTPUT_HPP
#define CROSSDAMP_TOOL_OUTPUT_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cdtool {

std::string sha256_file(const std::filesystem::path& p);
std::string format_double(double x);  // %.17g, with nan/inf spelled out

// Files produced by one run, relative to the output directory. Everything
// listed here is removed again if the run fails.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path open(const std::string& name);  // registers and returns the full path
  const std::vector<std::string>& files() const { return files_; }
  void remove_all() noexcept;

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

using Cell = std::variant<double, std::int64_t, std::string, bool>;

// Long-format table streamed row by row: CSV with a header line, or a JSON
// array of objects. Doubles are written with 17 significant digits in CSV and
// as shortest round-trip numbers in JSON.
class TableWriter {
 public:
  TableWriter(OutputSet& out, const std::string& stem, std::vector<std::string> columns, const std::string& format);
  ~TableWriter();
  TableWriter(const TableWriter&) = delete;
  TableWriter& operator=(const TableWriter&) = delete;

  void row(const std::vector<Cell>& cells);
  void close();
  const std::string& name() const { return name_; }

 private:
  std::ofstream os_;
  std::string name_;
  std::vector<std::string> columns_;
  bool json_ = false;
  bool first_ = true;
  bool closed_ = false;
};

void write_json_file(OutputSet& out, const std::string& name, const nlohmann::ordered_json& j);

}  // namespace cdtool

#endif
