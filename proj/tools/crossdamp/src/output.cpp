#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <openssl/evp.h>

namespace cdtool {

std::string sha256_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char h[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(h, sizeof h, "%02x", md[i]);
    hex += h;
  }
  return hex;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::filesystem::path OutputSet::open(const std::string& name) {
  for (const auto& f : files_)
    if (f == name) throw std::logic_error("output file registered twice: " + name);
  files_.push_back(name);
  return dir_ / name;
}

void OutputSet::remove_all() noexcept {
  std::error_code ec;
  for (const auto& f : files_) std::filesystem::remove(dir_ / f, ec);
  files_.clear();
}

TableWriter::TableWriter(OutputSet& out, const std::string& stem, std::vector<std::string> columns,
                         const std::string& format)
    : name_(stem + (format == "json" ? ".json" : ".csv")), columns_(std::move(columns)), json_(format == "json") {
  const auto path = out.open(name_);
  os_.open(path, std::ios::binary | std::ios::trunc);
  if (!os_) throw std::runtime_error("cannot write " + path.string());
  if (json_) {
    os_ << "[";
  } else {
    for (std::size_t i = 0; i < columns_.size(); ++i) os_ << (i ? "," : "") << columns_[i];
    os_ << "\n";
  }
}

TableWriter::~TableWriter() {
  try {
    close();
  } catch (...) {
  }
}

void TableWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("TableWriter: row width mismatch in " + name_);
  if (json_) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              o[columns_[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(format_double(v));
            else
              o[columns_[i]] = v;
          },
          cells[i]);
    }
    os_ << (first_ ? "\n" : ",\n") << o.dump();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              os_ << format_double(v);
            else if constexpr (std::is_same_v<T, bool>)
              os_ << (v ? "true" : "false");
            else
              os_ << v;
          },
          cells[i]);
    }
    os_ << '\n';
  }
  first_ = false;
}

void TableWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (json_) os_ << (first_ ? "]\n" : "\n]\n");
  os_.close();
  if (!os_) throw std::runtime_error("write failed: " + name_);
}

void write_json_file(OutputSet& out, const std::string& name, const nlohmann::ordered_json& j) {
  const auto path = out.open(name);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("write failed: " + name);
}

}  // namespace cdtool
