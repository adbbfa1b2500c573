#pragma once

// Result emission: CSV with round-trip precision, NDJSON streams, and the
// SHA-256 content hash used by run manifests.

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rdfront/error.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/snapshot.hpp"

namespace rdfront {

using json = nlohmann::ordered_json;

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
      : out_(path) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    bool first = true;
    for (auto h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << format_real(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

class NdjsonWriter {
 public:
  explicit NdjsonWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
  }
  void write(const json& record) { out_ << record.dump() << '\n'; }

 private:
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
}

/// Snapshot as CSV (x, u).
inline void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& s) {
  CsvWriter w(path, {"x", "u"});
  for (std::size_t j = 0; j < s.size(); ++j) w.row({s.x(j), s.values[j]});
}

/// Medium cells as CSV (cell_index, value).
inline void write_medium_csv(const std::filesystem::path& path, const MediumRealization& m,
                             std::int64_t j0, std::int64_t j1) {
  CsvWriter w(path, {"cell_index", "value"});
  for (auto [j, v] : m.cells(j0, j1)) w.row({static_cast<double>(j), v});
}

/// One observer record as an NDJSON object; absent positions become null.
inline json to_json(const FrontDiagnostics& d) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  return json{{"t", d.t},
              {"X", opt(d.X)},
              {"X_h_l", opt(d.X_h_l)},
              {"X_k_r", opt(d.X_k_r)},
              {"slope_at_X", num(d.slope_at_X)},
              {"window_bounds", json::array({d.window_left, d.window_right})}};
}

}  // namespace rdfront
