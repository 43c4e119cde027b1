#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "lyapscope/types.hpp"

namespace lyap {

// Doubles at 17 significant digits: value-preserving and byte-stable per
// platform.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

using CsvCell = std::variant<std::string, std::int64_t, double>;

// RFC-4180: comma separated, quotes doubled, cells quoted when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(std::vector<CsvCell> cells) {
    if (cells.size() != header_.size())
      throw InvalidArgument("CsvWriter: row width does not match header");
    rows_.push_back(std::move(cells));
  }

  std::size_t row_count() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& r : rows_) {
      std::vector<std::string> cells;
      cells.reserve(r.size());
      for (const auto& c : r) {
        if (std::holds_alternative<std::string>(c))
          cells.push_back(std::get<std::string>(c));
        else if (std::holds_alternative<std::int64_t>(c))
          cells.push_back(std::to_string(std::get<std::int64_t>(c)));
        else
          cells.push_back(fmt_double(std::get<double>(c)));
      }
      append_line(out, cells);
    }
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + path.string());
    f << str();
  }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quoted(cells[i]);
    }
    out += "\r\n";
  }

  static std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    q += '"';
    return q;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + tmp.string());
    f << text;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace lyap
