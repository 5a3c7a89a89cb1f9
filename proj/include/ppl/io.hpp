#pragma once

// CSV and JSON emission. Numbers carry 12 significant digits; JSON keys
// come out sorted.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppl/errors.hpp"

namespace ppl {

using json = nlohmann::json;

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string format_number(std::int64_t x) { return std::to_string(x); }
inline std::string format_number(std::uint64_t x) { return std::to_string(x); }

// Rounds to 12 significant digits so the JSON writer's shortest round-trip
// form prints at most that many.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

// NaN and infinities are not JSON numbers; they go out as null.
inline json json_number(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw domain_error("CsvTable: row width differs from header");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_csv(const CsvTable& t, std::ostream& os) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_field(cells[i]);
    }
    os << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline std::string to_csv(const CsvTable& t) {
  std::ostringstream os;
  write_csv(t, os);
  return os.str();
}

namespace detail {

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open " + path + " for writing");
  os << text;
  os.flush();
  if (!os) throw io_error("write to " + path + " failed");
}

}  // namespace detail

inline void emit_csv(const CsvTable& t, const std::string& path) { detail::write_file(path, to_csv(t)); }

inline std::string to_json_text(const json& j) { return j.dump(2) + "\n"; }

inline void emit_json(const json& j, const std::string& path) { detail::write_file(path, to_json_text(j)); }

}  // namespace ppl
