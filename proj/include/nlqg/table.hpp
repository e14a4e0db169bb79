#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "nlqg/error.hpp"

namespace nlqg {

/// Time-ordered samples with named numeric columns; the unit of CSV output.
struct Trajectory {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit Trajectory(std::vector<std::string> names = {}) : columns(std::move(names)) {}

  void append(std::vector<double> row) {
    require(row.size() == columns.size(), "trajectory row width does not match its columns");
    rows.push_back(std::move(row));
  }

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw ValidationError("trajectory has no column '" + name + "'");
  }

  std::vector<double> column(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }

  const std::vector<double>& back() const { return rows.back(); }
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const Trajectory& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

inline void write_csv(const Trajectory& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(t, out);
}

/// Reads a numeric CSV with a header row (as written by write_csv).
inline Trajectory read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + " is empty");
  Trajectory t;
  {
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      t.columns.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string cell = line.substr(start, comma - start);
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                              ": not a number: '" + cell + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != t.columns.size())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.columns.size()) + " columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace nlqg
