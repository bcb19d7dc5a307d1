#pragma once

// Minimal numeric CSV helpers shared by the serializers.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sirsvax::detail {

/// n such that n (n + 1) / 2 == count; throws otherwise.
int grid_n_from_count(std::size_t count);

inline void put_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  out << buf;
}

inline void put_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    put_number(out, v);
    first = false;
  }
  out << '\n';
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

/// Reads a header row followed by numeric rows; checks the header matches.
inline CsvTable read_csv(std::istream& in,
                         const std::vector<std::string>& expected_header) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  table.header = split_fields(line);
  if (table.header != expected_header) {
    throw std::runtime_error("csv: unexpected header '" + line + "'");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != expected_header.size()) {
      throw std::runtime_error("csv: wrong field count in '" + line + "'");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      std::size_t used = 0;
      row.push_back(std::stod(f, &used));
      if (used != f.size()) throw std::runtime_error("csv: bad number '" + f + "'");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace sirsvax::detail
