#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qrb {

using CsvValue = std::variant<long long, double, std::string>;
using CsvRow = std::vector<CsvValue>;

struct CsvSchema {
  std::vector<std::string> columns;
};

namespace csv_detail {

inline std::string format_value(const CsvValue& v) {
  if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
  if (std::holds_alternative<double>(v)) {
    // 12 significant digits, plain decimal point, no separators.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", std::get<double>(v));
    return buf;
  }
  const std::string& s = std::get<std::string>(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace csv_detail

/// Header row followed by data rows; every record must match the schema
/// width and per-column value kind.
inline std::string emit_csv(const CsvSchema& schema, const std::vector<CsvRow>& rows) {
  if (schema.columns.empty()) throw std::invalid_argument("emit_csv: schema has no columns");
  std::ostringstream os;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (c) os << ',';
    os << schema.columns[c];
  }
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.columns.size())
      throw std::invalid_argument("emit_csv: row " + std::to_string(r) + " does not match the schema width");
    if (r > 0) {
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        if (rows[r][c].index() != rows[0][c].index())
          throw std::invalid_argument("emit_csv: heterogeneous records in column '" + schema.columns[c] + "'");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c) os << ',';
      os << csv_detail::format_value(rows[r][c]);
    }
    os << '\n';
  }
  return os.str();
}

/// Atomic write: temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_csv_file(const std::filesystem::path& path, const CsvSchema& schema,
                           const std::vector<CsvRow>& rows) {
  write_file_atomic(path, emit_csv(schema, rows));
}

}  // namespace qrb
