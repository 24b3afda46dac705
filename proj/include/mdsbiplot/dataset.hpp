#pragma once

// CSV ingestion. Accepts the RFC 4180 subset: comma separated, optional
// double-quoted fields with "" escapes, CRLF or LF line ends, '.' decimals.

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdsbiplot/numerics.hpp"

namespace mdsbiplot {

struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::string> names;
  Matrix X;
  ScaleMode scaling = ScaleMode::none;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

namespace detail {

inline std::string cell_position(std::size_t row, std::size_t col) {
  return "(" + std::to_string(row) + "," + std::to_string(col) + ")";
}

inline std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;  // for the unterminated-quote message
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // a blank line is not a record
    if (!(record.size() == 1 && record[0].empty() && !field_started)) {
      records.push_back(std::move(record));
    }
    record.clear();
    field_started = false;
  };
  const std::size_t start = text.rfind("\xEF\xBB\xBF", 0) == 0 ? 3 : 0;  // UTF-8 BOM
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (quoted) {
    throw std::invalid_argument("csv: unterminated quoted field starting near line " +
                                std::to_string(record_line));
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace detail

/// Parse CSV text. Positions in errors are (row, column), 1-based over the
/// file's records and fields, header included.
inline Dataset parse_csv(const std::string& text, bool has_header = true,
                         const std::optional<std::string>& id_column = std::nullopt) {
  const auto records = detail::split_csv(text);
  if (records.empty()) throw std::invalid_argument("csv: no data");
  const std::size_t width = records.front().size();
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw std::invalid_argument("csv: ragged row at " +
                                  detail::cell_position(r + 1, records[r].size()) + ": expected " +
                                  std::to_string(width) + " fields, got " +
                                  std::to_string(records[r].size()));
    }
  }

  std::vector<std::string> header;
  if (has_header) {
    for (const auto& h : records.front()) header.push_back(detail::trim(h));
  } else {
    for (std::size_t j = 0; j < width; ++j) header.push_back("V" + std::to_string(j + 1));
  }

  std::optional<std::size_t> id_col;
  if (id_column) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == *id_column) id_col = j;
    }
    if (!id_col) throw std::invalid_argument("csv: id column '" + *id_column + "' not found");
  }

  Dataset ds;
  for (std::size_t j = 0; j < width; ++j) {
    if (id_col && j == *id_col) continue;
    ds.names.push_back(header[j]);
  }
  {
    std::set<std::string> seen;
    for (const auto& nm : ds.names) {
      if (!seen.insert(nm).second) throw std::invalid_argument("csv: duplicate column name '" + nm + "'");
    }
  }
  if (ds.names.empty()) throw std::invalid_argument("csv: no numeric columns");

  const std::size_t first = has_header ? 1 : 0;
  const auto n = static_cast<Eigen::Index>(records.size() - first);
  if (n == 0) throw std::invalid_argument("csv: header but no data rows");
  ds.X.resize(n, static_cast<Eigen::Index>(ds.names.size()));
  std::set<std::string> seen_ids;
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r - first);
    Eigen::Index out = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (id_col && j == *id_col) {
        const std::string id = detail::trim(records[r][j]);
        if (!seen_ids.insert(id).second) {
          throw std::invalid_argument("csv: duplicate id '" + id + "' at " +
                                      detail::cell_position(r + 1, j + 1));
        }
        ds.ids.push_back(id);
        continue;
      }
      const auto v = detail::parse_number(records[r][j]);
      if (!v) {
        throw std::invalid_argument("csv: non-numeric value '" + records[r][j] + "' at " +
                                    detail::cell_position(r + 1, j + 1));
      }
      ds.X(i, out++) = *v;
    }
    if (!id_col) ds.ids.push_back(std::to_string(i + 1));
  }
  return ds;
}

inline Dataset ingest_csv(const std::string& path, bool has_header = true,
                          const std::optional<std::string>& id_column = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), has_header, id_column);
}

}  // namespace mdsbiplot
