#pragma once

// Deterministic text IO: shortest round-trip double formatting and a strict
// numeric CSV reader/writer. Identical data always serializes to identical
// bytes, and every emitted file re-parses bit-exactly.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wavefan/core.hpp"

namespace wavefan::io {

struct ParseError : Error {
  using Error::Error;
};

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError("not a number: '" + std::string(text) + "'");
  return value;
}

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& out, const Csv& table) {
  if (table.columns.empty()) throw DomainError("csv needs at least one column");
  for (const std::string& name : table.columns)
    if (name.empty() || name.find_first_of(",\r\n") != std::string::npos)
      throw DomainError("bad csv column name: '" + name + "'");
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const std::vector<double>& row : table.rows) {
    if (row.size() != table.columns.size())
      throw DomainError("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

namespace detail_io {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace detail_io

inline Csv read_csv(std::istream& in) {
  Csv table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const std::vector<std::string_view> fields = detail_io::split_fields(line);
    if (table.columns.empty()) {
      for (std::string_view f : fields) {
        if (f.empty())
          throw ParseError("line 1: empty csv column name");
        table.columns.emplace_back(f);
      }
      continue;
    }
    if (fields.size() != table.columns.size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(table.columns.size()) + " fields, got " +
                       std::to_string(fields.size()));
    std::vector<double>& row = table.rows.emplace_back();
    row.reserve(fields.size());
    for (std::string_view f : fields) {
      try {
        row.push_back(parse_double(f));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  if (table.columns.empty()) throw ParseError("empty csv input");
  return table;
}

}  // namespace wavefan::io
