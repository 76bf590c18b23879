#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace swamp {

  namespace detail {

    [[nodiscard]] inline std::string_view trim(std::string_view s) {
      const auto ws = " \t\r\n";
      const auto b = s.find_first_not_of(ws);
      if (b == std::string_view::npos) { return {}; }
      const auto e = s.find_last_not_of(ws);
      return s.substr(b, e - b + 1);
    }

    [[nodiscard]] inline std::optional<double> parse_double(std::string_view s) {
      s = trim(s);
      if (!s.empty() && s.front() == '+') { s.remove_prefix(1); }
      double v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) { return std::nullopt; }
      return v;
    }

    [[nodiscard]] inline std::vector<std::string_view> split_commas(std::string_view line) {
      std::vector<std::string_view> out;
      std::size_t start = 0;
      for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) { return out; }
        start = pos + 1;
      }
    }

    [[nodiscard]] inline bool all_digits(std::string_view s) {
      return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
    }

  } // namespace detail

  /// Reads one value per line, or with `column` (a header name or 1-based index) one field of each
  /// comma-separated row. Blank lines are skipped. With a column selector, a first row whose selected field
  /// is not numeric is taken as a header.
  [[nodiscard]] inline TimeSeries ingest(std::istream& in, const std::string& column = {},
                                         const std::string& name = {}) {
    std::vector<double> values;
    std::optional<std::size_t> index;
    if (!column.empty() && detail::all_digits(column)) {
      index = std::stoul(column);
      if (*index == 0) { throw DataError("column index is 1-based, got 0"); }
      *index -= 1;
    }
    bool first_row = true;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto text = detail::trim(line);
      if (text.empty()) { continue; }
      std::string_view field = text;
      if (!column.empty()) {
        const auto fields = detail::split_commas(text);
        if (first_row && !index) {
          for (std::size_t k = 0; k < fields.size(); ++k) {
            if (fields[k] == column) { index = k; }
          }
          if (!index) { throw DataError("line " + std::to_string(line_no) + ": no column named '" + column + "'"); }
          first_row = false;
          continue;
        }
        if (*index >= fields.size()) {
          throw DataError("line " + std::to_string(line_no) + ": missing column " + std::to_string(*index + 1));
        }
        field = fields[*index];
      }
      const auto value = detail::parse_double(field);
      if (!value) {
        if (first_row && !column.empty()) {
          first_row = false;
          continue;
        }
        throw DataError("line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
      }
      if (!std::isfinite(*value)) {
        throw DataError("line " + std::to_string(line_no) + ": non-finite value '" + std::string(field) + "'");
      }
      first_row = false;
      values.push_back(*value);
    }
    return TimeSeries(std::move(values), name);
  }

  [[nodiscard]] inline TimeSeries ingest_file(const std::string& path, const std::string& column = {}) {
    std::ifstream in(path);
    if (!in) { throw DataError("cannot read '" + path + "'"); }
    return ingest(in, column, path);
  }

} // namespace swamp
