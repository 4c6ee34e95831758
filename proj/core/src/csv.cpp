#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adahuber/dataset.hpp"
#include "adahuber/errors.hpp"

namespace adahuber {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// RFC 4180 record splitting for a single physical line. Quoted fields may
// contain commas and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && trim(field).empty()) {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (c == ',') {
      fields.emplace_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw ParseError("line " + std::to_string(line_no) + ": unterminated quoted field");
  }
  fields.emplace_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

bool parse_real(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& y_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");

  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    records.emplace_back(line_no, split_record(line, line_no));
  }
  if (in.bad()) throw std::runtime_error("read failure on '" + path.string() + "'");
  if (records.empty()) throw ParseError("'" + path.string() + "' is empty");

  const std::size_t width = records.front().second.size();
  bool has_header = false;
  for (const auto& cell : records.front().second) {
    double ignored = 0.0;
    if (!parse_real(cell, ignored)) has_header = true;
  }

  std::vector<std::string> names(width);
  for (std::size_t c = 0; c < width; ++c) {
    names[c] = has_header ? records.front().second[c] : std::to_string(c + 1);
  }

  const std::size_t first_row = has_header ? 1 : 0;
  const std::size_t n = records.size() - first_row;
  if (n == 0) throw ParseError("'" + path.string() + "' has a header but no data rows");
  if (width < 2) throw ParseError("'" + path.string() + "' needs at least two columns");

  std::size_t y_index = 0;
  if (const auto* name = std::get_if<std::string>(&y_column)) {
    if (!has_header) {
      throw ParseError("response column '" + *name + "' requested but the file has no header");
    }
    const auto it = std::find(names.begin(), names.end(), *name);
    if (it == names.end()) throw ParseError("no column named '" + *name + "'");
    y_index = static_cast<std::size_t>(it - names.begin());
  } else {
    y_index = std::get<std::size_t>(y_column);
    if (y_index >= width) {
      throw ParseError("response column index " + std::to_string(y_index) +
                       " out of range for " + std::to_string(width) + " columns");
    }
  }

  MatrixXd X(static_cast<Index>(n), static_cast<Index>(width - 1));
  VectorXd y(static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& [file_line, cells] = records[first_row + r];
    if (cells.size() != width) {
      throw ParseError("row " + std::to_string(file_line) + ": expected " +
                       std::to_string(width) + " fields, found " + std::to_string(cells.size()));
    }
    Index x_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      double value = 0.0;
      if (!parse_real(cells[c], value)) {
        throw ParseError("row " + std::to_string(file_line) + ", column \"" + names[c] +
                         "\": cannot parse '" + cells[c] + "' as a finite number");
      }
      if (c == y_index) {
        y(static_cast<Index>(r)) = value;
      } else {
        X(static_cast<Index>(r), x_col++) = value;
      }
    }
  }
  return Dataset(std::move(X), std::move(y));
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  char buf[32];
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data.X()(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.y()(i));
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failure on '" + path.string() + "'");
}

}  // namespace adahuber
