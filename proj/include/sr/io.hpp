#pragma once

#include <string>
#include <variant>
#include <vector>

namespace sr::io {

// A table cell: double (NaN serializes to empty/null), integer, or string.
using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

enum class Format { Csv, Json };

// CSV: header row, floats at 17 significant digits, LF endings, no locale.
// JSON: array of objects, key order = column order. NaN -> empty cell / null.
std::string render_table(const Table& t, Format f);
void write_table(const Table& t, const std::string& path, Format f);

// Serialize one double the way tables do (17 significant digits, C locale).
std::string format_double(double v);

// Grid notation: "linspace:a:b:n", "logspace:a:b:n", or comma-separated values.
std::vector<double> parse_grid(const std::string& text);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);

}  // namespace sr::io
