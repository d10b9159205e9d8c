#include "sr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sr::io {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("Table::add_row: row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

void render_cell_csv(std::string& out, const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (std::isnan(v)) return;  // flagged value -> empty cell
    out += format_double(v);
  } else if (std::holds_alternative<long long>(c)) {
    out += std::to_string(std::get<long long>(c));
  } else {
    out += std::get<std::string>(c);
  }
}

void render_cell_json(std::string& out, const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (std::isnan(v)) {
      out += "null";
      return;
    }
    out += format_double(v);
  } else if (std::holds_alternative<long long>(c)) {
    out += std::to_string(std::get<long long>(c));
  } else {
    out += '"';
    out += json_escape(std::get<std::string>(c));
    out += '"';
  }
}

}  // namespace

std::string render_table(const Table& t, Format f) {
  std::string out;
  if (f == Format::Csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ',';
      out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        render_cell_csv(out, row[i]);
      }
      out += '\n';
    }
    return out;
  }
  out += "[\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += "  {";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ", ";
      out += '"';
      out += json_escape(t.columns[i]);
      out += "\": ";
      render_cell_json(out, t.rows[r][i]);
    }
    out += (r + 1 < t.rows.size()) ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

void write_table(const Table& t, const std::string& path, Format f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_table: cannot open " + path);
  const std::string body = render_table(t, f);
  os.write(body.data(), (std::streamsize)body.size());
  if (!os) throw std::runtime_error("write_table: write failed for " + path);
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n >= 1");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("logspace: endpoints must be positive");
  if (n < 1) throw std::invalid_argument("logspace: n >= 1");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) v[i] = std::exp(la + (lb - la) * i / (n - 1));
  return v;
}

std::vector<double> parse_grid(const std::string& text) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
  };
  if (text.rfind("linspace:", 0) == 0 || text.rfind("logspace:", 0) == 0) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw std::invalid_argument("grid: want kind:a:b:n, got " + text);
    const double a = std::stod(parts[1]);
    const double b = std::stod(parts[2]);
    const int n = std::stoi(parts[3]);
    return parts[0] == "linspace" ? linspace(a, b, n) : logspace(a, b, n);
  }
  std::vector<double> vals;
  for (const auto& p : split(text, ',')) {
    if (!p.empty()) vals.push_back(std::stod(p));
  }
  if (vals.empty()) throw std::invalid_argument("grid: empty specification");
  return vals;
}

}  // namespace sr::io
