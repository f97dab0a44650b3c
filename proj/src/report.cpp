#include "ehc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace ehc {

void Table::add_row(std::string label, std::vector<double> values) {
  if (values.size() != columns.size())
    throw std::invalid_argument("table " + name + ": row has " + std::to_string(values.size()) +
                                " values, expected " + std::to_string(columns.size()));
  rows.push_back({std::move(label), std::move(values)});
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "#";
  for (const auto& [k, v] : meta) out << ' ' << k << '=' << v;
  out << '\n';
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const Table& table = tables[t];
    if (t > 0) out << '\n';
    out << "# table=" << table.name << '\n' << table.label_column;
    for (const auto& c : table.columns) out << ',' << c;
    out << '\n';
    for (const auto& row : table.rows) {
      out << row.label;
      for (double v : row.values) out << ',' << format_number(v);
      out << '\n';
    }
  }
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

Report Report::parse_csv(const std::string& text) {
  Report r;
  std::istringstream in(text);
  std::string line;
  Table* current = nullptr;
  bool expect_header = false;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line.rfind('#', 0) != 0) throw std::invalid_argument("report must start with a metadata line");
      for (const auto& kv : split(line.substr(1), ' ')) {
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad metadata entry '" + kv + "'");
        r.meta.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      continue;
    }
    if (line.empty()) continue;
    if (line.rfind("# table=", 0) == 0) {
      r.tables.push_back(Table{line.substr(8), "label", {}, {}});
      current = &r.tables.back();
      expect_header = true;
      continue;
    }
    if (!current) throw std::invalid_argument("row outside of a table");
    auto cells = split(line, ',');
    if (expect_header) {
      current->label_column = cells.front();
      current->columns.assign(cells.begin() + 1, cells.end());
      expect_header = false;
      continue;
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < cells.size(); ++i) values.push_back(parse_number(cells[i]));
    current->add_row(cells.front(), std::move(values));
  }
  return r;
}

const Table* Report::find(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return &t;
  return nullptr;
}

}  // namespace ehc
