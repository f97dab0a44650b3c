#pragma once

#include <string>
#include <vector>

namespace ehc {

/// A named table of labelled numeric rows.
struct Table {
  std::string name;
  std::string label_column = "label";
  std::vector<std::string> columns;

  struct Row {
    std::string label;
    std::vector<double> values;
  };
  std::vector<Row> rows;

  /// Throws std::invalid_argument if the width does not match `columns`.
  void add_row(std::string label, std::vector<double> values);
};

/// Collection of tables serialized as CSV: a `# key=value ...` comment line,
/// then one block per table (`# table=<name>`, header, rows) separated by
/// blank lines. Numbers use 6 significant digits.
struct Report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Table> tables;

  std::string to_csv() const;
  static Report parse_csv(const std::string& text);

  const Table* find(const std::string& name) const;
};

std::string format_number(double v);

}  // namespace ehc
