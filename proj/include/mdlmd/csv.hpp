#pragma once

#include "mdlmd/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mdlmd {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws LabelMissing when the column does not exist.
  int column(const std::string& name) const;
};

// Comma-separated with a header row; double quotes protect commas. Throws
// ParseError (with line number) on ragged rows.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

// Numeric features plus a categorical label column.
struct LabeledData {
  Dataset data;
  std::vector<std::string> class_names;    // label j is class_names[j-1]
  std::vector<std::string> feature_names;
  std::vector<std::string> split;          // per row, empty if no split column
};

// Every column except the label, the split column and `drop` must be
// numeric. Labels are ordered numerically when all are numbers, otherwise
// lexicographically.
LabeledData to_labeled(const CsvTable& table, const std::string& label_column, const std::vector<std::string>& drop = {},
                       const std::string& split_column = "");

// Dataset as CSV with columns x1..xd,label.
void write_dataset_csv(std::ostream& os, const Dataset& data);
void write_dataset_csv_file(const std::string& path, const Dataset& data);

}  // namespace mdlmd
