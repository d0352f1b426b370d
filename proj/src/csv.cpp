#include "mdlmd/csv.hpp"

#include "mdlmd/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace mdlmd {

namespace {

std::vector<std::string> split_line(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": unterminated quote");
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    v = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::LabelMissing, "no column named '" + name + "'");
  return static_cast<int>(it - header.begin());
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line, lineno);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(t.header.size()) + " fields, found " +
                                             std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw Error(ErrorCode::ParseError, "empty CSV input");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
  return read_csv(is);
}

LabeledData to_labeled(const CsvTable& table, const std::string& label_column, const std::vector<std::string>& drop,
                       const std::string& split_column) {
  const int lc = table.column(label_column);
  const int sc = split_column.empty() ? -1 : table.column(split_column);
  std::set<int> skip = {lc};
  if (sc >= 0) skip.insert(sc);
  for (const auto& name : drop) skip.insert(table.column(name));

  LabeledData out;
  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c)
    if (!skip.count(c)) {
      feature_cols.push_back(c);
      out.feature_names.push_back(table.header[c]);
    }
  if (feature_cols.empty()) throw Error(ErrorCode::ParseError, "no feature columns left");
  if (table.rows.empty()) throw Error(ErrorCode::ParseError, "no data rows");

  // Label ordering.
  std::set<std::string> names;
  bool numeric = true;
  for (const auto& r : table.rows) {
    if (r[lc].empty()) throw Error(ErrorCode::ParseError, "empty label");
    names.insert(r[lc]);
    double v;
    numeric = numeric && parse_double(r[lc], v);
  }
  std::vector<std::string> ordered(names.begin(), names.end());
  if (numeric)
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const std::string& a, const std::string& b) { return std::stod(a) < std::stod(b); });
  std::map<std::string, int> code;
  for (std::size_t j = 0; j < ordered.size(); ++j) code[ordered[j]] = static_cast<int>(j) + 1;
  out.class_names = ordered;

  Dataset& d = out.data;
  d.rows.resize(static_cast<Index>(table.rows.size()), static_cast<Index>(feature_cols.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      double v;
      if (!parse_double(table.rows[i][feature_cols[k]], v))
        throw Error(ErrorCode::ParseError, "data row " + std::to_string(i + 1) + ", column '" +
                                               table.header[feature_cols[k]] + "': not a number");
      d.rows(static_cast<Index>(i), static_cast<Index>(k)) = v;
    }
    d.labels.push_back(code[table.rows[i][lc]]);
    if (sc >= 0) out.split.push_back(table.rows[i][sc]);
  }
  d.meta.d = d.d();
  return out;
}

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  for (int k = 0; k < data.d(); ++k) os << 'x' << (k + 1) << ',';
  os << "label\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int k = 0; k < data.d(); ++k) os << format_double(data.rows(i, k)) << ',';
    os << data.labels[i] << '\n';
  }
}

void write_dataset_csv_file(const std::string& path, const Dataset& data) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_dataset_csv(os, data);
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace mdlmd
