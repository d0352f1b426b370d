#pragma once

#include "mdlmd/classifier.hpp"
#include "mdlmd/gam.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mdlmd {

// Versioned text format: a header line followed by "key = value" lines.
// Numbers are written with 17 significant digits so that doubles round-trip
// exactly; vectors and matrices are space-separated on one line.
class TextRecord {
 public:
  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, double value);
  void put(const std::string& key, long long value);
  void put(const std::string& key, const Vector& values);
  void put(const std::string& key, const std::vector<double>& values);
  void put(const std::string& key, const Matrix& values);  // rows cols v...

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  Vector vector(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  Matrix matrix(const std::string& key) const;

  void write(std::ostream& os, const std::string& header) const;
  // Throws ParseError on malformed lines, duplicate keys or a wrong header.
  static TextRecord read(std::istream& is, const std::string& header);

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

std::string format_double(double v);

void write_gam(TextRecord& rec, const std::string& prefix, const GamModel& model);
GamModel read_gam(const TextRecord& rec, const std::string& prefix);

inline constexpr const char* kModelHeader = "mdlmd-model 1";

void save_classifier(const FittedClassifier& clf, std::ostream& os);
FittedClassifier load_classifier(std::istream& is);
void save_classifier_file(const FittedClassifier& clf, const std::string& path);
FittedClassifier load_classifier_file(const std::string& path);

}  // namespace mdlmd
