#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace mdlmd {

// Observations are stored one per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Class labels are 1-based everywhere in the public API.
using Labels = std::vector<int>;

enum class ErrorCode {
  TooFewRows,
  NotSymmetric,
  DimensionMismatch,
  EmptyModelList,
  NonPositiveH,
  MissingClass,
  KindMismatch,
  ClassTooSmall,
  BadInterval,
  BadParameters,
  UnknownExample,
  NoClosedForm,
  BadK,
  ParseError,
  LabelMissing,
  AllZeroAccuracy,
  AllResamplesSkipped,
  InvalidArgument,
  IoError,
  Internal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Labeled observations.
struct Dataset {
  RowMatrix rows;
  Labels labels;
  struct Meta {
    std::string example_id;
    int d = 0;
    unsigned long long seed = 0;
  } meta;

  int n() const { return static_cast<int>(rows.rows()); }
  int d() const { return static_cast<int>(rows.cols()); }
  int class_count() const;
  // Rows belonging to the given 1-based label.
  RowMatrix class_rows(int label) const;
  std::vector<int> class_sizes() const;
};

// Throws unless every label lies in 1..J and each class has at least one row.
int validate_labels(const Labels& labels, int n_rows);

}  // namespace mdlmd
