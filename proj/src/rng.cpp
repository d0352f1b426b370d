#include "mdlmd/rng.hpp"

#include "mdlmd/types.hpp"

#include <algorithm>
#include <set>

namespace mdlmd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyModelList: return "EmptyModelList";
    case ErrorCode::NonPositiveH: return "NonPositiveH";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::UnknownExample: return "UnknownExample";
    case ErrorCode::NoClosedForm: return "NoClosedForm";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelMissing: return "LabelMissing";
    case ErrorCode::AllZeroAccuracy: return "AllZeroAccuracy";
    case ErrorCode::AllResamplesSkipped: return "AllResamplesSkipped";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

int validate_labels(const Labels& labels, int n_rows) {
  if (static_cast<int>(labels.size()) != n_rows)
    throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
  if (labels.empty()) throw Error(ErrorCode::TooFewRows, "no observations");
  int J = *std::max_element(labels.begin(), labels.end());
  std::vector<int> counts(J + 1, 0);
  for (int l : labels) {
    if (l < 1) throw Error(ErrorCode::InvalidArgument, "labels must be >= 1");
    ++counts[l];
  }
  for (int j = 1; j <= J; ++j)
    if (counts[j] == 0) throw Error(ErrorCode::MissingClass, "class " + std::to_string(j) + " has no rows");
  return J;
}

int Dataset::class_count() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end());
}

RowMatrix Dataset::class_rows(int label) const {
  std::vector<int> idx;
  for (int i = 0; i < n(); ++i)
    if (labels[i] == label) idx.push_back(i);
  RowMatrix out(idx.size(), rows.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(k) = rows.row(idx[k]);
  return out;
}

std::vector<int> Dataset::class_sizes() const {
  std::vector<int> sizes(class_count(), 0);
  for (int l : labels) ++sizes[l - 1];
  return sizes;
}

}  // namespace mdlmd
