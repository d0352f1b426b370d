#pragma once

#include "mdlmd/estimators.hpp"
#include "mdlmd/types.hpp"

#include <cstdint>
#include <vector>

namespace mdlmd {

// Gaussian discriminant with one pooled scatter. `mode` selects how class
// scatters are estimated before pooling (Moment by default, Diagonal or
// Identity in high dimension, MCD for heavy tails).
struct LdaModel {
  Matrix means;  // J x d
  ScatterModel pooled;
  Vector log_priors;
};

LdaModel lda_fit(const Dataset& train, ScatterMode mode = ScatterMode::Moment, const McdOptions& mcd = {});
Matrix lda_scores(const LdaModel& model, const RowMatrix& X);
Labels lda_predict(const LdaModel& model, const RowMatrix& X);

struct QdaModel {
  std::vector<ScatterModel> models;
  Vector log_priors;
};

QdaModel qda_fit(const Dataset& train, ScatterMode mode = ScatterMode::Moment, const McdOptions& mcd = {});
Matrix qda_scores(const QdaModel& model, const RowMatrix& X);
Labels qda_predict(const QdaModel& model, const RowMatrix& X);

struct KnnModel {
  RowMatrix rows;
  Labels labels;
  int class_count = 0;
  int k = 1;
  std::vector<int> k_grid;
  std::vector<double> cv_errors;  // per k_grid entry
};

std::vector<int> default_k_grid();

// k chosen by stratified 5-fold cross-validation (smallest k among ties).
KnnModel knn_fit(const Dataset& train, std::uint64_t seed, const std::vector<int>& k_grid = default_k_grid(),
                 int folds = 5);
Labels knn_predict(const KnnModel& model, const RowMatrix& X);
// Euclidean majority vote among the k nearest rows; vote ties go to the
// smaller label, distance ties to the earlier row. Throws BadK.
Labels knn_vote(const RowMatrix& rows, const Labels& labels, int class_count, int k, const RowMatrix& X);

}  // namespace mdlmd
