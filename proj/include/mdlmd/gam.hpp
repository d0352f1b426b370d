#pragma once

#include "mdlmd/features.hpp"
#include "mdlmd/spline.hpp"
#include "mdlmd/types.hpp"

#include <optional>
#include <vector>

namespace mdlmd {

struct GamOptions {
  std::vector<double> lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  int max_iterations = 100;
  double tolerance = 1e-8;
  // Quasi-complete separation guard on |coefficient|.
  double coefficient_bound = 20.0;
  // Interior knots per feature; <= 0 selects 8 for n >= 200, else max(2, n/25).
  int interior_knots = 0;
  // Class priors overriding the training proportions (length J, sums to 1).
  std::optional<std::vector<double>> priors;
};

struct GamConvergence {
  int iterations = 0;
  double deviance = 0.0;
  bool converged = false;
  bool separated = false;
  // Penalized deviance after the start and after every accepted step of the
  // selected fit.
  std::vector<double> objective_history;
};

// Baseline-category additive logistic model: class j < J has score
// g_j(f) = a_j + sum_k g_jk(f_k); class J has score 0. Each g_jk is a centered
// cubic spline on feature k.
struct GamModel {
  int class_count = 0;
  FeatureKind feature_kind;
  std::vector<SplineBasis> bases;      // per feature k
  std::vector<Vector> basis_means;     // training column means of each basis (centering)
  std::vector<std::vector<Vector>> coefficients;  // [j][k], length n_basis - 1
  Vector intercepts;                   // length J - 1
  std::vector<std::vector<double>> lambda;  // [j][k]
  GamConvergence convergence;

  // n x J scores with the baseline column fixed at 0.
  Matrix scores(const FeatureMatrix& features) const;
  // g_jk at feature value x (0-based j, k).
  double term(int j, int k, double x) const;
};

GamModel fit_gam(const FeatureMatrix& features, const Labels& labels, const GamOptions& options = {});

Matrix predict_proba(const GamModel& model, const FeatureMatrix& features);
Labels predict_class(const GamModel& model, const FeatureMatrix& features);

// Softmax over score rows (max-shifted).
Matrix softmax_rows(const Matrix& scores);
// Row-wise argmax as 1-based labels, ties to the lowest class.
Labels argmax_labels(const Matrix& probabilities);

int default_interior_knots(int n);

}  // namespace mdlmd
