#pragma once

#include "mdlmd/estimators.hpp"
#include "mdlmd/types.hpp"

#include <string>
#include <vector>

namespace mdlmd {

struct FeatureKind {
  enum class Tag { MD, LMD, MDSquaredScaled };
  Tag tag = Tag::MD;
  double h = 0.0;  // only meaningful for LMD

  static FeatureKind md() { return {Tag::MD, 0.0}; }
  static FeatureKind lmd(double h) { return {Tag::LMD, h}; }
  static FeatureKind md_squared_scaled() { return {Tag::MDSquaredScaled, 0.0}; }

  bool operator==(const FeatureKind&) const = default;
  std::string to_string() const;
  static FeatureKind parse(const std::string& text);
};

// n x J matrix of distance features; entry (i, j) refers to class j+1.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  // Throws Internal if any entry is negative or non-finite.
  FeatureMatrix(Matrix values, FeatureKind kind);

  const Matrix& values() const { return values_; }
  const FeatureKind& kind() const { return kind_; }
  int class_count() const { return static_cast<int>(values_.cols()); }
  int rows() const { return static_cast<int>(values_.rows()); }

  FeatureMatrix select_rows(const std::vector<int>& idx) const;

 private:
  Matrix values_;
  FeatureKind kind_;
};

// Radial kernel profile Psi with K(t) = Psi(t^T t). Only the Gaussian family
// is provided: Psi(s) = exp(log_psi0 - s/2).
class KernelProfile {
 public:
  // Psi(s) = (2 pi)^{-d/2} exp(-s/2); kappa2 = d.
  static KernelProfile gaussian(int d);

  // Same shape with Psi(0) = 1. Feature columns built with it differ from the
  // exact profile by the constant factor Psi(0), which underflows for large d.
  KernelProfile normalized() const { return KernelProfile(dim_, 0.0, kappa2_); }

  double psi(double s) const;
  double log_psi(double s) const { return log_psi0_ - 0.5 * s; }
  double psi_at_zero() const;
  double log_psi_at_zero() const { return log_psi0_; }
  double kappa2() const { return kappa2_; }
  int dim() const { return dim_; }

 private:
  KernelProfile(int dim, double log_psi0, double kappa2) : dim_(dim), log_psi0_(log_psi0), kappa2_(kappa2) {}
  int dim_ = 1;
  double log_psi0_ = 0.0;
  double kappa2_ = 1.0;
};

KernelProfile gaussian_profile(int d);

// Squared quadratic form (x - mu)^T Sigma^{-1} (x - mu), round-off clamped.
double squared_mahalanobis(const Vector& x, const ScatterModel& model);
double mahalanobis(const Vector& x, const ScatterModel& model);

// Column j = distances of every row of X from models[j].
FeatureMatrix md_features(const RowMatrix& X, const std::vector<ScatterModel>& models);
// Column j = squared distances divided by d (high-dimensional mode).
FeatureMatrix md_squared_scaled_features(const RowMatrix& X, const std::vector<ScatterModel>& models);
// Squared distances, unscaled. Used by the h grid and the limit checks.
Matrix squared_md_matrix(const RowMatrix& X, const std::vector<ScatterModel>& models);

double lmd_beta(const Vector& x, const RowMatrix& class_rows, const ScatterModel& model, double h,
                const KernelProfile& kernel);
double lmd_value(const Vector& x, const RowMatrix& class_rows, const ScatterModel& model, double h,
                 const KernelProfile& kernel);

// Applies the h <= 1 scaling (divide by h^{d+2}) to a beta value.
double lmd_branch(double beta, double h, int d);

// LMD column from precomputed squared standardized distances q (n x m) of n
// query rows to the m rows of one class.
Vector lmd_column_from_sq(const Matrix& q, double h, const KernelProfile& kernel);

FeatureMatrix lmd_features(const RowMatrix& X, const std::vector<RowMatrix>& per_class_rows,
                           const std::vector<ScatterModel>& models, double h, const KernelProfile& kernel);

// Squared standardized distances of X's rows to class_rows under model.
Matrix standardized_sq_dist(const RowMatrix& X, const RowMatrix& class_rows, const ScatterModel& model);

}  // namespace mdlmd
