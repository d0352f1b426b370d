#include "mdlmd/features.hpp"

#include "mdlmd/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mdlmd {

std::string FeatureKind::to_string() const {
  switch (tag) {
    case Tag::MD: return "md";
    case Tag::MDSquaredScaled: return "md_squared_scaled";
    case Tag::LMD: {
      std::ostringstream os;
      os.precision(17);
      os << "lmd(" << h << ")";
      return os.str();
    }
  }
  return "unknown";
}

FeatureKind FeatureKind::parse(const std::string& text) {
  if (text == "md") return md();
  if (text == "md_squared_scaled") return md_squared_scaled();
  if (text.rfind("lmd(", 0) == 0 && text.back() == ')') {
    try {
      return lmd(std::stod(text.substr(4, text.size() - 5)));
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::ParseError, "bad feature kind '" + text + "'");
}

FeatureMatrix::FeatureMatrix(Matrix values, FeatureKind kind) : values_(std::move(values)), kind_(kind) {
  for (Index i = 0; i < values_.size(); ++i) {
    const double v = values_.data()[i];
    if (!std::isfinite(v) || v < 0.0)
      throw Error(ErrorCode::Internal, "feature entries must be finite and non-negative");
  }
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<int>& idx) const {
  Matrix out(idx.size(), values_.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(k) = values_.row(idx[k]);
  return FeatureMatrix(std::move(out), kind_);
}

KernelProfile KernelProfile::gaussian(int d) {
  if (d < 1) throw Error(ErrorCode::BadParameters, "kernel dimension must be >= 1");
  return KernelProfile(d, -0.5 * d * std::log(2.0 * std::numbers::pi), static_cast<double>(d));
}

double KernelProfile::psi(double s) const { return std::exp(log_psi(s)); }
double KernelProfile::psi_at_zero() const { return std::exp(log_psi0_); }

KernelProfile gaussian_profile(int d) { return KernelProfile::gaussian(d); }

namespace {

double clamp_quadratic(double q, double scale) {
  if (q >= 0.0) return q;
  if (q >= -1e-10 * std::max(1.0, scale)) return 0.0;
  throw Error(ErrorCode::Internal, "quadratic form is materially negative");
}

void check_models(const RowMatrix& X, const std::vector<ScatterModel>& models) {
  if (models.empty()) throw Error(ErrorCode::EmptyModelList, "no scatter models given");
  for (const auto& m : models)
    if (m.dim() != X.cols()) throw Error(ErrorCode::DimensionMismatch, "model dimension differs from data");
}

}  // namespace

double squared_mahalanobis(const Vector& x, const ScatterModel& model) {
  if (x.size() != model.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from model");
  const Vector c = x - model.location;
  return clamp_quadratic(c.dot(model.scatter_inv * c), c.squaredNorm() * model.scatter_inv.cwiseAbs().maxCoeff());
}

double mahalanobis(const Vector& x, const ScatterModel& model) { return std::sqrt(squared_mahalanobis(x, model)); }

Matrix squared_md_matrix(const RowMatrix& X, const std::vector<ScatterModel>& models) {
  check_models(X, models);
  Matrix out(X.rows(), models.size());
  for (std::size_t j = 0; j < models.size(); ++j) {
    const RowMatrix w = models[j].whiten_rows(X);
    Vector center = models[j].whiten_rows(RowMatrix(models[j].location.transpose())).row(0).transpose();
    Vector col;
    kernels::sq_dist_to_point(w, center, col);
    out.col(j) = col;
  }
  return out;
}

FeatureMatrix md_features(const RowMatrix& X, const std::vector<ScatterModel>& models) {
  return FeatureMatrix(squared_md_matrix(X, models).cwiseSqrt(), FeatureKind::md());
}

FeatureMatrix md_squared_scaled_features(const RowMatrix& X, const std::vector<ScatterModel>& models) {
  return FeatureMatrix(squared_md_matrix(X, models) / static_cast<double>(X.cols()), FeatureKind::md_squared_scaled());
}

double lmd_branch(double beta, double h, int d) {
  if (h > 1.0) return beta;
  if (beta <= 0.0) return 0.0;
  const double v = std::exp(std::log(beta) - (d + 2) * std::log(h));
  if (!std::isfinite(v)) throw Error(ErrorCode::Internal, "local distance overflows for this h");
  return v;
}

double lmd_beta(const Vector& x, const RowMatrix& class_rows, const ScatterModel& model, double h,
                const KernelProfile& kernel) {
  if (!(h > 0.0)) throw Error(ErrorCode::NonPositiveH, "localization parameter must be positive");
  if (class_rows.rows() < 1) throw Error(ErrorCode::TooFewRows, "class has no rows");
  if (x.size() != model.dim() || class_rows.cols() != model.dim())
    throw Error(ErrorCode::DimensionMismatch, "dimension mismatch in local distance");
  const double h2 = h * h;
  double sum = 0.0;
  for (Index i = 0; i < class_rows.rows(); ++i) {
    const Vector c = x - class_rows.row(i).transpose();
    const double q = clamp_quadratic(c.dot(model.scatter_inv * c), c.squaredNorm() * model.scatter_inv.cwiseAbs().maxCoeff());
    sum += kernel.psi(q / h2) * q;
  }
  return sum / static_cast<double>(class_rows.rows());
}

double lmd_value(const Vector& x, const RowMatrix& class_rows, const ScatterModel& model, double h,
                 const KernelProfile& kernel) {
  return lmd_branch(lmd_beta(x, class_rows, model, h, kernel), h, model.dim());
}

Matrix standardized_sq_dist(const RowMatrix& X, const RowMatrix& class_rows, const ScatterModel& model) {
  Matrix q;
  kernels::pairwise_sq_dist(model.whiten_rows(X), model.whiten_rows(class_rows), q);
  return q;
}

Vector lmd_column_from_sq(const Matrix& q, double h, const KernelProfile& kernel) {
  if (!(h > 0.0)) throw Error(ErrorCode::NonPositiveH, "localization parameter must be positive");
  Vector beta;
  kernels::gaussian_weighted_mean(q, h, kernel.log_psi_at_zero(), beta);
  for (Index i = 0; i < beta.size(); ++i) beta(i) = lmd_branch(beta(i), h, kernel.dim());
  return beta;
}

FeatureMatrix lmd_features(const RowMatrix& X, const std::vector<RowMatrix>& per_class_rows,
                           const std::vector<ScatterModel>& models, double h, const KernelProfile& kernel) {
  check_models(X, models);
  if (per_class_rows.size() != models.size())
    throw Error(ErrorCode::DimensionMismatch, "one row block per model is required");
  if (!(h > 0.0)) throw Error(ErrorCode::NonPositiveH, "localization parameter must be positive");
  Matrix out(X.rows(), models.size());
  for (std::size_t j = 0; j < models.size(); ++j) {
    if (per_class_rows[j].rows() < 1) throw Error(ErrorCode::TooFewRows, "class has no rows");
    out.col(j) = lmd_column_from_sq(standardized_sq_dist(X, per_class_rows[j], models[j]), h, kernel);
  }
  return FeatureMatrix(std::move(out), FeatureKind::lmd(h));
}

}  // namespace mdlmd
