#include "mdlmd/estimators.hpp"

#include "mdlmd/rng.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdlmd {

const char* to_string(ScatterMode mode) {
  switch (mode) {
    case ScatterMode::Moment: return "moment";
    case ScatterMode::Diagonal: return "diagonal";
    case ScatterMode::Identity: return "identity";
    case ScatterMode::MCD: return "mcd";
  }
  return "unknown";
}

ScatterMode scatter_mode_from_string(const std::string& name) {
  if (name == "moment") return ScatterMode::Moment;
  if (name == "diagonal") return ScatterMode::Diagonal;
  if (name == "identity") return ScatterMode::Identity;
  if (name == "mcd") return ScatterMode::MCD;
  throw Error(ErrorCode::InvalidArgument, "unknown scatter mode '" + name + "'");
}

namespace {

bool usable_factor(const Eigen::LLT<Matrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  if (!(lo > 0.0) || !std::isfinite(hi)) return false;
  return (lo * lo) >= 1e-14 * (hi * hi);
}

InverseResult from_factor(const Eigen::LLT<Matrix>& llt, double ridge) {
  InverseResult out;
  const Index d = llt.matrixLLT().rows();
  out.inverse = llt.solve(Matrix::Identity(d, d));
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose()).eval();
  out.log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  out.ridge_used = ridge;
  out.cholesky = llt.matrixL();
  return out;
}

void mean_and_cov(const RowMatrix& rows, const std::vector<int>& idx, Vector& mean, Matrix& cov) {
  const Index d = rows.cols();
  mean = Vector::Zero(d);
  for (int i : idx) mean += rows.row(i).transpose();
  mean /= static_cast<double>(idx.size());
  cov = Matrix::Zero(d, d);
  for (int i : idx) {
    Vector c = rows.row(i).transpose() - mean;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(idx.size());
}

Vector column_mean(const RowMatrix& rows) { return rows.colwise().mean().transpose(); }

}  // namespace

InverseResult invert_scatter(const Matrix& scatter) {
  if (scatter.rows() != scatter.cols())
    throw Error(ErrorCode::DimensionMismatch, "scatter matrix is not square");
  const double scale = std::max(1.0, scatter.cwiseAbs().maxCoeff());
  if ((scatter - scatter.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(ErrorCode::NotSymmetric, "scatter matrix is not symmetric");

  Eigen::LLT<Matrix> llt(scatter);
  if (usable_factor(llt)) return from_factor(llt, 0.0);

  const Index d = scatter.rows();
  const double trace = scatter.trace();
  double ridge = trace > 0.0 ? 1e-8 * trace / static_cast<double>(d) : 1e-8;
  for (int attempt = 0; attempt < 400; ++attempt, ridge *= 2.0) {
    Matrix shifted = scatter;
    shifted.diagonal().array() += ridge;
    llt.compute(shifted);
    if (usable_factor(llt)) return from_factor(llt, ridge);
  }
  throw Error(ErrorCode::Internal, "ridge search failed to produce a positive definite scatter");
}

void finalize_scatter(ScatterModel& model) {
  const Index d = model.location.size();
  switch (model.mode) {
    case ScatterMode::Identity:
      model.scatter = Matrix::Identity(d, d);
      model.scatter_inv = Matrix::Identity(d, d);
      model.log_det = 0.0;
      model.ridge_used = 0.0;
      model.whiten_diag = Vector::Ones(d);
      model.whiten.resize(0, 0);
      return;
    case ScatterMode::Diagonal: {
      Vector s = model.scatter.diagonal();
      model.scatter_inv = s.cwiseInverse().asDiagonal();
      model.log_det = s.array().log().sum();
      model.ridge_used = 0.0;
      model.whiten_diag = s.cwiseSqrt().cwiseInverse();
      model.whiten.resize(0, 0);
      return;
    }
    case ScatterMode::Moment:
    case ScatterMode::MCD: {
      InverseResult inv;
      if (model.ridge_used > 0.0) {
        Matrix shifted = model.scatter;
        shifted.diagonal().array() += model.ridge_used;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() != Eigen::Success)
          throw Error(ErrorCode::Internal, "stored ridge does not make scatter positive definite");
        inv = from_factor(llt, model.ridge_used);
      } else {
        inv = invert_scatter(model.scatter);
      }
      model.scatter_inv = std::move(inv.inverse);
      model.log_det = inv.log_det;
      model.ridge_used = inv.ridge_used;
      model.whiten = inv.cholesky.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
      model.whiten_diag.resize(0);
      return;
    }
  }
}

RowMatrix ScatterModel::whiten_rows(const RowMatrix& rows) const {
  if (rows.cols() != location.size())
    throw Error(ErrorCode::DimensionMismatch, "row dimension differs from model dimension");
  if (is_diagonal()) return rows * whiten_diag.asDiagonal();
  return rows * whiten.transpose();
}

ScatterModel fit_moment(const RowMatrix& rows) {
  if (rows.rows() < 2) throw Error(ErrorCode::TooFewRows, "moment estimate needs at least 2 rows");
  if (rows.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "zero-dimensional data");
  ScatterModel m;
  m.mode = ScatterMode::Moment;
  std::vector<int> all(rows.rows());
  std::iota(all.begin(), all.end(), 0);
  mean_and_cov(rows, all, m.location, m.scatter);
  finalize_scatter(m);
  return m;
}

ScatterModel fit_diagonal(const RowMatrix& rows) {
  if (rows.rows() < 2) throw Error(ErrorCode::TooFewRows, "diagonal estimate needs at least 2 rows");
  ScatterModel m;
  m.mode = ScatterMode::Diagonal;
  m.location = column_mean(rows);
  RowMatrix centered = rows.rowwise() - m.location.transpose();
  Vector var = centered.colwise().squaredNorm().transpose() / static_cast<double>(rows.rows());
  for (Index k = 0; k < var.size(); ++k) {
    if (var(k) < kZeroVarianceFloor) {
      var(k) = kZeroVarianceFloor;
      m.zero_variance_clamped = true;
    }
  }
  m.scatter = var.asDiagonal();
  finalize_scatter(m);
  return m;
}

ScatterModel fit_identity(const RowMatrix& rows) {
  if (rows.rows() < 1) throw Error(ErrorCode::TooFewRows, "identity model needs at least 1 row");
  ScatterModel m;
  m.mode = ScatterMode::Identity;
  m.location = column_mean(rows);
  finalize_scatter(m);
  return m;
}

namespace {

struct CStepState {
  std::vector<int> subset;
  Vector mean;
  Matrix cov;
  double log_det = std::numeric_limits<double>::infinity();
};

double subset_log_det(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const auto diag = llt.matrixLLT().diagonal();
  if (diag.minCoeff() <= 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * diag.array().log().sum();
}

// Indices of the h rows closest to (mean, cov) in Mahalanobis distance, ties
// to the lower index.
std::vector<int> closest_rows(const RowMatrix& rows, const Vector& mean, const Matrix& cov, int h) {
  const InverseResult inv = invert_scatter(cov);
  const Index n = rows.rows();
  std::vector<std::pair<double, int>> dist(n);
  for (Index i = 0; i < n; ++i) {
    Vector c = rows.row(i).transpose() - mean;
    dist[i] = {c.dot(inv.inverse * c), static_cast<int>(i)};
  }
  std::partial_sort(dist.begin(), dist.begin() + h, dist.end());
  std::vector<int> out(h);
  for (int k = 0; k < h; ++k) out[k] = dist[k].second;
  std::sort(out.begin(), out.end());
  return out;
}

CStepState run_csteps(const RowMatrix& rows, std::vector<int> subset, int h, int max_steps,
                      std::vector<double>* trace) {
  CStepState st;
  st.subset = std::move(subset);
  mean_and_cov(rows, st.subset, st.mean, st.cov);
  st.log_det = subset_log_det(st.cov);
  if (trace) trace->push_back(std::exp(st.log_det));
  for (int step = 0; step < max_steps; ++step) {
    if (!std::isfinite(st.log_det)) break;
    CStepState next;
    next.subset = closest_rows(rows, st.mean, st.cov, h);
    mean_and_cov(rows, next.subset, next.mean, next.cov);
    next.log_det = subset_log_det(next.cov);
    if (trace) trace->push_back(std::exp(next.log_det));
    const bool improved = next.log_det < st.log_det - 1e-12 * std::max(1.0, std::abs(st.log_det));
    if (next.log_det <= st.log_det) st = std::move(next);
    if (!improved) break;
  }
  return st;
}

}  // namespace

std::vector<double> mcd_csteps(const RowMatrix& rows, std::vector<int> subset, int h, int max_steps) {
  std::vector<double> trace;
  run_csteps(rows, std::move(subset), h, max_steps, &trace);
  return trace;
}

ScatterModel fit_mcd(const RowMatrix& rows, const McdOptions& options) {
  const int n = static_cast<int>(rows.rows());
  const int d = static_cast<int>(rows.cols());
  if (!(options.coverage > 0.5 && options.coverage <= 1.0))
    throw Error(ErrorCode::BadParameters, "MCD coverage must lie in (0.5, 1]");
  const int h = std::min(n, static_cast<int>(std::ceil(options.coverage * n - 1e-9)));
  if (h < d + 1 || n < 2) throw Error(ErrorCode::TooFewRows, "MCD needs n*coverage >= d+1");

  ScatterModel m;
  m.mode = ScatterMode::MCD;

  double consistency = 1.0;
  if (options.coverage < 1.0) {
    boost::math::chi_squared chi_d(d), chi_d2(d + 2);
    const double q = boost::math::quantile(chi_d, options.coverage);
    consistency = options.coverage / boost::math::cdf(chi_d2, q);
  }

  if (h == n) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    mean_and_cov(rows, all, m.location, m.scatter);
    m.scatter *= consistency;
    finalize_scatter(m);
    return m;
  }

  const int starts = std::max(1, options.starts);
  std::vector<CStepState> results(starts);
  std::vector<char> ok(starts, 0);

#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel())
  for (int s = 0; s < starts; ++s) {
    Rng rng = make_rng(options.seed, {stream::kMcd, static_cast<std::uint64_t>(s)});
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int take = d + 1;
    // Partial Fisher-Yates; extend the subset until its covariance is regular.
    for (int k = 0; k < n; ++k) {
      std::uniform_int_distribution<int> pick(k, n - 1);
      std::swap(perm[k], perm[pick(rng)]);
      if (k + 1 < take) continue;
      std::vector<int> subset(perm.begin(), perm.begin() + k + 1);
      Vector mean;
      Matrix cov;
      mean_and_cov(rows, subset, mean, cov);
      if (std::isfinite(subset_log_det(cov)) || k + 1 >= h) {
        take = k + 1;
        break;
      }
    }
    std::vector<int> subset(perm.begin(), perm.begin() + take);
    std::sort(subset.begin(), subset.end());
    Vector mean;
    Matrix cov;
    mean_and_cov(rows, subset, mean, cov);
    if (!std::isfinite(subset_log_det(cov))) continue;
    results[s] = run_csteps(rows, closest_rows(rows, mean, cov, h), h, options.max_csteps, nullptr);
    ok[s] = std::isfinite(results[s].log_det);
  }

  int best = -1;
  for (int s = 0; s < starts; ++s)
    if (ok[s] && (best < 0 || results[s].log_det < results[best].log_det)) best = s;

  if (best < 0) {
    // Every start degenerated; fall back to the full-sample estimate.
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    mean_and_cov(rows, all, m.location, m.scatter);
    m.converged = false;
  } else {
    m.location = results[best].mean;
    m.scatter = results[best].cov * consistency;
  }
  finalize_scatter(m);
  return m;
}

ScatterModel fit_scatter(const RowMatrix& rows, ScatterMode mode, const McdOptions& mcd) {
  switch (mode) {
    case ScatterMode::Moment: return fit_moment(rows);
    case ScatterMode::Diagonal: return fit_diagonal(rows);
    case ScatterMode::Identity: return fit_identity(rows);
    case ScatterMode::MCD: return fit_mcd(rows, mcd);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scatter mode");
}

}  // namespace mdlmd
