#include "mdlmd/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <string>

namespace mdlmd::kernels {

namespace {

inline double row_sq_dist(const double* x, const double* y, Index d) {
  double s = 0.0;
  for (Index t = 0; t < d; ++t) {
    const double diff = x[t] - y[t];
    s += diff * diff;
  }
  return s;
}

inline double weighted_mean_row(const Matrix& q, Index i, double inv_two_h2, double log_psi0) {
  const Index m = q.cols();
  double s = 0.0;
  for (Index k = 0; k < m; ++k) {
    const double v = q(i, k);
    s += std::exp(log_psi0 - v * inv_two_h2) * v;
  }
  return s / static_cast<double>(m);
}

void check_dims(const RowMatrix& a, const RowMatrix& b) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::DimensionMismatch, "pairwise distance dimension mismatch");
}

}  // namespace

void pairwise_sq_dist(const RowMatrix& a, const RowMatrix& b, Matrix& out) {
  check_dims(a, b);
  const Index n = a.rows(), m = b.rows(), d = a.cols();
  out.resize(n, m);
#pragma omp parallel for schedule(static) if (!omp_in_parallel() && n * m * d > 20000)
  for (Index i = 0; i < n; ++i) {
    const double* x = a.data() + i * d;
    for (Index k = 0; k < m; ++k) out(i, k) = row_sq_dist(x, b.data() + k * d, d);
  }
}

void pairwise_sq_dist_serial(const RowMatrix& a, const RowMatrix& b, Matrix& out) {
  check_dims(a, b);
  const Index n = a.rows(), m = b.rows(), d = a.cols();
  out.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < m; ++k) out(i, k) = row_sq_dist(a.data() + i * d, b.data() + k * d, d);
}

void sq_dist_to_point(const RowMatrix& a, const Vector& center, Vector& out) {
  if (a.cols() != center.size()) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
  const Index n = a.rows(), d = a.cols();
  out.resize(n);
#pragma omp parallel for schedule(static) if (!omp_in_parallel() && n * d > 20000)
  for (Index i = 0; i < n; ++i) out(i) = row_sq_dist(a.data() + i * d, center.data(), d);
}

void sq_dist_to_point_serial(const RowMatrix& a, const Vector& center, Vector& out) {
  if (a.cols() != center.size()) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
  const Index n = a.rows(), d = a.cols();
  out.resize(n);
  for (Index i = 0; i < n; ++i) out(i) = row_sq_dist(a.data() + i * d, center.data(), d);
}

void gaussian_weighted_mean(const Matrix& q, double h, double log_psi0, Vector& out) {
  const Index n = q.rows();
  const double inv = 1.0 / (2.0 * h * h);
  out.resize(n);
#pragma omp parallel for schedule(static) if (!omp_in_parallel() && n * q.cols() > 20000)
  for (Index i = 0; i < n; ++i) out(i) = weighted_mean_row(q, i, inv, log_psi0);
}

void gaussian_weighted_mean_serial(const Matrix& q, double h, double log_psi0, Vector& out) {
  const Index n = q.rows();
  const double inv = 1.0 / (2.0 * h * h);
  out.resize(n);
  for (Index i = 0; i < n; ++i) out(i) = weighted_mean_row(q, i, inv, log_psi0);
}

int worker_count() { return omp_get_max_threads(); }

void apply_thread_limit_from_env() {
  const char* env = std::getenv("MDGAM_THREADS");
  if (!env || !*env) return;
  try {
    const int cap = std::stoi(env);
    if (cap >= 1 && cap < omp_get_max_threads()) omp_set_num_threads(cap);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("MDGAM_THREADS is not an integer: ") + env);
  }
}

}  // namespace mdlmd::kernels
