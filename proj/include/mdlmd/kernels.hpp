#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version and a plain
// serial reference with identical per-element arithmetic; tests check they
// agree and kernel_bench compares their speed.

#include "mdlmd/types.hpp"

namespace mdlmd::kernels {

// out(i, k) = |a_i - b_k|^2 over rows of a (n x d) and b (m x d).
void pairwise_sq_dist(const RowMatrix& a, const RowMatrix& b, Matrix& out);
void pairwise_sq_dist_serial(const RowMatrix& a, const RowMatrix& b, Matrix& out);

// out(i) = |a_i - center|^2.
void sq_dist_to_point(const RowMatrix& a, const Vector& center, Vector& out);
void sq_dist_to_point_serial(const RowMatrix& a, const Vector& center, Vector& out);

// out(i) = (1/m) sum_k exp(log_psi0 - q(i,k) / (2 h^2)) * q(i,k): the
// Gaussian-profile kernel-weighted mean of squared standardized distances.
// `q` is n x m.
void gaussian_weighted_mean(const Matrix& q, double h, double log_psi0, Vector& out);
void gaussian_weighted_mean_serial(const Matrix& q, double h, double log_psi0, Vector& out);

// Number of worker threads honoured by the parallel kernels (MDGAM_THREADS
// caps it when set).
int worker_count();
void apply_thread_limit_from_env();

}  // namespace mdlmd::kernels
