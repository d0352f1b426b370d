#pragma once

#include "mdlmd/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdlmd {

enum class ScatterMode { Moment, Diagonal, Identity, MCD };

const char* to_string(ScatterMode mode);
ScatterMode scatter_mode_from_string(const std::string& name);

// Per-class location and scatter together with the quantities needed to
// evaluate quadratic forms against them.
struct ScatterModel {
  int class_id = 0;
  Vector location;
  Matrix scatter;
  // Inverse of (scatter + ridge_used * I).
  Matrix scatter_inv;
  ScatterMode mode = ScatterMode::Moment;
  double log_det = 0.0;
  double ridge_used = 0.0;

  // Lower-triangular inverse Cholesky factor W with W^T W = scatter_inv, so
  // that (x-y)^T scatter_inv (x-y) = |W(x-y)|^2. Diagonal/Identity models keep
  // only the diagonal in `whiten_diag`.
  Matrix whiten;
  Vector whiten_diag;

  bool zero_variance_clamped = false;
  bool converged = true;

  int dim() const { return static_cast<int>(location.size()); }
  bool is_diagonal() const { return mode == ScatterMode::Diagonal || mode == ScatterMode::Identity; }

  // Rows mapped into the standardized coordinates W x.
  RowMatrix whiten_rows(const RowMatrix& rows) const;
};

struct InverseResult {
  Matrix inverse;
  double log_det = 0.0;
  double ridge_used = 0.0;
  // Lower Cholesky factor of (scatter + ridge I).
  Matrix cholesky;
};

// Cholesky-based inverse. If the factorization fails or is numerically
// singular, retries with ridge lambda*I, lambda doubling from
// 1e-8*trace/d. Throws NotSymmetric.
InverseResult invert_scatter(const Matrix& scatter);

inline constexpr double kZeroVarianceFloor = 1e-12;

ScatterModel fit_moment(const RowMatrix& rows);
ScatterModel fit_diagonal(const RowMatrix& rows);
ScatterModel fit_identity(const RowMatrix& rows);

struct McdOptions {
  double coverage = 0.75;
  int starts = 500;
  int max_csteps = 20;
  std::uint64_t seed = 20240501;
};

ScatterModel fit_mcd(const RowMatrix& rows, const McdOptions& options = {});

// C-step iteration from an initial subset; returns the covered-subset
// covariance determinant after each step (first entry is the initial subset).
// Exposed for testing the monotonicity of the MCD objective.
std::vector<double> mcd_csteps(const RowMatrix& rows, std::vector<int> subset, int h, int max_steps);

// Dispatch on mode.
ScatterModel fit_scatter(const RowMatrix& rows, ScatterMode mode, const McdOptions& mcd = {});

// Recompute inverse, log-determinant and whitening factor from `scatter`
// (and an already known ridge). Used after fitting and after deserialization.
void finalize_scatter(ScatterModel& model);

}  // namespace mdlmd
