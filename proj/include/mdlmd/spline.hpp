#pragma once

#include "mdlmd/types.hpp"

namespace mdlmd {

// Cubic B-spline basis on [lo, hi] with interior knots at column quantiles.
// Outside [lo, hi] every basis function is continued linearly, so fitted
// additive terms extrapolate linearly.
struct SplineBasis {
  Vector knots;  // interior knots, strictly increasing, inside (lo, hi)
  int degree = 3;
  double lo = 0.0;
  double hi = 1.0;
  int n_basis = 0;
  // Too few distinct values: two linear functions (1-u, u) instead.
  bool linear_fallback = false;

  Vector evaluate(double x) const;
  Matrix evaluate(const Vector& column) const;
  // Roughness penalty D^T D, D = second divided differences of coefficients
  // over the Greville abscissae (in [0,1] units); its null space is exactly
  // the coefficient vectors that reproduce linear functions.
  Matrix penalty() const;
  Vector greville() const;

 private:
  Vector full_knot_vector() const;
  Vector inside(double x, int deg) const;
  Vector derivative(double x) const;
};

// Quantile-knot cubic basis; falls back to a linear basis (flagged) when the
// column has fewer than n_interior_knots + 2 distinct values.
SplineBasis build_basis(const Vector& column, int n_interior_knots);

}  // namespace mdlmd
