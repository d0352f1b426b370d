#include "mdlmd/spline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mdlmd {

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace

SplineBasis build_basis(const Vector& column, int n_interior_knots) {
  if (n_interior_knots < 1) throw Error(ErrorCode::BadParameters, "need at least one interior knot");
  if (column.size() < 1) throw Error(ErrorCode::TooFewRows, "empty feature column");
  std::vector<double> v(column.data(), column.data() + column.size());
  std::sort(v.begin(), v.end());
  const double mn = v.front(), mx = v.back();
  const double range = mx - mn;
  SplineBasis b;
  const double pad = range > 0.0 ? 1e-6 * range : 1e-6 * std::max(1.0, std::abs(mn));
  b.lo = mn - pad;
  b.hi = mx + pad;

  std::vector<double> u = v;
  const auto distinct = std::unique(u.begin(), u.end()) - u.begin();

  if (distinct < n_interior_knots + 2) {
    b.linear_fallback = true;
    b.degree = 1;
    b.n_basis = 2;
    return b;
  }

  std::vector<double> k;
  for (int i = 1; i <= n_interior_knots; ++i) {
    const double q = quantile_sorted(v, static_cast<double>(i) / (n_interior_knots + 1));
    if (q > b.lo && q < b.hi && (k.empty() || q > k.back())) k.push_back(q);
  }
  b.knots = Eigen::Map<Vector>(k.data(), static_cast<Index>(k.size()));
  b.degree = 3;
  b.n_basis = static_cast<int>(k.size()) + 4;
  return b;
}

Vector SplineBasis::full_knot_vector() const {
  const Index m = knots.size();
  Vector t(m + 8);
  for (int i = 0; i < 4; ++i) {
    t(i) = lo;
    t(m + 4 + i) = hi;
  }
  for (Index i = 0; i < m; ++i) t(4 + i) = knots(i);
  return t;
}

// All basis functions of degree `deg` on the cubic knot vector, at x in [lo, hi].
Vector SplineBasis::inside(double x, int deg) const {
  const Vector t = full_knot_vector();
  const Index nt = t.size();
  // Degree-0 indicators; the right end belongs to the last non-empty span.
  Index span = -1;
  for (Index i = 0; i + 1 < nt; ++i) {
    if (t(i) < t(i + 1) && x >= t(i) && x < t(i + 1)) {
      span = i;
      break;
    }
  }
  if (span < 0) {
    for (Index i = nt - 2; i >= 0; --i)
      if (t(i) < t(i + 1)) {
        span = i;
        break;
      }
  }
  Vector b = Vector::Zero(nt - 1);
  b(span) = 1.0;
  for (int p = 1; p <= deg; ++p) {
    Vector next = Vector::Zero(nt - 1 - p);
    for (Index i = 0; i < next.size(); ++i) {
      double v = 0.0;
      const double left = t(i + p) - t(i);
      const double right = t(i + p + 1) - t(i + 1);
      if (left > 0.0) v += (x - t(i)) / left * b(i);
      if (right > 0.0) v += (t(i + p + 1) - x) / right * b(i + 1);
      next(i) = v;
    }
    b = std::move(next);
  }
  return b;
}

Vector SplineBasis::derivative(double x) const {
  if (linear_fallback) {
    Vector d(2);
    const double w = hi - lo;
    d << -1.0 / w, 1.0 / w;
    return d;
  }
  const Vector t = full_knot_vector();
  const Vector b2 = inside(x, 2);
  Vector d = Vector::Zero(n_basis);
  for (int i = 0; i < n_basis; ++i) {
    const double left = t(i + 3) - t(i);
    const double right = t(i + 4) - t(i + 1);
    double v = 0.0;
    if (left > 0.0) v += 3.0 * b2(i) / left;
    if (right > 0.0 && i + 1 < b2.size()) v -= 3.0 * b2(i + 1) / right;
    d(i) = v;
  }
  return d;
}

Vector SplineBasis::evaluate(double x) const {
  if (linear_fallback) {
    const double u = (x - lo) / (hi - lo);
    Vector v(2);
    v << 1.0 - u, u;
    return v;
  }
  if (x < lo) return inside(lo, 3) + derivative(lo) * (x - lo);
  if (x > hi) return inside(hi, 3) + derivative(hi) * (x - hi);
  return inside(x, 3);
}

Matrix SplineBasis::evaluate(const Vector& column) const {
  Matrix out(column.size(), n_basis);
  for (Index i = 0; i < column.size(); ++i) out.row(i) = evaluate(column(i)).transpose();
  return out;
}

Vector SplineBasis::greville() const {
  if (linear_fallback) return Vector::LinSpaced(2, 0.0, 1.0);
  const Vector t = full_knot_vector();
  Vector g(n_basis);
  for (int i = 0; i < n_basis; ++i) g(i) = ((t(i + 1) + t(i + 2) + t(i + 3)) / 3.0 - lo) / (hi - lo);
  return g;
}

Matrix SplineBasis::penalty() const {
  if (n_basis < 3) return Matrix::Zero(n_basis, n_basis);
  const Vector g = greville();
  Matrix D = Matrix::Zero(n_basis - 2, n_basis);
  for (int r = 0; r + 2 < n_basis; ++r) {
    const double a = 1.0 / (g(r + 1) - g(r));
    const double c = 1.0 / (g(r + 2) - g(r + 1));
    D(r, r) = a;
    D(r, r + 1) = -a - c;
    D(r, r + 2) = c;
  }
  return D.transpose() * D;
}

}  // namespace mdlmd
