#include "mdlmd/features.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mdlmd;

namespace {

ScatterModel diag_model(double a, double b) {
  RowMatrix r(2, 2);
  // Two points give variances a and b about the mean 0.
  r << std::sqrt(a), std::sqrt(b), -std::sqrt(a), -std::sqrt(b);
  return fit_diagonal(r);
}

double pearson(const Vector& a, const Vector& b) {
  const Vector x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

}  // namespace

TEST_CASE("mahalanobis on analytic cases") {
  const ScatterModel id = fit_identity(RowMatrix::Zero(1, 2));
  Vector x(2);
  x << 3, 4;
  CHECK(mahalanobis(x, id) == doctest::Approx(5.0));
  CHECK(mahalanobis(id.location, id) == 0.0);

  const ScatterModel d = diag_model(4, 1);
  x << 2, 3;
  CHECK(mahalanobis(x, d) == doctest::Approx(std::sqrt(10.0)));
  CHECK_THROWS_AS(mahalanobis(Vector::Zero(3), d), Error);
}

TEST_CASE("md_features") {
  const RowMatrix a = testutil::normal_rows(50, 2, 31, 1.0, 5.0), b = testutil::normal_rows(50, 2, 32, 1.0, -5.0);
  const std::vector<ScatterModel> models = {fit_moment(a), fit_moment(b)};
  const FeatureMatrix fa = md_features(a, models), fb = md_features(b, models);
  CHECK(fa.kind() == FeatureKind::md());
  for (int i = 0; i < 50; ++i) {
    CHECK(fa.values()(i, 0) < fa.values()(i, 1));
    CHECK(fb.values()(i, 1) < fb.values()(i, 0));
  }
  RowMatrix mu(1, 2);
  mu.row(0) = models[0].location.transpose();
  CHECK(md_features(mu, {models[0]}).values()(0, 0) == doctest::Approx(0.0).epsilon(1e-12));

  const FeatureMatrix swapped = md_features(a, {models[1], models[0]});
  CHECK(testutil::max_abs(swapped.values().col(0) - fa.values().col(1)) == 0.0);
  CHECK_THROWS_AS(md_features(a, {}), Error);
}

TEST_CASE("MD features are affine invariant and scale with Identity scatter") {
  const RowMatrix r = testutil::normal_rows(80, 3, 33), x = testutil::normal_rows(10, 3, 34);
  Matrix A(3, 3);
  A << 1, 2, 0, 0, 3, 1, -1, 0, 2;
  Vector b(3);
  b << 4, 0, -1;
  const RowMatrix rt = (r * A.transpose()).rowwise() + b.transpose();
  const RowMatrix xt = (x * A.transpose()).rowwise() + b.transpose();
  const Matrix f = md_features(x, {fit_moment(r)}).values();
  const Matrix ft = md_features(xt, {fit_moment(rt)}).values();
  CHECK(testutil::max_abs(f - ft) < 1e-8);

  const Matrix g = md_features(x, {fit_identity(r)}).values();
  const Matrix g3 = md_features(3.0 * x, {fit_identity(3.0 * r)}).values();
  CHECK(testutil::max_abs(g3 - 3.0 * g) < 1e-10);
}

TEST_CASE("location-shift identity for the 1/n moment scatter") {
  const RowMatrix r = testutil::normal_rows(60, 4, 35);
  const ScatterModel m = fit_moment(r);
  const Matrix q = standardized_sq_dist(r, r, m);
  const Matrix delta2 = squared_md_matrix(r, {m});
  for (Index i = 0; i < r.rows(); ++i) CHECK(std::abs(q.row(i).mean() - 4.0 - delta2(i, 0)) < 1e-8);
}

TEST_CASE("Gaussian kernel profile") {
  const KernelProfile k = gaussian_profile(3);
  CHECK(k.psi(0) == doctest::Approx(std::pow(2 * std::numbers::pi, -1.5)));
  CHECK(k.psi_at_zero() == doctest::Approx(k.psi(0)));
  CHECK(k.kappa2() == 3.0);
  CHECK(k.psi(2) / k.psi(0) == doctest::Approx(std::exp(-1.0)));
  for (double s = 0; s < 10; s += 0.5) CHECK(k.psi(s + 0.5) <= k.psi(s));
  CHECK(k.normalized().psi(0) == doctest::Approx(1.0));
}

TEST_CASE("lmd_beta and lmd_value") {
  const ScatterModel id = fit_identity(RowMatrix::Zero(1, 2));
  const KernelProfile k = gaussian_profile(2);
  Vector x(2);
  x << 0.3, -0.2;
  RowMatrix one(1, 2);
  one.row(0) = x.transpose();
  CHECK(lmd_beta(x, one, id, 1.0, k) == 0.0);

  RowMatrix unit(1, 2);
  unit << 1.3, -0.2;  // q = 1
  CHECK(lmd_beta(x, unit, id, 1.0, k) == doctest::Approx(std::exp(-0.5) / (2 * std::numbers::pi)));

  const RowMatrix rows = testutil::normal_rows(30, 2, 36);
  const double beta_big = lmd_beta(x, rows, id, 1e6, k);
  const Matrix q = standardized_sq_dist(one, rows, id);
  CHECK(beta_big == doctest::Approx(k.psi_at_zero() * q.mean()).epsilon(1e-6));

  const double b1 = lmd_beta(x, rows, id, 1.0, k);
  CHECK(lmd_value(x, rows, id, 1.0, k) == doctest::Approx(b1));
  const double bh = lmd_beta(x, rows, id, 0.5, k);
  CHECK(lmd_value(x, rows, id, 0.5, k) == doctest::Approx(16.0 * bh));
  CHECK(lmd_branch(2.0, 0.5, 2) == doctest::Approx(32.0));
  CHECK(lmd_branch(2.0, 3.0, 2) == 2.0);

  CHECK_THROWS_AS(lmd_beta(x, rows, id, 0.0, k), Error);
  CHECK_THROWS_AS(lmd_beta(Vector::Zero(3), rows, id, 1.0, k), Error);
}

TEST_CASE("large-h limit of LMD features") {
  const RowMatrix a = testutil::normal_rows(40, 2, 37), b = testutil::normal_rows(40, 2, 38, 2.0, 1.0);
  const std::vector<ScatterModel> models = {fit_moment(a), fit_moment(b)};
  const KernelProfile k = gaussian_profile(2);
  RowMatrix all(80, 2);
  all << a, b;
  const FeatureMatrix f = lmd_features(all, {a, b}, models, 1e6, k);
  CHECK(f.kind() == FeatureKind::lmd(1e6));
  const Matrix d2 = squared_md_matrix(all, models);
  for (int j = 0; j < 2; ++j) {
    const Vector limit = k.psi_at_zero() * (d2.col(j).array() + 2.0);
    CHECK(pearson(f.values().col(j), limit) > 0.999);
    CHECK(((f.values().col(j) - limit).cwiseAbs().array() / limit.array()).maxCoeff() < 1e-4);
  }
}

TEST_CASE("LMD of a class made of identical rows") {
  RowMatrix same = RowMatrix::Ones(5, 2);
  const ScatterModel id = fit_identity(same);
  const RowMatrix x = testutil::normal_rows(6, 2, 39);
  const Matrix v = lmd_features(x, {same}, {id}, 2.0, gaussian_profile(2)).values();
  // Each value is Psi(q/h^2) q with q the same for all 5 class rows.
  for (Index i = 0; i < x.rows(); ++i) {
    const double q = (x.row(i) - same.row(0)).squaredNorm();
    CHECK(v(i, 0) == doctest::Approx(gaussian_profile(2).psi(q / 4.0) * q));
  }
}

TEST_CASE("small-h LMD recovers the density at the mode") {
  const RowMatrix r = testutil::normal_rows(20000, 2, 40);
  const ScatterModel m = fit_moment(r);
  const KernelProfile k = gaussian_profile(2);
  const double v = lmd_value(Vector::Zero(2), r, m, 0.15, k);
  const double f0 = 1.0 / (2 * std::numbers::pi);
  const double est = v / (std::exp(0.5 * m.log_det) * k.kappa2());
  CHECK(std::abs(est - f0) / f0 < 0.15);
}

TEST_CASE("FeatureMatrix validates entries") {
  Matrix bad(1, 2);
  bad << 1.0, -1.0;
  CHECK_THROWS_AS(FeatureMatrix(bad, FeatureKind::md()), Error);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(FeatureMatrix(bad, FeatureKind::md()), Error);
  CHECK(FeatureKind::parse(FeatureKind::lmd(0.25).to_string()) == FeatureKind::lmd(0.25));
}
