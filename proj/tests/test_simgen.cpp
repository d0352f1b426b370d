#include "mdlmd/classifier.hpp"
#include "mdlmd/simgen.hpp"

#include "helpers.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mdlmd;

namespace {

Vector norms(const RowMatrix& r) { return r.rowwise().norm(); }

double median(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  return v.size() % 2 ? v(v.size() / 2) : 0.5 * (v(v.size() / 2 - 1) + v(v.size() / 2));
}

Matrix cov(const RowMatrix& r) {
  const RowMatrix c = r.rowwise() - r.colwise().mean();
  return c.transpose() * c / static_cast<double>(r.rows());
}

}  // namespace

TEST_CASE("uniform shells") {
  const RowMatrix r = gen_uniform_shell(2000, 5, 1.0, 2.0, std::nullopt, 1);
  const Vector n = norms(r);
  CHECK(n.minCoeff() >= 1.0);
  CHECK(n.maxCoeff() <= 2.0);
  const Vector sphere = norms(gen_uniform_shell(100, 3, 1.5, 1.5, std::nullopt, 2));
  CHECK((sphere.array() - 1.5).abs().maxCoeff() < 1e-12);
  CHECK(norms(gen_uniform_shell(100000, 2, 0.0, 1.0, std::nullopt, 3)).mean() == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  CHECK_THROWS_AS(gen_uniform_shell(10, 2, 2.0, 1.0, std::nullopt, 4), Error);

  const Matrix s = equicorrelation(4, 0.5);
  const RowMatrix e = gen_uniform_shell(1000, 4, 1.0, 2.0, s, 5);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Matrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const Vector m = norms(e * root);
  CHECK(m.minCoeff() >= 1.0 - 1e-12);
  CHECK(m.maxCoeff() <= 2.0 + 1e-12);
}

TEST_CASE("normal, t, Cauchy, Laplace and exponential generators") {
  Vector mu(3);
  mu << 1, -2, 0.5;
  const Matrix c = equicorrelation(3, 0.3) * 2.0;
  const int n = 4000;
  const RowMatrix x = gen_mvnormal(n, mu, c, 6);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(x.col(k).mean() - mu(k)) < 4 * std::sqrt(c(k, k) / n));
  CHECK(testutil::max_abs(cov(x) - c) < 0.2);

  const Vector radius = norms(gen_spherical_radius(50, 4, [](Rng&) { return 2.5; }, 7));
  CHECK((radius.array() - 2.5).abs().maxCoeff() < 1e-12);

  // Median squared norm of t3 in d = 2 from the F(2, 3) distribution:
  // |x|^2 / 2 ~ F(2,3), whose median is 1.5 (2^{2/3} - 1).
  const Vector t = norms(gen_mvt(20000, 3.0, Vector::Zero(2), Matrix::Identity(2, 2), 8)).array().square();
  CHECK(median(t) == doctest::Approx(2.0 * 1.5 * (std::pow(2.0, 2.0 / 3.0) - 1.0)).epsilon(0.05));

  // Cauchy marginals: median |x| = 1.
  const RowMatrix cau = gen_cauchy(20000, Vector::Zero(1), Matrix::Identity(1, 1), 9);
  CHECK(median(cau.col(0).cwiseAbs()) == doctest::Approx(1.0).epsilon(0.05));

  const RowMatrix lap = gen_laplace_iid(20000, 2, Vector::Zero(2), 1.5, 10);
  CHECK(lap.cwiseAbs().mean() == doctest::Approx(1.5).epsilon(0.03));
  const RowMatrix ex = gen_exponential_iid(20000, 2, 2.0, 11);
  CHECK(ex.minCoeff() >= 0.0);
  CHECK(ex.mean() == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("helper matrices") {
  const Matrix ar = ar_matrix(4, 0.5);
  CHECK(ar(0, 3) == doctest::Approx(0.125));
  CHECK(ar(2, 1) == doctest::Approx(0.5));
  const Vector a = alternating(4);
  CHECK(a(0) == -1.0);
  CHECK(a(1) == 1.0);
  RowMatrix p(1, 4);
  p << 1, 0, 0, 1;
  const RowMatrix q = rotate_pairs(p);
  CHECK(q(0, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(q(0, 1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(q(0, 2) == doctest::Approx(-std::sqrt(0.5)));
  CHECK(q(0, 3) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("example 6 calibration gives equal second moments") {
  const double s2 = example6_sigma2(), c = example6_c();
  CHECK(std::abs((30.25 + s2) - 100.0 / 3.0) < 1e-10);
  CHECK(std::abs(c * c * 3.0 / 8.0 - 100.0 / 3.0) < 1e-10);
}

TEST_CASE("datasets are deterministic and well formed") {
  for (const auto& id : known_examples()) {
    const int d = id == "A" || id == "B" ? 2 : 4;
    const auto [tr, te] = gen_example({id, d, 12, 7}, 5);
    const auto [tr2, te2] = gen_example({id, d, 12, 7}, 5);
    CAPTURE(id);
    CHECK(tr.rows == tr2.rows);
    CHECK(te.rows == te2.rows);
    CHECK(tr.n() == 12 * example_class_count(id));
    CHECK(te.n() == 7 * example_class_count(id));
    CHECK(tr.rows.allFinite());
    CHECK(tr.rows != te.rows.topRows(std::min(tr.n(), te.n())));
  }
  CHECK_THROWS_AS(gen_example({"99", 2, 10, 10}, 1), Error);
  CHECK_THROWS_AS(gen_example({"B", 3, 10, 10}, 1), Error);
  CHECK_FALSE(is_known_example("0"));
}

TEST_CASE("example 1 classes have disjoint supports") {
  const auto [tr, te] = gen_example({"1", 2, 100, 2000}, 6);
  for (int i = 0; i < te.n(); ++i) {
    const double r = te.rows.row(i).norm();
    // Class 1 lives on the shells [0,1] and [2,3], class 2 on [1,2] and [3,4].
    if (te.labels[i] == 1)
      CHECK(((r <= 1.0) || (r >= 2.0 && r <= 3.0)));
    else
      CHECK(((r >= 1.0 && r <= 2.0) || (r >= 3.0 && r <= 4.0)));
  }
  CHECK(error_rate(bayes_oracle("1", 2)(te.rows), te.labels) == 0.0);
}

TEST_CASE("example 5 classes share location and scatter") {
  const auto [tr, te] = gen_example({"5", 3, 5000, 1}, 7);
  const RowMatrix a = tr.class_rows(1), b = tr.class_rows(2);
  CHECK((a.colwise().mean() - b.colwise().mean()).norm() < 0.15);
  // The t3 class has no fourth moment, so its sample trace converges slowly.
  // Squared norms are compared through medians instead: |x|^2 / 3 is
  // chi-square(3) for the normal class and F(3,3), median 1, for the t class.
  const Vector na = norms(a).array().square(), nb = norms(b).array().square();
  boost::math::chi_squared chi3(3.0);
  CHECK(median(na) == doctest::Approx(3.0 * boost::math::quantile(chi3, 0.5)).epsilon(0.05));
  CHECK(median(nb) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("rotated class equals rotated covariance") {
  const auto [tr, te] = gen_example({"12", 4, 20000, 1}, 8);
  const Matrix c1 = cov(tr.class_rows(1)), c2 = cov(tr.class_rows(2));
  Matrix R = Matrix::Zero(4, 4);
  const double s = std::sqrt(0.5);
  for (int p = 0; p < 4; p += 2) {
    R(p, p) = s;
    R(p, p + 1) = -s;
    R(p + 1, p) = s;
    R(p + 1, p + 1) = s;
  }
  CHECK(testutil::max_abs(c2 - R * c1 * R.transpose()) < 0.05 * testutil::max_abs(c1) + 0.02);
}

TEST_CASE("mixture proportions follow their weights") {
  // Component identity is not exposed, so count points on each side of the
  // gap between the two well separated components of Example B.
  const auto [tr, te] = gen_example({"B", 2, 4000, 1}, 9);
  const RowMatrix c1 = tr.class_rows(1);
  int near = 0;
  for (Index i = 0; i < c1.rows(); ++i) near += (c1(i, 0) - c1(i, 1)) > -2.0;
  const double n = c1.rows(), p = 0.5;
  CHECK(std::abs(near - n * p) < 4 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("Bayes oracle error rates") {
  auto oracle_error = [](const std::string& id, int d) {
    const auto [tr, te] = gen_example({id, d, 10, 10000}, 10);
    return error_rate(bayes_oracle(id, d)(te.rows), te.labels);
  };
  CHECK(std::abs(oracle_error("2", 4) - 0.2748) < 0.01);
  CHECK(std::abs(oracle_error("3", 6) - 0.0912) < 0.01);
}
