#include "mdlmd/baselines.hpp"
#include "mdlmd/classifier.hpp"
#include "mdlmd/simgen.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mdlmd;

namespace {

double mean_error(const std::string& id, int d, const std::string& which, int reps = 3) {
  double s = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto [tr, te] = gen_example({id, d, 100, 2000}, 100 + r);
    Labels p;
    if (which == "lda") p = lda_predict(lda_fit(tr), te.rows);
    if (which == "qda") p = qda_predict(qda_fit(tr), te.rows);
    if (which == "knn") p = knn_predict(knn_fit(tr, 1), te.rows);
    s += error_rate(p, te.labels);
  }
  return s / reps;
}

}  // namespace

TEST_CASE("LDA on the reference examples") {
  CHECK(std::abs(mean_error("2", 4, "lda") - 0.2809) < 0.03);
  CHECK(std::abs(mean_error("1", 2, "lda") - 0.4958) < 0.03);
  const Dataset a = testutil::two_class(testutil::normal_rows(100, 3, 1), testutil::normal_rows(100, 3, 2));
  const Dataset b = testutil::two_class(testutil::normal_rows(2000, 3, 3), testutil::normal_rows(2000, 3, 4));
  CHECK(std::abs(error_rate(lda_predict(lda_fit(a), b.rows), b.labels) - 0.5) < 0.05);
}

TEST_CASE("QDA on the scale example") { CHECK(std::abs(mean_error("3", 4, "qda") - 0.1508) < 0.03); }

TEST_CASE("kNN on the shell example") {
  CHECK(std::abs(mean_error("1", 2, "knn") - 0.1275) < 0.04);
  CHECK(mean_error("1", 6, "knn", 1) >= 0.30);
}

TEST_CASE("QDA and LDA agree on equal-covariance data") {
  const Dataset tr = testutil::two_class(testutil::normal_rows(2000, 2, 5, 1.0, 1.0), testutil::normal_rows(2000, 2, 6, 1.0, -1.0));
  const RowMatrix x = testutil::normal_rows(2000, 2, 7, 2.0);
  const Labels a = lda_predict(lda_fit(tr), x), b = qda_predict(qda_fit(tr), x);
  int same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  CHECK(same > 0.95 * a.size());
}

TEST_CASE("singular class covariance goes through the ridge path") {
  RowMatrix a = testutil::normal_rows(30, 3, 8), b = testutil::normal_rows(30, 3, 9, 1.0, 2.0);
  a.col(2).setConstant(1.0);
  const Dataset tr = testutil::two_class(a, b);
  const Labels p = qda_predict(qda_fit(tr), tr.rows);
  CHECK(p.size() == 60);
  CHECK_NOTHROW(lda_predict(lda_fit(tr), tr.rows));
}

TEST_CASE("LDA decision differences are affine in x") {
  const auto [tr, te] = gen_example({"3", 3, 100, 10}, 11);
  const LdaModel m = lda_fit(tr);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;
  for (int t = 0; t < 10; ++t) {
    Vector x0(3), dir(3);
    for (int k = 0; k < 3; ++k) {
      x0(k) = z(rng);
      dir(k) = z(rng);
    }
    RowMatrix line(3, 3);
    for (int s = 0; s < 3; ++s) line.row(s) = (x0 + s * dir).transpose();
    const Matrix sc = lda_scores(m, line);
    const Vector diff = sc.col(0) - sc.col(1);
    CHECK(std::abs(diff(0) - 2 * diff(1) + diff(2)) < 1e-9 * (1 + diff.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("kNN rules") {
  const auto [tr, te] = gen_example({"2", 3, 50, 10}, 13);
  CHECK(error_rate(knn_vote(tr.rows, tr.labels, 2, 1, tr.rows), tr.labels) == 0.0);
  CHECK_THROWS_AS(knn_vote(tr.rows, tr.labels, 2, 0, tr.rows), Error);
  CHECK_THROWS_AS(knn_vote(tr.rows, tr.labels, 2, 1000, tr.rows), Error);

  // Vote tie between labels 1 and 2 goes to the smaller label.
  RowMatrix rows(2, 1);
  rows << -1, 1;
  RowMatrix q(1, 1);
  q << 0;
  CHECK(knn_vote(rows, {2, 1}, 2, 2, q)[0] == 1);

  // Orthogonal maps leave predictions unchanged.
  Matrix Q = Eigen::HouseholderQR<Matrix>(Matrix::Random(3, 3)).householderQ();
  const KnnModel m = knn_fit(tr, 3);
  Dataset rot = tr;
  rot.rows = tr.rows * Q.transpose();
  const RowMatrix tq = te.rows * Q.transpose();
  CHECK(knn_vote(tr.rows, tr.labels, 2, m.k, te.rows) == knn_vote(rot.rows, rot.labels, 2, m.k, tq));

  CHECK(m.k_grid.size() == m.cv_errors.size());
  for (int k : m.k_grid) CHECK(k <= 50);
  CHECK(default_k_grid() == std::vector<int>{1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21});
}
