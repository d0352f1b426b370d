#include "mdlmd/estimators.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace mdlmd;
using testutil::max_abs;

TEST_CASE("fit_moment on two points uses the 1/n normalization") {
  RowMatrix r(2, 2);
  r << 0, 0, 2, 2;
  const ScatterModel m = fit_moment(r);
  CHECK(m.location(0) == doctest::Approx(1.0));
  CHECK(m.location(1) == doctest::Approx(1.0));
  Matrix expect(2, 2);
  expect << 1, 1, 1, 1;
  CHECK(max_abs(m.scatter - expect) < 1e-12);
  // Singular: the ridge path must have been taken.
  CHECK(m.ridge_used > 0.0);
}

TEST_CASE("fit_moment rejects a single row") { CHECK_THROWS_AS(fit_moment(RowMatrix::Zero(1, 2)), Error); }

TEST_CASE("fit_moment on repeated rows goes through the ridge path") {
  RowMatrix r = RowMatrix::Ones(5, 3);
  const ScatterModel m = fit_moment(r);
  CHECK(m.ridge_used > 0.0);
  CHECK(std::isfinite(m.log_det));
  CHECK(m.scatter_inv.allFinite());
}

TEST_CASE("fit_moment recovers a known covariance") {
  RowMatrix r = testutil::normal_rows(500, 2, 11);
  r.col(0) *= 2.0;
  const ScatterModel m = fit_moment(r);
  CHECK(std::abs(m.scatter(0, 0) - 4.0) < 0.5);
  CHECK(std::abs(m.scatter(1, 1) - 1.0) < 0.5);
  CHECK(std::abs(m.scatter(0, 1)) < 0.5);
  CHECK(max_abs(m.scatter_inv * m.scatter - Matrix::Identity(2, 2)) < 1e-6);
}

TEST_CASE("fit_moment is affine equivariant") {
  const RowMatrix r = testutil::normal_rows(200, 3, 12);
  Matrix A(3, 3);
  A << 2, 1, 0, 0, 1, -1, 1, 0, 3;
  Vector b(3);
  b << 1, -2, 5;
  RowMatrix t = (r * A.transpose()).rowwise() + b.transpose();
  const ScatterModel m = fit_moment(r), mt = fit_moment(t);
  CHECK(max_abs(mt.location - (A * m.location + b)) < 1e-8 * (1 + max_abs(mt.location)));
  CHECK(max_abs(mt.scatter - A * m.scatter * A.transpose()) < 1e-8 * max_abs(mt.scatter));
}

TEST_CASE("fit_diagonal") {
  RowMatrix r(2, 2);
  r << 0, 0, 2, 4;
  const ScatterModel m = fit_diagonal(r);
  CHECK(m.scatter(0, 0) == doctest::Approx(1.0));
  CHECK(m.scatter(1, 1) == doctest::Approx(4.0));
  CHECK(m.scatter(0, 1) == 0.0);
  CHECK(m.scatter(1, 0) == 0.0);
  CHECK(m.mode == ScatterMode::Diagonal);

  SUBCASE("already diagonal moment scatter is kept") {
    RowMatrix s(4, 2);
    s << 1, 0, -1, 0, 0, 2, 0, -2;
    CHECK(max_abs(fit_diagonal(s).scatter - fit_moment(s).scatter) < 1e-15);
  }
  SUBCASE("constant column is clamped") {
    RowMatrix s(3, 2);
    s << 1, 5, 2, 5, 3, 5;
    const ScatterModel c = fit_diagonal(s);
    CHECK(c.scatter(1, 1) == kZeroVarianceFloor);
    CHECK(c.zero_variance_clamped);
  }
}

TEST_CASE("fit_identity") {
  const RowMatrix r = testutil::normal_rows(10, 3, 13);
  const ScatterModel m = fit_identity(r);
  CHECK(max_abs(m.scatter - Matrix::Identity(3, 3)) == 0.0);
  CHECK(max_abs(m.scatter_inv - Matrix::Identity(3, 3)) == 0.0);
  CHECK(m.log_det == 0.0);
  const ScatterModel one = fit_identity(r.topRows(1));
  CHECK(max_abs(one.location - r.row(0).transpose()) == 0.0);
}

TEST_CASE("invert_scatter") {
  const InverseResult id = invert_scatter(Matrix::Identity(2, 2));
  CHECK(max_abs(id.inverse - Matrix::Identity(2, 2)) < 1e-15);
  CHECK(id.log_det == doctest::Approx(0.0));
  CHECK(id.ridge_used == 0.0);

  Matrix d(2, 2);
  d << 4, 0, 0, 1;
  const InverseResult di = invert_scatter(d);
  CHECK(di.inverse(0, 0) == doctest::Approx(0.25));
  CHECK(di.inverse(1, 1) == doctest::Approx(1.0));
  CHECK(di.log_det == doctest::Approx(std::log(4.0)));
  CHECK(max_abs(di.inverse * d - Matrix::Identity(2, 2)) < 1e-6);

  Matrix s(2, 2);
  s << 1, 1, 1, 1;
  const InverseResult si = invert_scatter(s);
  CHECK(si.ridge_used > 0.0);
  CHECK(si.inverse.allFinite());

  Matrix ns(2, 2);
  ns << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(invert_scatter(ns), Error);
}

TEST_CASE("fit_mcd") {
  SUBCASE("clean data") {
    const RowMatrix r = testutil::normal_rows(200, 2, 14);
    const ScatterModel m = fit_mcd(r);
    CHECK(m.mode == ScatterMode::MCD);
    CHECK(std::abs(m.location(0)) < 0.3);
    CHECK(std::abs(m.location(1)) < 0.3);
  }
  SUBCASE("contaminated data") {
    RowMatrix r = testutil::normal_rows(200, 2, 15);
    for (int i = 160; i < 200; ++i) r.row(i) << 100, 100;
    const ScatterModel robust = fit_mcd(r);
    CHECK(std::abs(robust.location(0)) < 0.5);
    CHECK(std::abs(robust.location(1)) < 0.5);
    CHECK(fit_moment(r).location(0) > 10.0);
  }
  SUBCASE("full coverage reduces to the moment estimate up to a scalar") {
    const RowMatrix r = testutil::normal_rows(60, 3, 16);
    McdOptions o;
    o.coverage = 1.0;
    const ScatterModel m = fit_mcd(r, o), mom = fit_moment(r);
    CHECK(max_abs(m.location - mom.location) < 1e-10);
    const double f = m.scatter(0, 0) / mom.scatter(0, 0);
    CHECK(max_abs(m.scatter - f * mom.scatter) < 1e-10 * max_abs(m.scatter));
  }
  SUBCASE("C-steps never increase the determinant") {
    const RowMatrix r = testutil::normal_rows(100, 3, 17);
    std::vector<int> start = {0, 5, 9, 22};
    const auto dets = mcd_csteps(r, start, 75, 20);
    REQUIRE(dets.size() >= 2);
    for (std::size_t i = 1; i < dets.size(); ++i) CHECK(dets[i] <= dets[i - 1] * (1 + 1e-12));
  }
  SUBCASE("too few rows") { CHECK_THROWS_AS(fit_mcd(testutil::normal_rows(3, 4, 1)), Error); }
  SUBCASE("seeded runs agree") {
    const RowMatrix r = testutil::normal_rows(80, 2, 18);
    CHECK(max_abs(fit_mcd(r).scatter - fit_mcd(r).scatter) == 0.0);
  }
}
