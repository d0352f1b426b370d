#include "mdlmd/spline.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace mdlmd;

TEST_CASE("quantile knots on a uniform column") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  Vector col(5000);
  for (Index i = 0; i < col.size(); ++i) col(i) = u(rng);
  const SplineBasis b = build_basis(col, 3);
  REQUIRE(b.knots.size() == 3);
  CHECK(b.knots(0) == doctest::Approx(0.25).epsilon(0.05));
  CHECK(b.knots(1) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(b.knots(2) == doctest::Approx(0.75).epsilon(0.05));
  CHECK(b.lo <= col.minCoeff());
  CHECK(b.hi >= col.maxCoeff());
  CHECK(b.n_basis == 7);
  for (Index i = 1; i < b.knots.size(); ++i) CHECK(b.knots(i) > b.knots(i - 1));

  SUBCASE("partition of unity inside the range") {
    for (int t = 0; t < 100; ++t) CHECK(b.evaluate(u(rng)).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("linear continuation outside the range") {
    const Vector e0 = b.evaluate(b.hi + 1.0), e1 = b.evaluate(b.hi + 2.0), e2 = b.evaluate(b.hi + 3.0);
    CHECK(testutil::max_abs((e2 - e1) - (e1 - e0)) < 1e-10);
  }
}

TEST_CASE("constant column falls back to a linear basis") {
  const SplineBasis b = build_basis(Vector::Constant(20, 3.0), 4);
  CHECK(b.linear_fallback);
  CHECK(b.n_basis == 2);
  CHECK(b.evaluate(3.0).sum() == doctest::Approx(1.0));
}

TEST_CASE("penalty null space is the linear functions") {
  Vector col = Vector::LinSpaced(200, -2.0, 5.0);
  const SplineBasis b = build_basis(col, 6);
  const Matrix P = b.penalty();
  const Vector g = b.greville();
  // Coefficients equal to Greville abscissae reproduce x; constants reproduce 1.
  CHECK((P * g).norm() < 1e-8 * P.norm() * g.norm());
  CHECK((P * Vector::Ones(b.n_basis)).norm() < 1e-8 * P.norm());
  Vector curved = g.array().square();
  CHECK((P * curved).norm() > 1e-3);
  const Matrix B = b.evaluate(col);
  // Greville abscissae are on the unit scale of the (padded) basis range.
  const Vector unit = (col.array() - b.lo) / (b.hi - b.lo);
  CHECK(testutil::max_abs(B * g - unit) < 1e-8);
}
