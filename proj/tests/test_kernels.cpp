#include "mdlmd/kernels.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace mdlmd;

TEST_CASE("parallel kernels agree with their serial references") {
  const RowMatrix a = testutil::normal_rows(157, 13, 21), b = testutil::normal_rows(91, 13, 22);
  Matrix p, s;
  kernels::pairwise_sq_dist(a, b, p);
  kernels::pairwise_sq_dist_serial(a, b, s);
  CHECK(testutil::max_abs(p - s) == 0.0);
  // Direct definition.
  CHECK((a.row(3) - b.row(7)).squaredNorm() == doctest::Approx(p(3, 7)).epsilon(1e-12));

  const Vector c = b.row(0).transpose();
  Vector vp, vs;
  kernels::sq_dist_to_point(a, c, vp);
  kernels::sq_dist_to_point_serial(a, c, vs);
  CHECK((vp - vs).cwiseAbs().maxCoeff() == 0.0);

  Vector gp, gs;
  kernels::gaussian_weighted_mean(p, 2.5, -1.0, gp);
  kernels::gaussian_weighted_mean_serial(p, 2.5, -1.0, gs);
  CHECK((gp - gs).cwiseAbs().maxCoeff() == 0.0);
  double direct = 0.0;
  for (Index k = 0; k < p.cols(); ++k) direct += std::exp(-1.0 - p(0, k) / (2 * 2.5 * 2.5)) * p(0, k);
  CHECK(gp(0) == doctest::Approx(direct / p.cols()).epsilon(1e-12));
}

TEST_CASE("thread limit from the environment") {
  CHECK(kernels::worker_count() >= 1);
  setenv("MDGAM_THREADS", "1", 1);
  kernels::apply_thread_limit_from_env();
  CHECK(kernels::worker_count() == 1);
  setenv("MDGAM_THREADS", "many", 1);
  CHECK_THROWS_AS(kernels::apply_thread_limit_from_env(), Error);
  unsetenv("MDGAM_THREADS");
}
