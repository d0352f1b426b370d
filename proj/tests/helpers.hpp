#pragma once

#include "mdlmd/types.hpp"

#include <cmath>
#include <random>

namespace testutil {

inline mdlmd::RowMatrix normal_rows(int n, int d, unsigned long long seed, double sd = 1.0, double shift = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(shift, sd);
  mdlmd::RowMatrix m(n, d);
  for (mdlmd::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

inline mdlmd::Dataset two_class(const mdlmd::RowMatrix& a, const mdlmd::RowMatrix& b) {
  mdlmd::Dataset ds;
  ds.rows.resize(a.rows() + b.rows(), a.cols());
  ds.rows << a, b;
  ds.labels.assign(a.rows(), 1);
  ds.labels.insert(ds.labels.end(), b.rows(), 2);
  return ds;
}

inline double max_abs(const mdlmd::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
