#include "mdlmd/baselines.hpp"

#include "mdlmd/features.hpp"
#include "mdlmd/gam.hpp"
#include "mdlmd/kernels.hpp"
#include "mdlmd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mdlmd {

namespace {

Vector log_priors(const Dataset& train) {
  const auto sizes = train.class_sizes();
  Vector p(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) p(j) = std::log(static_cast<double>(sizes[j]) / train.n());
  return p;
}

}  // namespace

LdaModel lda_fit(const Dataset& train, ScatterMode mode, const McdOptions& mcd) {
  const int J = validate_labels(train.labels, train.n());
  const int d = train.d();
  LdaModel m;
  m.means.resize(J, d);
  Matrix pooled = Matrix::Zero(d, d);
  const auto sizes = train.class_sizes();
  for (int j = 0; j < J; ++j) {
    const RowMatrix rows = train.class_rows(j + 1);
    if (mode == ScatterMode::Identity) {
      m.means.row(j) = rows.colwise().mean();
      continue;
    }
    const ScatterModel s = fit_scatter(rows, mode, mcd);
    m.means.row(j) = s.location.transpose();
    pooled += (static_cast<double>(sizes[j]) / train.n()) * s.scatter;
  }
  m.pooled.location = Vector::Zero(d);
  m.pooled.mode = mode == ScatterMode::MCD ? ScatterMode::Moment : mode;
  m.pooled.scatter = mode == ScatterMode::Identity ? Matrix(Matrix::Identity(d, d)) : pooled;
  finalize_scatter(m.pooled);
  m.log_priors = log_priors(train);
  return m;
}

Matrix lda_scores(const LdaModel& model, const RowMatrix& X) {
  const Index J = model.means.rows();
  if (X.cols() != model.means.cols()) throw Error(ErrorCode::DimensionMismatch, "data dimension differs from the model");
  Matrix s(X.rows(), J);
  for (Index j = 0; j < J; ++j) {
    ScatterModel centred = model.pooled;
    centred.location = model.means.row(j).transpose();
    s.col(j) = -0.5 * squared_md_matrix(X, {centred}).col(0).array() + model.log_priors(j);
  }
  return s;
}

Labels lda_predict(const LdaModel& model, const RowMatrix& X) { return argmax_labels(lda_scores(model, X)); }

QdaModel qda_fit(const Dataset& train, ScatterMode mode, const McdOptions& mcd) {
  const int J = validate_labels(train.labels, train.n());
  QdaModel m;
  for (int j = 0; j < J; ++j) {
    m.models.push_back(fit_scatter(train.class_rows(j + 1), mode, mcd));
    m.models.back().class_id = j + 1;
  }
  m.log_priors = log_priors(train);
  return m;
}

Matrix qda_scores(const QdaModel& model, const RowMatrix& X) {
  Matrix q = squared_md_matrix(X, model.models);
  for (Index j = 0; j < q.cols(); ++j)
    q.col(j) = -0.5 * q.col(j).array() - 0.5 * model.models[j].log_det + model.log_priors(j);
  return q;
}

Labels qda_predict(const QdaModel& model, const RowMatrix& X) { return argmax_labels(qda_scores(model, X)); }

std::vector<int> default_k_grid() {
  std::vector<int> g;
  for (int k = 1; k <= 21; k += 2) g.push_back(k);
  return g;
}

Labels knn_vote(const RowMatrix& rows, const Labels& labels, int class_count, int k, const RowMatrix& X) {
  if (k < 1 || k > rows.rows()) throw Error(ErrorCode::BadK, "k must lie in 1..n (got " + std::to_string(k) + ")");
  if (X.cols() != rows.cols()) throw Error(ErrorCode::DimensionMismatch, "data dimension differs from the model");
  Matrix dist;
  kernels::pairwise_sq_dist(X, rows, dist);
  Labels out(X.rows());
  std::vector<int> order(rows.rows());
  std::vector<int> votes(class_count);
  for (Index i = 0; i < X.rows(); ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
    });
    std::fill(votes.begin(), votes.end(), 0);
    for (int t = 0; t < k; ++t) ++votes[labels[order[t]] - 1];
    out[i] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin()) + 1;
  }
  return out;
}

KnnModel knn_fit(const Dataset& train, std::uint64_t seed, const std::vector<int>& k_grid, int folds) {
  const int J = validate_labels(train.labels, train.n());
  if (k_grid.empty()) throw Error(ErrorCode::BadK, "empty k grid");
  if (folds < 2) throw Error(ErrorCode::BadParameters, "need at least two folds");
  KnnModel m;
  m.rows = train.rows;
  m.labels = train.labels;
  m.class_count = J;

  // Stratified fold assignment.
  Rng rng = make_rng(seed, {stream::kFolds});
  std::vector<int> fold(train.n());
  for (int j = 1; j <= J; ++j) {
    std::vector<int> idx;
    for (int i = 0; i < train.n(); ++i)
      if (train.labels[i] == j) idx.push_back(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t t = 0; t < idx.size(); ++t) fold[idx[t]] = static_cast<int>(t % folds);
  }
  const auto sizes = train.class_sizes();
  const int min_class = *std::min_element(sizes.begin(), sizes.end());
  for (int k : k_grid)
    if (k >= 1 && k <= min_class) m.k_grid.push_back(k);
  if (m.k_grid.empty()) m.k_grid.push_back(1);

  std::vector<int> wrong(m.k_grid.size(), 0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> tr, te;
    for (int i = 0; i < train.n(); ++i) (fold[i] == f ? te : tr).push_back(i);
    if (te.empty() || tr.empty()) continue;
    RowMatrix rtr(tr.size(), train.d()), rte(te.size(), train.d());
    Labels ltr, lte;
    for (std::size_t t = 0; t < tr.size(); ++t) {
      rtr.row(t) = train.rows.row(tr[t]);
      ltr.push_back(train.labels[tr[t]]);
    }
    for (std::size_t t = 0; t < te.size(); ++t) {
      rte.row(t) = train.rows.row(te[t]);
      lte.push_back(train.labels[te[t]]);
    }
    for (std::size_t g = 0; g < m.k_grid.size(); ++g) {
      const int k = std::min<int>(m.k_grid[g], static_cast<int>(tr.size()));
      const Labels p = knn_vote(rtr, ltr, J, k, rte);
      for (std::size_t t = 0; t < p.size(); ++t) wrong[g] += p[t] != lte[t];
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 0; g < m.k_grid.size(); ++g) {
    m.cv_errors.push_back(static_cast<double>(wrong[g]) / train.n());
    if (wrong[g] < wrong[best]) best = g;
  }
  m.k = m.k_grid[best];
  return m;
}

Labels knn_predict(const KnnModel& model, const RowMatrix& X) {
  return knn_vote(model.rows, model.labels, model.class_count, model.k, X);
}

}  // namespace mdlmd
