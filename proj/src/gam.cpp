#include "mdlmd/gam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdlmd {

int default_interior_knots(int n) { return n >= 200 ? 8 : std::max(2, n / 25); }

Matrix softmax_rows(const Matrix& scores) {
  Matrix p(scores.rows(), scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    double total = 0.0;
    for (Index j = 0; j < scores.cols(); ++j) {
      p(i, j) = std::exp(scores(i, j) - mx);
      total += p(i, j);
    }
    p.row(i) /= total;
  }
  return p;
}

Labels argmax_labels(const Matrix& probabilities) {
  Labels out(probabilities.rows());
  for (Index i = 0; i < probabilities.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < probabilities.cols(); ++j)
      if (probabilities(i, j) > probabilities(i, best)) best = j;
    out[i] = static_cast<int>(best) + 1;
  }
  return out;
}

namespace {

// Centered basis with the last column dropped: the centered columns sum to
// zero, and fixing the last coefficient at 0 loses nothing because the
// roughness penalty ignores constant shifts of the coefficients.
Matrix reduced_design(const SplineBasis& basis, const Vector& means, const Vector& column) {
  Matrix B = basis.evaluate(column);
  B.rowwise() -= means.transpose();
  return B.leftCols(basis.n_basis - 1);
}

struct Problem {
  Matrix X;        // n x p, column 0 is the intercept
  Matrix S;        // p x p block penalty
  Matrix Y;        // n x (J-1) indicators
  int J = 0;
  Index n = 0;
  Index p = 0;
};

struct Eval {
  Matrix prob;     // n x J
  double deviance = 0.0;
  double penalty = 0.0;
  double objective() const { return deviance + penalty; }
};

Eval evaluate(const Problem& pr, const Matrix& theta, double lambda) {
  // theta: p x (J-1)
  Eval e;
  Matrix eta(pr.n, pr.J);
  eta.leftCols(pr.J - 1) = pr.X * theta;
  eta.col(pr.J - 1).setZero();
  e.prob = softmax_rows(eta);
  double ll = 0.0;
  for (Index i = 0; i < pr.n; ++i) {
    const double mx = eta.row(i).maxCoeff();
    const double lse = mx + std::log((eta.row(i).array() - mx).exp().sum());
    double own = 0.0;
    for (int j = 0; j + 1 < pr.J; ++j) own += pr.Y(i, j) * eta(i, j);
    ll += own - lse;
  }
  e.deviance = -2.0 * ll;
  for (int j = 0; j + 1 < pr.J; ++j) e.penalty += lambda * theta.col(j).dot(pr.S * theta.col(j));
  return e;
}

// Unpenalized information matrix (Hessian of half the deviance).
Matrix information(const Problem& pr, const Matrix& prob) {
  const int m = pr.J - 1;
  Matrix H = Matrix::Zero(m * pr.p, m * pr.p);
  for (int j = 0; j < m; ++j) {
    for (int l = j; l < m; ++l) {
      Vector w(pr.n);
      for (Index i = 0; i < pr.n; ++i) w(i) = prob(i, j) * ((j == l ? 1.0 : 0.0) - prob(i, l));
      Matrix block = pr.X.transpose() * w.asDiagonal() * pr.X;
      H.block(j * pr.p, l * pr.p, pr.p, pr.p) = block;
      if (l != j) H.block(l * pr.p, j * pr.p, pr.p, pr.p) = block.transpose();
    }
  }
  return H;
}

Matrix penalized(const Problem& pr, const Matrix& info, double lambda) {
  Matrix H = info;
  const int m = pr.J - 1;
  for (int j = 0; j < m; ++j) H.block(j * pr.p, j * pr.p, pr.p, pr.p) += lambda * pr.S;
  // Small ridge keeps the system solvable for unidentified coefficients.
  const double ridge = 1e-8 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  H.diagonal().array() += ridge;
  return H;
}

struct FitResult {
  Matrix theta;
  GamConvergence conv;
  double gcv = std::numeric_limits<double>::infinity();
};

FitResult newton(const Problem& pr, Matrix theta, double lambda, const GamOptions& opt) {
  const int m = pr.J - 1;
  FitResult r;
  Eval cur = evaluate(pr, theta, lambda);
  r.conv.objective_history.push_back(cur.objective());
  for (int it = 0; it < opt.max_iterations; ++it) {
    r.conv.iterations = it + 1;
    const Matrix info = information(pr, cur.prob);
    const Matrix H = penalized(pr, info, lambda);
    Vector g(m * pr.p);
    for (int j = 0; j < m; ++j)
      g.segment(j * pr.p, pr.p) =
          pr.X.transpose() * (pr.Y.col(j) - cur.prob.col(j)) - lambda * (pr.S * theta.col(j));
    const Vector step = H.ldlt().solve(g);
    if (!step.allFinite()) break;
    Matrix delta(pr.p, m);
    for (int j = 0; j < m; ++j) delta.col(j) = step.segment(j * pr.p, pr.p);

    double alpha = 1.0;
    bool bounded = false;
    while ((theta + alpha * delta).cwiseAbs().maxCoeff() > opt.coefficient_bound && alpha > 1e-6) {
      alpha *= 0.5;
      bounded = true;
    }
    Eval next = evaluate(pr, theta + alpha * delta, lambda);
    while (!(next.objective() <= cur.objective()) && alpha > 1e-10) {
      alpha *= 0.5;
      next = evaluate(pr, theta + alpha * delta, lambda);
    }
    if (!(next.objective() <= cur.objective())) {
      r.conv.converged = true;  // no descent direction left
      break;
    }
    const double change = std::abs(cur.objective() - next.objective()) / (std::abs(next.objective()) + 0.1);
    theta += alpha * delta;
    cur = std::move(next);
    r.conv.objective_history.push_back(cur.objective());
    if (bounded) {
      r.conv.separated = true;
      break;
    }
    if (change < opt.tolerance) {
      r.conv.converged = true;
      break;
    }
  }
  r.theta = theta;
  r.conv.deviance = cur.deviance;

  const Matrix info = information(pr, cur.prob);
  const Matrix H = penalized(pr, info, lambda);
  const double edf = H.ldlt().solve(info).trace();
  const double n = static_cast<double>(pr.n);
  const double denom = n - edf;
  r.gcv = denom > 1.0 ? n * cur.deviance / (denom * denom) : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

GamModel fit_gam(const FeatureMatrix& features, const Labels& labels, const GamOptions& options) {
  const int n = features.rows();
  const int J = features.class_count();
  if (J < 2) throw Error(ErrorCode::BadParameters, "at least two classes are required");
  if (static_cast<int>(labels.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "label count differs from feature rows");
  std::vector<int> counts(J, 0);
  for (int l : labels) {
    if (l < 1 || l > J) throw Error(ErrorCode::InvalidArgument, "label outside 1..J");
    ++counts[l - 1];
  }
  for (int j = 0; j < J; ++j)
    if (counts[j] == 0) throw Error(ErrorCode::MissingClass, "class " + std::to_string(j + 1) + " has no rows");
  if (options.lambda_grid.empty()) throw Error(ErrorCode::BadParameters, "empty lambda grid");

  GamModel model;
  model.class_count = J;
  model.feature_kind = features.kind();

  const int knots = options.interior_knots > 0 ? options.interior_knots : default_interior_knots(n);
  Problem pr;
  pr.J = J;
  pr.n = n;
  std::vector<Matrix> blocks;
  std::vector<Matrix> penalties;
  Index p = 1;
  for (int k = 0; k < J; ++k) {
    const Vector col = features.values().col(k);
    SplineBasis basis = build_basis(col, knots);
    Vector means = basis.evaluate(col).colwise().mean().transpose();
    Matrix Z = reduced_design(basis, means, col);
    Matrix P = basis.penalty().topLeftCorner(basis.n_basis - 1, basis.n_basis - 1);
    const double pn = P.norm();
    if (pn > 0.0) P *= (Z.transpose() * Z).norm() / pn;
    p += Z.cols();
    blocks.push_back(std::move(Z));
    penalties.push_back(std::move(P));
    model.bases.push_back(std::move(basis));
    model.basis_means.push_back(std::move(means));
  }
  pr.p = p;
  pr.X.resize(n, p);
  pr.S = Matrix::Zero(p, p);
  pr.X.col(0).setOnes();
  Index off = 1;
  for (int k = 0; k < J; ++k) {
    pr.X.middleCols(off, blocks[k].cols()) = blocks[k];
    pr.S.block(off, off, penalties[k].rows(), penalties[k].cols()) = penalties[k];
    off += blocks[k].cols();
  }
  pr.Y = Matrix::Zero(n, J - 1);
  for (int i = 0; i < n; ++i)
    if (labels[i] < J) pr.Y(i, labels[i] - 1) = 1.0;

  Matrix theta = Matrix::Zero(p, J - 1);
  for (int j = 0; j + 1 < J; ++j) theta(0, j) = std::log(static_cast<double>(counts[j]) / counts[J - 1]);

  std::vector<double> grid = options.lambda_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  FitResult best;
  double best_lambda = grid.front();
  bool have = false;
  for (double lambda : grid) {
    FitResult r = newton(pr, theta, lambda, options);
    theta = r.theta;
    if (!have || r.gcv < best.gcv) {
      best = std::move(r);
      best_lambda = lambda;
      have = true;
    }
  }

  model.intercepts.resize(J - 1);
  model.coefficients.assign(J - 1, {});
  model.lambda.assign(J - 1, std::vector<double>(J, best_lambda));
  for (int j = 0; j + 1 < J; ++j) {
    model.intercepts(j) = best.theta(0, j);
    Index o = 1;
    for (int k = 0; k < J; ++k) {
      const Index len = blocks[k].cols();
      model.coefficients[j].push_back(best.theta.col(j).segment(o, len));
      o += len;
    }
  }
  if (options.priors) {
    const auto& pri = *options.priors;
    if (static_cast<int>(pri.size()) != J) throw Error(ErrorCode::BadParameters, "prior vector length must equal J");
    for (double v : pri)
      if (!(v > 0.0)) throw Error(ErrorCode::BadParameters, "priors must be positive");
    for (int j = 0; j + 1 < J; ++j)
      model.intercepts(j) += std::log(pri[j] / pri[J - 1]) -
                             std::log(static_cast<double>(counts[j]) / counts[J - 1]);
  }
  model.convergence = std::move(best.conv);
  return model;
}

double GamModel::term(int j, int k, double x) const {
  const auto& basis = bases[k];
  Vector b = basis.evaluate(x) - basis_means[k];
  return b.head(basis.n_basis - 1).dot(coefficients[j][k]);
}

Matrix GamModel::scores(const FeatureMatrix& features) const {
  if (!(features.kind() == feature_kind))
    throw Error(ErrorCode::KindMismatch, "features are " + features.kind().to_string() + ", model expects " +
                                             feature_kind.to_string());
  if (features.class_count() != class_count)
    throw Error(ErrorCode::DimensionMismatch, "feature column count differs from model");
  const Index n = features.rows();
  Matrix s = Matrix::Zero(n, class_count);
  for (int k = 0; k < class_count; ++k) {
    Matrix Z = reduced_design(bases[k], basis_means[k], features.values().col(k));
    for (int j = 0; j + 1 < class_count; ++j) s.col(j) += Z * coefficients[j][k];
  }
  for (int j = 0; j + 1 < class_count; ++j) s.col(j).array() += intercepts(j);
  return s;
}

Matrix predict_proba(const GamModel& model, const FeatureMatrix& features) {
  return softmax_rows(model.scores(features));
}

Labels predict_class(const GamModel& model, const FeatureMatrix& features) {
  return argmax_labels(predict_proba(model, features));
}

}  // namespace mdlmd
