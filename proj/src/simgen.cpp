#include "mdlmd/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace mdlmd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogPi = std::log(std::numbers::pi);
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Matrix cholesky_or_throw(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::BadParameters, "covariance is not positive definite");
  return llt.matrixL();
}

Matrix inverse_sqrt(const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorCode::BadParameters, "shell matrix must be positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

RowMatrix standard_normal(int n, int d, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  RowMatrix x(n, d);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  return x;
}

void check_size(int n, int d) {
  if (n < 0 || d < 1) throw Error(ErrorCode::BadParameters, "need n >= 0 and d >= 1");
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// One mixture component of a class distribution: a sampler and its log density.
struct Component {
  double weight = 1.0;
  std::function<RowMatrix(int, std::uint64_t)> sample;
  std::function<double(const Vector&)> log_density;
};
using ClassDist = std::vector<Component>;

Component normal_component(const Vector& mean, const Matrix& cov, double weight = 1.0) {
  const Matrix L = cholesky_or_throw(cov);
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  const int d = static_cast<int>(mean.size());
  Component c;
  c.weight = weight;
  c.sample = [mean, cov](int n, std::uint64_t seed) { return gen_mvnormal(n, mean, cov, seed); };
  c.log_density = [mean, L, logdet, d](const Vector& x) {
    const Vector z = L.triangularView<Eigen::Lower>().solve(x - mean);
    return -0.5 * (d * kLog2Pi + logdet + z.squaredNorm());
  };
  return c;
}

Component t_component(double df, const Vector& loc, const Matrix& scatter) {
  const Matrix L = cholesky_or_throw(scatter);
  const double logdet = 2.0 * L.diagonal().array().log().sum();
  const int d = static_cast<int>(loc.size());
  Component c;
  c.sample = [df, loc, scatter](int n, std::uint64_t seed) { return gen_mvt(n, df, loc, scatter, seed); };
  c.log_density = [df, loc, L, logdet, d](const Vector& x) {
    const double q = L.triangularView<Eigen::Lower>().solve(x - loc).squaredNorm();
    return std::lgamma((df + d) / 2.0) - std::lgamma(df / 2.0) - 0.5 * d * std::log(df * std::numbers::pi) -
           0.5 * logdet - 0.5 * (df + d) * std::log1p(q / df);
  };
  return c;
}

double log_shell_volume(int d, double a, double b) {
  const double ball = 0.5 * d * kLogPi - std::lgamma(0.5 * d + 1.0);
  return ball + d * std::log(b) + std::log1p(-std::pow(a / b, d));
}

// Uniform on {a <= |S^{1/2}(x - center)| <= b}.
Component shell_component(int d, double a, double b, const Vector& center, const std::optional<Matrix>& sigma,
                          double weight = 1.0) {
  Component c;
  c.weight = weight;
  Matrix root;
  double half_logdet = 0.0;
  if (sigma) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(*sigma);
    root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    half_logdet = 0.5 * es.eigenvalues().array().log().sum();
  }
  const double log_density = half_logdet - log_shell_volume(d, a, b);
  c.sample = [d, a, b, center, sigma](int n, std::uint64_t seed) {
    RowMatrix x = gen_uniform_shell(n, d, a, b, sigma, seed);
    x.rowwise() += center.transpose();
    return x;
  };
  c.log_density = [a, b, center, root, sigma, log_density](const Vector& x) {
    const double r = sigma ? (root * (x - center)).norm() : (x - center).norm();
    return (r >= a && r <= b) ? log_density : kNegInf;
  };
  return c;
}

Component laplace_component(const Vector& loc, double scale, double weight = 1.0) {
  const int d = static_cast<int>(loc.size());
  Component c;
  c.weight = weight;
  c.sample = [d, loc, scale](int n, std::uint64_t seed) { return gen_laplace_iid(n, d, loc, scale, seed); };
  c.log_density = [loc, scale, d](const Vector& x) {
    return -d * std::log(2.0 * scale) - (x - loc).cwiseAbs().sum() / scale;
  };
  return c;
}

Component exponential_component(int d, double mean, double weight = 1.0) {
  Component c;
  c.weight = weight;
  c.sample = [d, mean](int n, std::uint64_t seed) { return gen_exponential_iid(n, d, mean, seed); };
  c.log_density = [d, mean](const Vector& x) {
    if (x.minCoeff() < 0.0) return kNegInf;
    return -d * std::log(mean) - x.sum() / mean;
  };
  return c;
}

// Spherical law with radius density f_R; density f_R(r) / (surface(r)).
Component spherical_component(int d, std::function<double(Rng&)> radius, std::function<double(double)> log_fr) {
  const double log_surface = std::log(2.0) + 0.5 * d * kLogPi - std::lgamma(0.5 * d);
  Component c;
  c.sample = [d, radius](int n, std::uint64_t seed) { return gen_spherical_radius(n, d, radius, seed); };
  c.log_density = [d, log_fr, log_surface](const Vector& x) {
    const double r = x.norm();
    if (r <= 0.0) return kNegInf;
    return log_fr(r) - log_surface - (d - 1) * std::log(r);
  };
  return c;
}

Component rotated(const Component& base) {
  Component c;
  c.weight = base.weight;
  auto sample = base.sample;
  auto dens = base.log_density;
  c.sample = [sample](int n, std::uint64_t seed) { return rotate_pairs(sample(n, seed)); };
  c.log_density = [dens](const Vector& x) {
    // Inverse rotation = rotation by -45 degrees.
    Vector y = x;
    const double s = std::sqrt(0.5);
    for (Index i = 0; i + 1 < x.size(); i += 2) {
      y(i) = s * (x(i) + x(i + 1));
      y(i + 1) = s * (-x(i) + x(i + 1));
    }
    return dens(y);
  };
  return c;
}

ClassDist rotated(const ClassDist& cls) {
  ClassDist out;
  for (const auto& c : cls) out.push_back(rotated(c));
  return out;
}

// Coordinates iid from the equal mixture of N(1, 0.01) and N(-1, 0.01).
Component bimodal_iid_component(int d) {
  Component c;
  c.sample = [d](int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> z(0.0, 0.1);
    std::bernoulli_distribution coin(0.5);
    RowMatrix x(n, d);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = (coin(rng) ? 1.0 : -1.0) + z(rng);
    return x;
  };
  c.log_density = [](const Vector& x) {
    double s = 0.0;
    const double norm = -0.5 * std::log(2.0 * std::numbers::pi * 0.01);
    for (Index i = 0; i < x.size(); ++i) {
      const double a = norm - (x(i) - 1.0) * (x(i) - 1.0) / 0.02;
      const double b = norm - (x(i) + 1.0) * (x(i) + 1.0) / 0.02;
      s += log_sum_exp({a, b}) + std::log(0.5);
    }
    return s;
  };
  return c;
}

bool in_product_band(const Vector& x) {
  if (x.cwiseAbs().maxCoeff() > 2.0) return false;
  double lp = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) == 0.0) return false;
    lp += std::log(std::abs(x(i)));
  }
  return lp > std::log(0.5) && lp < std::log(2.0);
}

// Uniform on the cube [-2,2]^d restricted to one side of the product rule.
Component cube_component(int d, bool inside) {
  Component c;
  c.sample = [d, inside](int n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    RowMatrix x(n, d);
    Vector v(d);
    for (int i = 0; i < n;) {
      for (int k = 0; k < d; ++k) v(k) = u(rng);
      if (in_product_band(v) == inside) x.row(i++) = v.transpose();
    }
    return x;
  };
  // Supports are disjoint, so an unnormalized indicator suffices.
  c.log_density = [inside](const Vector& x) {
    if (x.cwiseAbs().maxCoeff() > 2.0) return kNegInf;
    return in_product_band(x) == inside ? 0.0 : kNegInf;
  };
  return c;
}

ClassDist weighted(std::vector<Component> comps, const std::vector<double>& w) {
  for (std::size_t i = 0; i < comps.size(); ++i) comps[i].weight = w[i];
  return comps;
}

Vector ones(int d) { return Vector::Ones(d); }
Matrix eye(int d) { return Matrix::Identity(d, d); }

ClassDist shell_mix(int d, std::vector<std::pair<double, double>> radii, const std::optional<Matrix>& sigma) {
  ClassDist out;
  for (auto [a, b] : radii) out.push_back(shell_component(d, a, b, Vector::Zero(d), sigma, 1.0 / radii.size()));
  return out;
}

std::vector<ClassDist> example_classes(const std::string& id, int d) {
  if (!is_known_example(id)) throw Error(ErrorCode::UnknownExample, "unknown example '" + id + "'");
  if (d < 1) throw Error(ErrorCode::BadParameters, "d must be >= 1");
  const Vector zero = Vector::Zero(d);
  const Vector a = alternating(d);
  const std::string& e = id;

  if (e == "1" || e == "22")
    return {shell_mix(d, {{0, 1}, {2, 3}}, std::nullopt), shell_mix(d, {{1, 2}, {3, 4}}, std::nullopt)};
  if (e == "2" || e == "A")
    return {{normal_component(-0.3 * ones(d), eye(d))}, {normal_component(0.3 * ones(d), eye(d))}};
  if (e == "3") return {{normal_component(zero, eye(d))}, {normal_component(zero, 5.0 * eye(d))}};
  if (e == "4") {
    const Matrix s = equicorrelation(d, 0.5);
    return {shell_mix(d, {{1, 2}}, s), shell_mix(d, {{0, 1}, {2, 3}}, s)};
  }
  if (e == "5" || e == "23") return {{normal_component(zero, 3.0 * eye(d))}, {t_component(3.0, zero, eye(d))}};
  if (e == "6") {
    const double s2 = example6_sigma2(), c = example6_c();
    const double sd = std::sqrt(s2);
    auto unif = [](Rng& r) { return std::uniform_real_distribution<double>(0.0, 10.0)(r); };
    auto norm = [sd](Rng& r) { return std::normal_distribution<double>(5.5, sd)(r); };
    auto beta = [c](Rng& r) {
      std::gamma_distribution<double> g(0.5, 1.0);
      const double x = g(r), y = g(r);
      return c * x / (x + y);
    };
    auto phi = [](double z) { return -0.5 * z * z - 0.5 * kLog2Pi; };
    return {
        {spherical_component(d, unif, [](double r) { return r <= 10.0 ? std::log(0.1) : kNegInf; })},
        // |R| has the folded normal density.
        {spherical_component(d, norm,
                             [sd, phi](double r) {
                               return log_sum_exp({phi((r - 5.5) / sd), phi((r + 5.5) / sd)}) - std::log(sd);
                             })},
        {spherical_component(d, beta, [c](double r) {
          if (r >= c) return kNegInf;
          const double y = r / c;
          return -kLogPi - 0.5 * std::log(y * (1.0 - y)) - std::log(c);
        })}};
  }
  if (e == "7")
    return {{normal_component(zero, equicorrelation(d, 0.1))},
            {normal_component(zero, equicorrelation(d, 0.5))},
            {normal_component(zero, equicorrelation(d, 0.9))}};
  if (e == "8") {
    const Matrix s = equicorrelation(d, 0.1);
    return {{normal_component(zero, s)}, {t_component(1.0, zero, s)}};
  }
  if (e == "9") {
    const double b = std::sqrt(0.375);
    return {{laplace_component(ones(d), b)}, {laplace_component(-ones(d), b)}, {laplace_component(a, b)},
            {laplace_component(-a, b)}};
  }
  if (e == "10") return {{exponential_component(d, 1.0)}, {exponential_component(d, 2.0)}};
  if (e == "11")
    return {{normal_component(ones(d), eye(d), 0.5), normal_component(-ones(d), eye(d), 0.5)},
            {normal_component(a, 4.0 * eye(d), 0.5), normal_component(-a, 4.0 * eye(d), 0.5)}};
  if (e == "12") {
    ClassDist c1 = {bimodal_iid_component(d)};
    return {c1, rotated(c1)};
  }
  if (e == "13" || e == "24") {
    Vector c = zero;
    c(0) = 5.0;
    auto cls = [d](const Vector& z) {
      return weighted({shell_component(d, 0, 1, -z, std::nullopt), shell_component(d, 1, 2, z, std::nullopt),
                       shell_component(d, 2, 3, -z, std::nullopt)},
                      {0.25, 0.5, 0.25});
    };
    return {cls(c), cls(-c)};
  }
  if (e == "14") return {{cube_component(d, true)}, {cube_component(d, false)}};
  if (e == "15")
    return {{exponential_component(d, 5.0)},
            {exponential_component(d, 1.0, 0.5), exponential_component(d, 10.0, 0.5)}};
  if (e == "16")
    return {{laplace_component(zero, 5.0)}, {laplace_component(zero, 1.0, 0.5), laplace_component(zero, 10.0, 0.5)}};
  if (e == "17") {
    const Matrix s = ar_matrix(d, 0.75);
    return {{normal_component(-0.2 * ones(d), s)}, {normal_component(0.2 * ones(d), s)}};
  }
  if (e == "18") {
    const Matrix s = ar_matrix(d, 0.25);
    return {{normal_component(zero, s)}, {normal_component(zero, 1.5 * s)}};
  }
  if (e == "19")
    return {{normal_component(0.05 * ones(d), 0.2 * eye(d), 0.5), normal_component(-0.05 * ones(d), 0.2 * eye(d), 0.5)},
            {normal_component(0.05 * a, 0.25 * eye(d), 0.5), normal_component(-0.05 * a, 0.25 * eye(d), 0.5)}};
  if (e == "20")
    return {{normal_component(0.5 * ones(d), eye(d), 0.5), normal_component(-0.5 * ones(d), 4.0 * eye(d), 0.5)},
            {normal_component(0.5 * a, eye(d), 0.5), normal_component(-0.5 * a, 4.0 * eye(d), 0.5)}};
  if (e == "21") {
    const Matrix s = 0.01 * eye(d);
    ClassDist c1 = weighted({normal_component(a, s), normal_component(-a, s), normal_component(ones(d), s),
                             normal_component(-ones(d), s)},
                            {0.25, 0.25, 0.25, 0.25});
    return {c1, rotated(c1)};
  }
  if (e == "B") {
    if (d != 2) throw Error(ErrorCode::BadParameters, "example B is bivariate");
    const Matrix s = eye(2) + 4.0 * Matrix::Ones(2, 2);
    Vector p(2), q(2);
    p << 1, -1;
    q << -3, 3;
    return {{normal_component(p, s, 0.5), normal_component(q, s, 0.5)},
            {normal_component(-p, s, 0.5), normal_component(-q, s, 0.5)}};
  }
  throw Error(ErrorCode::UnknownExample, "unknown example '" + id + "'");
}

RowMatrix sample_class(const ClassDist& cls, int n, int d, std::uint64_t seed) {
  RowMatrix out(n, d);
  if (n == 0) return out;
  if (cls.size() == 1) return cls.front().sample(n, derive_seed(seed, {0}));
  Rng rng(derive_seed(seed, {0}));
  std::vector<double> w;
  for (const auto& c : cls) w.push_back(c.weight);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::vector<int> comp(n);
  std::vector<int> counts(cls.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[comp[i] = pick(rng)];
  std::vector<RowMatrix> blocks;
  for (std::size_t c = 0; c < cls.size(); ++c)
    blocks.push_back(cls[c].sample(counts[c], derive_seed(seed, {1, static_cast<std::uint64_t>(c)})));
  std::vector<int> next(cls.size(), 0);
  for (int i = 0; i < n; ++i) out.row(i) = blocks[comp[i]].row(next[comp[i]]++);
  return out;
}

const std::map<std::string, int>& class_counts() {
  static const std::map<std::string, int> m = {
      {"1", 2},  {"2", 2},  {"3", 2},  {"4", 2},  {"5", 2},  {"6", 3},  {"7", 3},  {"8", 2},  {"9", 4},
      {"10", 2}, {"11", 2}, {"12", 2}, {"13", 2}, {"14", 2}, {"15", 2}, {"16", 2}, {"17", 2}, {"18", 2},
      {"19", 2}, {"20", 2}, {"21", 2}, {"22", 2}, {"23", 2}, {"24", 2}, {"A", 2},  {"B", 2}};
  return m;
}

}  // namespace

bool is_known_example(const std::string& id) { return class_counts().count(id) > 0; }

int example_class_count(const std::string& id) {
  auto it = class_counts().find(id);
  if (it == class_counts().end()) throw Error(ErrorCode::UnknownExample, "unknown example '" + id + "'");
  return it->second;
}

std::vector<std::string> known_examples() {
  std::vector<std::string> out;
  for (int i = 1; i <= 24; ++i) out.push_back(std::to_string(i));
  out.push_back("A");
  out.push_back("B");
  return out;
}

double example6_sigma2() { return 100.0 / 3.0 - 30.25; }
double example6_c() { return std::sqrt(800.0 / 9.0); }

Matrix ar_matrix(int d, double rho) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
  return m;
}

Matrix equicorrelation(int d, double rho) {
  Matrix m = Matrix::Constant(d, d, rho);
  m.diagonal().setOnes();
  return m;
}

Vector alternating(int d) {
  Vector a(d);
  for (int i = 0; i < d; ++i) a(i) = (i % 2 == 0) ? -1.0 : 1.0;
  return a;
}

RowMatrix rotate_pairs(const RowMatrix& rows) {
  RowMatrix out = rows;
  const double s = std::sqrt(0.5);
  for (Index r = 0; r < rows.rows(); ++r)
    for (Index i = 0; i + 1 < rows.cols(); i += 2) {
      out(r, i) = s * (rows(r, i) - rows(r, i + 1));
      out(r, i + 1) = s * (rows(r, i) + rows(r, i + 1));
    }
  return out;
}

RowMatrix gen_uniform_shell(int n, int d, double a, double b, const std::optional<Matrix>& sigma, std::uint64_t seed) {
  check_size(n, d);
  if (!(a >= 0.0 && b >= a && b > 0.0)) throw Error(ErrorCode::BadInterval, "need 0 <= a <= b and b > 0");
  Rng rng(seed);
  RowMatrix x = standard_normal(n, d, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // r^d uniform on [a^d, b^d], written relative to b to avoid overflow.
  const double rho = std::pow(a / b, d);
  for (Index i = 0; i < x.rows(); ++i) {
    const double r = a == b ? a : b * std::pow(rho + u(rng) * (1.0 - rho), 1.0 / d);
    x.row(i) *= r / x.row(i).norm();
  }
  if (sigma) {
    if (sigma->rows() != d || sigma->cols() != d) throw Error(ErrorCode::BadParameters, "shell matrix dimension");
    const Matrix s = inverse_sqrt(*sigma);
    x = (x * s.transpose()).eval();
  }
  return x;
}

RowMatrix gen_mvnormal(int n, const Vector& mean, const Matrix& cov, std::uint64_t seed) {
  const int d = static_cast<int>(mean.size());
  check_size(n, d);
  if (cov.rows() != d || cov.cols() != d) throw Error(ErrorCode::BadParameters, "covariance dimension");
  const Matrix L = cholesky_or_throw(cov);
  Rng rng(seed);
  RowMatrix x = standard_normal(n, d, rng) * L.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

RowMatrix gen_mvt(int n, double df, const Vector& loc, const Matrix& scatter, std::uint64_t seed) {
  const int d = static_cast<int>(loc.size());
  check_size(n, d);
  if (!(df > 0.0)) throw Error(ErrorCode::BadParameters, "degrees of freedom must be positive");
  if (scatter.rows() != d || scatter.cols() != d) throw Error(ErrorCode::BadParameters, "scatter dimension");
  const Matrix L = cholesky_or_throw(scatter);
  Rng rng(seed);
  RowMatrix x = standard_normal(n, d, rng) * L.transpose();
  std::chi_squared_distribution<double> chi(df);
  for (Index i = 0; i < n; ++i) x.row(i) /= std::sqrt(chi(rng) / df);
  x.rowwise() += loc.transpose();
  return x;
}

RowMatrix gen_cauchy(int n, const Vector& loc, const Matrix& scatter, std::uint64_t seed) {
  return gen_mvt(n, 1.0, loc, scatter, seed);
}

RowMatrix gen_laplace_iid(int n, int d, const Vector& loc, double scale, std::uint64_t seed) {
  check_size(n, d);
  if (!(scale > 0.0) || loc.size() != d) throw Error(ErrorCode::BadParameters, "bad Laplace parameters");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  RowMatrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < d; ++k) {
      const double v = u(rng);
      x(i, k) = loc(k) - scale * (v < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(v));
    }
  return x;
}

RowMatrix gen_exponential_iid(int n, int d, double mean, std::uint64_t seed) {
  check_size(n, d);
  if (!(mean > 0.0)) throw Error(ErrorCode::BadParameters, "exponential mean must be positive");
  Rng rng(seed);
  std::exponential_distribution<double> e(1.0 / mean);
  RowMatrix x(n, d);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = e(rng);
  return x;
}

RowMatrix gen_spherical_radius(int n, int d, const std::function<double(Rng&)>& radius, std::uint64_t seed) {
  check_size(n, d);
  Rng rng(seed);
  RowMatrix x = standard_normal(n, d, rng);
  for (Index i = 0; i < n; ++i) x.row(i) *= radius(rng) / x.row(i).norm();
  return x;
}

Dataset gen_example_sample(const std::string& id, int d, int n_per_class, std::uint64_t seed, std::uint64_t tag) {
  if (n_per_class < 1) throw Error(ErrorCode::BadParameters, "need at least one row per class");
  const auto classes = example_classes(id, d);
  Dataset out;
  out.rows.resize(static_cast<Index>(classes.size()) * n_per_class, d);
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const RowMatrix block = sample_class(classes[j], n_per_class, d, derive_seed(seed, {tag, j + 1}));
    out.rows.middleRows(static_cast<Index>(j) * n_per_class, n_per_class) = block;
    out.labels.insert(out.labels.end(), n_per_class, static_cast<int>(j) + 1);
  }
  out.meta.example_id = id;
  out.meta.d = d;
  out.meta.seed = seed;
  return out;
}

std::pair<Dataset, Dataset> gen_example(const ExampleSpec& spec, std::uint64_t seed) {
  return {gen_example_sample(spec.id, spec.d, spec.n_train, seed, stream::kTrain),
          gen_example_sample(spec.id, spec.d, spec.n_test, seed, stream::kTest)};
}

Matrix example_log_densities(const std::string& id, int d, const RowMatrix& X) {
  if (X.cols() != d) throw Error(ErrorCode::DimensionMismatch, "data dimension differs from d");
  const auto classes = example_classes(id, d);
  Matrix out(X.rows(), classes.size());
  for (Index i = 0; i < X.rows(); ++i) {
    const Vector x = X.row(i).transpose();
    for (std::size_t j = 0; j < classes.size(); ++j) {
      std::vector<double> terms;
      for (const auto& c : classes[j]) terms.push_back(std::log(c.weight) + c.log_density(x));
      out(i, j) = log_sum_exp(terms);
    }
  }
  return out;
}

BayesRule bayes_oracle(const std::string& id, int d) {
  example_classes(id, d);  // validates
  return [id, d](const RowMatrix& X) {
    const Matrix ld = example_log_densities(id, d, X);
    Labels out(X.rows());
    for (Index i = 0; i < X.rows(); ++i) {
      Index best = 0;
      for (Index j = 1; j < ld.cols(); ++j)
        if (ld(i, j) > ld(i, best)) best = j;
      out[i] = static_cast<int>(best) + 1;
    }
    return out;
  };
}

}  // namespace mdlmd
