#pragma once

#include "mdlmd/rng.hpp"
#include "mdlmd/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace mdlmd {

// Examples are numbered 1..24 as they appear in the paper's result tables;
// "A" and "B" are the two bivariate illustrations of the local distance.
struct ExampleSpec {
  std::string id = "1";
  int d = 2;
  int n_train = 100;  // per class
  int n_test = 2000;  // per class
};

bool is_known_example(const std::string& id);
int example_class_count(const std::string& id);
std::vector<std::string> known_examples();

// Train and test sets drawn from independent derived streams of `seed`.
std::pair<Dataset, Dataset> gen_example(const ExampleSpec& spec, std::uint64_t seed);
// n_per_class rows per class from the stream (seed, tag).
Dataset gen_example_sample(const std::string& id, int d, int n_per_class, std::uint64_t seed, std::uint64_t tag);

// Uniform on {a <= |x| <= b}; with sigma, on {a <= |sigma^{1/2} x| <= b}.
RowMatrix gen_uniform_shell(int n, int d, double a, double b, const std::optional<Matrix>& sigma, std::uint64_t seed);
RowMatrix gen_mvnormal(int n, const Vector& mean, const Matrix& cov, std::uint64_t seed);
RowMatrix gen_mvt(int n, double df, const Vector& loc, const Matrix& scatter, std::uint64_t seed);
RowMatrix gen_cauchy(int n, const Vector& loc, const Matrix& scatter, std::uint64_t seed);
RowMatrix gen_laplace_iid(int n, int d, const Vector& loc, double scale, std::uint64_t seed);
RowMatrix gen_exponential_iid(int n, int d, double mean, std::uint64_t seed);
RowMatrix gen_spherical_radius(int n, int d, const std::function<double(Rng&)>& radius, std::uint64_t seed);

// Example 6 radius calibration: equal E(R^2) = 100/3 for all three classes.
double example6_sigma2();
double example6_c();

// Autocorrelation matrix ((rho^{|i-j|})).
Matrix ar_matrix(int d, double rho);
// Equicorrelation matrix with unit diagonal.
Matrix equicorrelation(int d, double rho);
// a_d with components (-1)^i, i = 1..d.
Vector alternating(int d);
// x -> R x with R rotating coordinate pairs (1,2), (3,4), ... by +45 degrees.
RowMatrix rotate_pairs(const RowMatrix& rows);

// Bayes rule argmax_j pi_j f_j(x) with equal priors.
using BayesRule = std::function<Labels(const RowMatrix&)>;
BayesRule bayes_oracle(const std::string& id, int d);
// Per-class log densities (n x J) for the examples with closed forms.
Matrix example_log_densities(const std::string& id, int d, const RowMatrix& X);

}  // namespace mdlmd
