#pragma once

#include "mdlmd/estimators.hpp"
#include "mdlmd/features.hpp"
#include "mdlmd/gam.hpp"
#include "mdlmd/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mdlmd {

enum class ScatterChoice { Moment, Diagonal, Identity, MCD, AutoHDLSS };
enum class FeatureChoice { MD, LMD };

const char* to_string(ScatterChoice choice);
ScatterChoice scatter_choice_from_string(const std::string& name);
const char* to_string(FeatureChoice choice);
FeatureChoice feature_choice_from_string(const std::string& name);

struct TrainConfig {
  ScatterChoice scatter = ScatterChoice::Moment;
  FeatureChoice feature = FeatureChoice::MD;

  // h grid: h_1 = shrink * (percentile of within-class pairwise distances),
  // h_{i+1} = k0 * h_i, stopping once the LMD/MD correlation exceeds r_stop.
  double percentile = 5.0;
  double shrink = 1.0 / 3.0;
  double k0 = 1.5;
  double r_stop = 0.95;
  int max_grid = 25;

  int bootstrap_b = 100;
  // Resamples used to choose between Identity and Diagonal scatter for MD
  // features in high dimension.
  int hdlss_b = 20;
  std::uint64_t seed = 1;

  double mcd_coverage = 0.75;
  GamOptions gam;

  // Throws BadParameters.
  void validate() const;
};

// Sets one TrainConfig field by name (percentile, shrink, k0, r_stop,
// max_grid, bootstrap_b, hdlss_b, seed, mcd_coverage, scatter, feature,
// gam.max_iterations, gam.tolerance, gam.coefficient_bound,
// gam.interior_knots, gam.lambda_grid). Throws BadParameters for unknown
// keys or malformed values.
void apply_train_setting(TrainConfig& config, const std::string& key, const std::string& value);
// "key = value" lines with '#' comments, applied in order.
void read_train_config(std::istream& is, TrainConfig& config);

struct Diagnostics {
  std::vector<double> h_grid;
  std::vector<double> bootstrap_errors;  // mean out-of-bag error per grid point
  int skipped_resamples = 0;
  ScatterMode chosen_mode = ScatterMode::Moment;
  bool hdlss = false;
  // Out-of-bag errors of the Identity and Diagonal candidates (hdlss only).
  double identity_error = -1.0;
  double diagonal_error = -1.0;
};

struct FittedClassifier {
  std::vector<ScatterModel> models;
  std::vector<RowMatrix> per_class_rows;  // kept for LMD prediction
  FeatureKind feature_kind;
  GamModel gam;
  TrainConfig config;
  Diagnostics diagnostics;
  // Optional original label names (label j is class_names[j-1]).
  std::vector<std::string> class_names;

  int class_count() const { return static_cast<int>(models.size()); }
  int dim() const { return models.empty() ? 0 : models.front().dim(); }
};

struct Prediction {
  Labels classes;
  Matrix posteriors;
};

// Dispatches on config.feature; AutoHDLSS goes through fit_hdlss when the
// dimension exceeds every class size and uses Moment scatter otherwise.
FittedClassifier fit_classifier(const Dataset& train, const TrainConfig& config);
FittedClassifier fit_md(const Dataset& train, const TrainConfig& config);
FittedClassifier fit_lmd(const Dataset& train, const TrainConfig& config);
FittedClassifier fit_hdlss(const Dataset& train, const TrainConfig& config);

// Kernel used for LMD features: the Gaussian profile rescaled to Psi(0) = 1.
// The rescaling multiplies every feature by the same constant, which the GAM
// absorbs, and avoids underflow of (2 pi)^{-d/2} in high dimension.
KernelProfile classifier_kernel(int d);

std::vector<double> build_h_grid(const Dataset& train, const std::vector<ScatterModel>& models,
                                 const KernelProfile& kernel, const TrainConfig& config);

struct HSelection {
  double h_best = 1.0;
  std::vector<double> mean_errors;
  int skipped = 0;
};

// Stratified bootstrap with out-of-bag error for each h of the grid, using
// `b` resamples and the given scatter mode. Ties go to the smaller h.
HSelection bootstrap_select_h(const Dataset& train, const std::vector<double>& grid, const TrainConfig& config,
                              ScatterMode mode, int b);

// Out-of-bag bootstrap error of an MD-type classifier (no h).
double bootstrap_md_error(const Dataset& train, const TrainConfig& config, ScatterMode mode, int b,
                          int* skipped = nullptr);

FeatureMatrix classifier_features(const FittedClassifier& clf, const RowMatrix& X);
Prediction predict(const FittedClassifier& clf, const RowMatrix& X);

// Misclassification rate of predicted against true labels.
double error_rate(const Labels& predicted, const Labels& truth);

// Monte Carlo check of the high-dimensional limit points of scaled squared
// distance features (identity scatter). Two or more Gaussian classes: class j
// is N(shift_j * 1_d, sigma2_j I_d), so nu^2_{jk} = (shift_j - shift_k)^2.
struct HdlssCheckInput {
  std::vector<double> sigma2;
  std::vector<double> shift;
  int n_per_class = 100;
  int n_test_per_class = 100;
  int d = 2000;
  std::uint64_t seed = 1;
};

struct HdlssCheckReport {
  // Rows = class of the observation, columns = feature class.
  Matrix md_train_empirical, md_train_limit;   // Theta_j
  Matrix md_test_empirical, md_test_limit;     // Theta*_i
  Matrix lmd_train_empirical, lmd_train_limit; // Theta~_j
  Matrix lmd_test_empirical, lmd_test_limit;   // Theta°_i
  double h = 0.0;
  double c0 = 0.0;
  double max_rel_dev_md = 0.0;
  double max_rel_dev_lmd = 0.0;
};

HdlssCheckReport hdlss_limit_check(const HdlssCheckInput& input);

// Closed-form limit points.
Matrix theta_train(const std::vector<double>& sigma2, const Matrix& nu2, const std::vector<int>& n);
Matrix theta_test(const std::vector<double>& sigma2, const Matrix& nu2, const std::vector<int>& n);
Matrix theta_lmd_test(const std::vector<double>& sigma2, const Matrix& nu2, double c0, const KernelProfile& kernel);
Matrix theta_lmd_train(const std::vector<double>& sigma2, const Matrix& nu2, const std::vector<int>& n, double c0,
                       const KernelProfile& kernel);

}  // namespace mdlmd
