#pragma once

#include "mdlmd/classifier.hpp"
#include "mdlmd/csv.hpp"
#include "mdlmd/simgen.hpp"
#include "mdlmd/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mdlmd {

// Recognised classifier names: md, lmd, lda, qda, knn, bayes.
bool is_known_classifier(const std::string& name);
std::vector<std::string> parse_classifier_list(const std::string& comma_separated);

struct ClassifierResult {
  std::string name;
  std::vector<double> errors;  // per repetition; NaN marks a failed cell
  double mean_error = 0.0;
  double std_error = 0.0;
  int failures = 0;
  // Standard error set to 0 because fewer than two repetitions succeeded.
  bool se_flagged = false;
  std::string last_failure;
};

struct ExperimentResult {
  std::string dataset;
  int d = 0;
  int repetitions = 0;
  std::vector<ClassifierResult> classifiers;

  const ClassifierResult& at(const std::string& name) const;
};

struct BenchOptions {
  // Settings for md and lmd; scatter and seed are overridden per run.
  TrainConfig train;
  // Scatter for md/lmd. Unset: MCD for the Cauchy example, otherwise auto.
  std::optional<ScatterChoice> scatter;
};

// R repetitions of fresh train/test draws. Every classifier sees the same
// train and test sets within a repetition; a classifier that throws leaves a
// missing cell instead of aborting the run.
ExperimentResult run_experiment(const ExampleSpec& spec, const std::vector<std::string>& classifiers, int repetitions,
                                std::uint64_t seed, const BenchOptions& options = {});

struct SplitPlan {
  // Fixed: rows whose split value is "train" form the training set and
  // "test" the test set. Otherwise `repetitions` stratified random splits
  // with `train_fraction` of each class in training.
  bool fixed = false;
  int repetitions = 25;
  double train_fraction = 0.5;
};

ExperimentResult run_benchmark(const LabeledData& data, const SplitPlan& plan,
                               const std::vector<std::string>& classifiers, std::uint64_t seed,
                               const BenchOptions& options = {}, const std::string& name = "data");

// Standard error of a single test-set error rate.
double fixed_split_se(double error, int n_test);

// Mean and sd/sqrt(R) over the finite entries of `errors`.
void summarize_errors(ClassifierResult& result);

struct AccuracyRecord {
  std::string dataset;
  std::string classifier;
  double accuracy = 0.0;
};

struct EfficiencyRecord {
  std::string dataset;
  std::string classifier;
  double accuracy = 0.0;
  double efficiency = 0.0;
};

// e = accuracy / best accuracy within each dataset. Throws AllZeroAccuracy
// when a dataset has no positive accuracy and InvalidArgument for
// accuracies outside [0, 1].
std::vector<EfficiencyRecord> efficiency_scores(const std::vector<AccuracyRecord>& records);

// Accuracy records from a results CSV with columns dataset, classifier and
// either accuracy or mean_error_pct.
std::vector<AccuracyRecord> accuracy_records(const CsvTable& table);

// Long-form table: dataset,d,classifier,mean_error_pct,se_pct,reps,failures.
void write_results_csv(std::ostream& os, const std::vector<ExperimentResult>& results, bool header = true);
void write_results_markdown(std::ostream& os, const std::vector<ExperimentResult>& results);
void write_efficiency_csv(std::ostream& os, const std::vector<EfficiencyRecord>& records);

}  // namespace mdlmd
