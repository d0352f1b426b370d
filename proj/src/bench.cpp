#include "mdlmd/bench.hpp"

#include "mdlmd/baselines.hpp"
#include "mdlmd/rng.hpp"
#include "mdlmd/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace mdlmd {

namespace {

const std::vector<std::string> kClassifiers = {"md", "lmd", "lda", "qda", "knn", "bayes"};

bool high_dimensional(const Dataset& train) {
  const auto sizes = train.class_sizes();
  return train.d() > *std::max_element(sizes.begin(), sizes.end());
}

struct RunContext {
  const Dataset& train;
  const Dataset& test;
  std::uint64_t seed;
  const BenchOptions& options;
  ScatterChoice scatter;
  const BayesRule* bayes;
};

Labels run_one(const std::string& name, const RunContext& ctx) {
  if (name == "md" || name == "lmd") {
    TrainConfig cfg = ctx.options.train;
    cfg.feature = name == "md" ? FeatureChoice::MD : FeatureChoice::LMD;
    cfg.scatter = ctx.scatter;
    cfg.seed = derive_seed(ctx.seed, {stream::kClassifier, name == "md" ? 1u : 2u});
    return predict(fit_classifier(ctx.train, cfg), ctx.test.rows).classes;
  }
  // Plug-in Gaussian rules fall back to diagonal scatter when the class
  // covariances are singular.
  const ScatterMode mode = high_dimensional(ctx.train) ? ScatterMode::Diagonal : ScatterMode::Moment;
  if (name == "lda") return lda_predict(lda_fit(ctx.train, mode), ctx.test.rows);
  if (name == "qda") return qda_predict(qda_fit(ctx.train, mode), ctx.test.rows);
  if (name == "knn") return knn_predict(knn_fit(ctx.train, derive_seed(ctx.seed, {stream::kClassifier, 3})), ctx.test.rows);
  if (name == "bayes") {
    if (!ctx.bayes) throw Error(ErrorCode::NoClosedForm, "no Bayes rule for this data");
    return (*ctx.bayes)(ctx.test.rows);
  }
  throw Error(ErrorCode::BadParameters, "unknown classifier '" + name + "'");
}

void check_classifiers(const std::vector<std::string>& classifiers) {
  if (classifiers.empty()) throw Error(ErrorCode::BadParameters, "no classifiers requested");
  for (const auto& c : classifiers)
    if (!is_known_classifier(c)) throw Error(ErrorCode::BadParameters, "unknown classifier '" + c + "'");
}

// Fills cell (rep, classifier) for each classifier; failures become NaN.
void run_cells(const std::vector<std::string>& classifiers, const RunContext& ctx, int rep,
               std::vector<ClassifierResult>& out) {
  for (std::size_t c = 0; c < classifiers.size(); ++c) {
    try {
      out[c].errors[rep] = error_rate(run_one(classifiers[c], ctx), ctx.test.labels);
    } catch (const std::exception& e) {
      out[c].errors[rep] = std::numeric_limits<double>::quiet_NaN();
#pragma omp critical(bench_failure)
      out[c].last_failure = e.what();
    }
  }
}

std::vector<ClassifierResult> empty_results(const std::vector<std::string>& classifiers, int reps) {
  std::vector<ClassifierResult> out(classifiers.size());
  for (std::size_t c = 0; c < classifiers.size(); ++c) {
    out[c].name = classifiers[c];
    out[c].errors.assign(reps, std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

Dataset take_rows(const Dataset& data, const std::vector<int>& idx) {
  Dataset out;
  out.rows.resize(static_cast<Index>(idx.size()), data.d());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    out.rows.row(t) = data.rows.row(idx[t]);
    out.labels.push_back(data.labels[idx[t]]);
  }
  out.meta = data.meta;
  return out;
}

std::string pct(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * v;
  return os.str();
}

}  // namespace

bool is_known_classifier(const std::string& name) {
  return std::find(kClassifiers.begin(), kClassifiers.end(), name) != kClassifiers.end();
}

std::vector<std::string> parse_classifier_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (!is_known_classifier(item)) throw Error(ErrorCode::BadParameters, "unknown classifier '" + item + "'");
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  if (out.empty()) throw Error(ErrorCode::BadParameters, "empty classifier list");
  return out;
}

const ClassifierResult& ExperimentResult::at(const std::string& name) const {
  for (const auto& c : classifiers)
    if (c.name == name) return c;
  throw Error(ErrorCode::InvalidArgument, "classifier '" + name + "' not in result");
}

void summarize_errors(ClassifierResult& r) {
  std::vector<double> ok;
  for (double e : r.errors)
    if (std::isfinite(e)) ok.push_back(e);
  r.failures = static_cast<int>(r.errors.size() - ok.size());
  if (ok.empty()) {
    r.mean_error = r.std_error = std::numeric_limits<double>::quiet_NaN();
    r.se_flagged = true;
    return;
  }
  double sum = 0.0;
  for (double e : ok) sum += e;
  r.mean_error = sum / ok.size();
  if (ok.size() < 2) {
    r.std_error = 0.0;
    r.se_flagged = true;
    return;
  }
  double ss = 0.0;
  for (double e : ok) ss += (e - r.mean_error) * (e - r.mean_error);
  r.std_error = std::sqrt(ss / (ok.size() - 1)) / std::sqrt(static_cast<double>(ok.size()));
  r.se_flagged = false;
}

double fixed_split_se(double error, int n_test) {
  if (n_test < 1) throw Error(ErrorCode::BadParameters, "test set is empty");
  if (!(error >= 0.0 && error <= 1.0)) throw Error(ErrorCode::BadParameters, "error rate outside [0, 1]");
  return std::sqrt(error * (1.0 - error) / n_test);
}

ExperimentResult run_experiment(const ExampleSpec& spec, const std::vector<std::string>& classifiers, int repetitions,
                                std::uint64_t seed, const BenchOptions& options) {
  if (repetitions < 1) throw Error(ErrorCode::BadParameters, "need at least one repetition");
  if (!is_known_example(spec.id)) throw Error(ErrorCode::UnknownExample, "unknown example '" + spec.id + "'");
  check_classifiers(classifiers);
  options.train.validate();

  std::optional<BayesRule> bayes;
  if (std::find(classifiers.begin(), classifiers.end(), "bayes") != classifiers.end()) {
    try {
      bayes = bayes_oracle(spec.id, spec.d);
    } catch (const Error&) {
      // Recorded per cell by run_one.
    }
  }
  const ScatterChoice scatter = options.scatter.value_or(spec.id == "8" ? ScatterChoice::MCD : ScatterChoice::AutoHDLSS);

  ExperimentResult result;
  result.dataset = spec.id;
  result.d = spec.d;
  result.repetitions = repetitions;
  result.classifiers = empty_results(classifiers, repetitions);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, {stream::kRepetition, static_cast<std::uint64_t>(r)});
    std::pair<Dataset, Dataset> data;
    try {
      data = gen_example(spec, rep_seed);
    } catch (const std::exception& e) {
      for (auto& c : result.classifiers) {
#pragma omp critical(bench_failure)
        c.last_failure = e.what();
      }
      continue;
    }
    const RunContext ctx{data.first, data.second, rep_seed, options, scatter, bayes ? &*bayes : nullptr};
    run_cells(classifiers, ctx, r, result.classifiers);
  }
  for (auto& c : result.classifiers) summarize_errors(c);
  return result;
}

ExperimentResult run_benchmark(const LabeledData& data, const SplitPlan& plan,
                               const std::vector<std::string>& classifiers, std::uint64_t seed,
                               const BenchOptions& options, const std::string& name) {
  check_classifiers(classifiers);
  options.train.validate();
  const int J = validate_labels(data.data.labels, data.data.n());
  if (J < 2) throw Error(ErrorCode::LabelMissing, "the label column has a single class");
  const ScatterChoice scatter = options.scatter.value_or(ScatterChoice::AutoHDLSS);

  ExperimentResult result;
  result.dataset = name;
  result.d = data.data.d();

  if (plan.fixed) {
    if (data.split.size() != static_cast<std::size_t>(data.data.n()))
      throw Error(ErrorCode::BadParameters, "a fixed split needs a split column");
    std::vector<int> tr, te;
    for (int i = 0; i < data.data.n(); ++i) {
      if (data.split[i] == "train")
        tr.push_back(i);
      else if (data.split[i] == "test")
        te.push_back(i);
      else
        throw Error(ErrorCode::ParseError, "split value '" + data.split[i] + "' is neither train nor test");
    }
    const Dataset train = take_rows(data.data, tr), test = take_rows(data.data, te);
    if (test.n() == 0) throw Error(ErrorCode::BadParameters, "fixed split has no test rows");
    validate_labels(train.labels, train.n());
    result.repetitions = 1;
    result.classifiers = empty_results(classifiers, 1);
    const RunContext ctx{train, test, seed, options, scatter, nullptr};
    run_cells(classifiers, ctx, 0, result.classifiers);
    for (auto& c : result.classifiers) {
      summarize_errors(c);
      if (c.failures == 0) {
        c.std_error = fixed_split_se(c.mean_error, test.n());
        c.se_flagged = false;
      }
    }
    return result;
  }

  if (plan.repetitions < 1) throw Error(ErrorCode::BadParameters, "need at least one repetition");
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0))
    throw Error(ErrorCode::BadParameters, "train fraction must lie in (0, 1)");
  std::vector<std::vector<int>> by_class(J);
  for (int i = 0; i < data.data.n(); ++i) by_class[data.data.labels[i] - 1].push_back(i);
  for (const auto& idx : by_class)
    if (idx.size() < 2) throw Error(ErrorCode::ClassTooSmall, "every class needs two rows to split");

  result.repetitions = plan.repetitions;
  result.classifiers = empty_results(classifiers, plan.repetitions);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < plan.repetitions; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, {stream::kSplit, static_cast<std::uint64_t>(r)});
    Rng rng(rep_seed);
    std::vector<int> tr, te;
    for (auto idx : by_class) {
      std::shuffle(idx.begin(), idx.end(), rng);
      const int n = static_cast<int>(idx.size());
      const int k = std::clamp(static_cast<int>(std::lround(plan.train_fraction * n)), 1, n - 1);
      tr.insert(tr.end(), idx.begin(), idx.begin() + k);
      te.insert(te.end(), idx.begin() + k, idx.end());
    }
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    const Dataset train = take_rows(data.data, tr), test = take_rows(data.data, te);
    const RunContext ctx{train, test, rep_seed, options, scatter, nullptr};
    run_cells(classifiers, ctx, r, result.classifiers);
  }
  for (auto& c : result.classifiers) summarize_errors(c);
  return result;
}

std::vector<EfficiencyRecord> efficiency_scores(const std::vector<AccuracyRecord>& records) {
  std::map<std::string, double> best;
  for (const auto& r : records) {
    if (!(r.accuracy >= 0.0 && r.accuracy <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "accuracy outside [0, 1] for " + r.dataset + "/" + r.classifier);
    auto [it, fresh] = best.emplace(r.dataset, r.accuracy);
    if (!fresh) it->second = std::max(it->second, r.accuracy);
  }
  for (const auto& [name, b] : best)
    if (b <= 0.0) throw Error(ErrorCode::AllZeroAccuracy, "every classifier has zero accuracy on " + name);
  std::vector<EfficiencyRecord> out;
  for (const auto& r : records) out.push_back({r.dataset, r.classifier, r.accuracy, r.accuracy / best[r.dataset]});
  return out;
}

std::vector<AccuracyRecord> accuracy_records(const CsvTable& table) {
  const int dc = table.column("dataset");
  const int cc = table.column("classifier");
  int ac = -1, ec = -1;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (table.header[c] == "accuracy") ac = c;
    if (table.header[c] == "mean_error_pct") ec = c;
  }
  if (ac < 0 && ec < 0) throw Error(ErrorCode::LabelMissing, "need an accuracy or mean_error_pct column");
  std::vector<AccuracyRecord> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string& cell = row[ac >= 0 ? ac : ec];
    double v;
    try {
      std::size_t used = 0;
      v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "data row " + std::to_string(i + 1) + ": '" + cell + "' is not a number");
    }
    out.push_back({row[dc], row[cc], ac >= 0 ? v : 1.0 - v / 100.0});
  }
  return out;
}

void write_results_csv(std::ostream& os, const std::vector<ExperimentResult>& results, bool header) {
  if (header) os << "dataset,d,classifier,mean_error_pct,se_pct,reps,failures\n";
  for (const auto& r : results)
    for (const auto& c : r.classifiers)
      os << r.dataset << ',' << r.d << ',' << c.name << ',' << format_double(100.0 * c.mean_error) << ','
         << format_double(100.0 * c.std_error) << ',' << r.repetitions << ',' << c.failures << '\n';
}

void write_results_markdown(std::ostream& os, const std::vector<ExperimentResult>& results) {
  std::vector<std::string> names;
  for (const auto& r : results)
    for (const auto& c : r.classifiers)
      if (std::find(names.begin(), names.end(), c.name) == names.end()) names.push_back(c.name);
  os << "| dataset | d |";
  for (const auto& n : names) os << ' ' << n << " |";
  os << "\n|---|---|";
  for (std::size_t i = 0; i < names.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& r : results) {
    os << "| " << r.dataset << " | " << r.d << " |";
    for (const auto& n : names) {
      auto it = std::find_if(r.classifiers.begin(), r.classifiers.end(),
                             [&](const ClassifierResult& c) { return c.name == n; });
      if (it == r.classifiers.end() || !std::isfinite(it->mean_error)) {
        os << " - |";
        continue;
      }
      os << ' ' << pct(it->mean_error) << " (" << pct(it->std_error) << (it->se_flagged ? "*" : "") << ")";
      if (it->failures) os << " [" << it->failures << " failed]";
      os << " |";
    }
    os << '\n';
  }
}

void write_efficiency_csv(std::ostream& os, const std::vector<EfficiencyRecord>& records) {
  os << "dataset,classifier,accuracy,efficiency\n";
  for (const auto& r : records)
    os << r.dataset << ',' << r.classifier << ',' << format_double(r.accuracy) << ',' << format_double(r.efficiency)
       << '\n';
}

}  // namespace mdlmd
