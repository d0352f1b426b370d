#include "mdlmd/bench.hpp"
#include "mdlmd/classifier.hpp"
#include "mdlmd/csv.hpp"
#include "mdlmd/kernels.hpp"
#include "mdlmd/serialize.hpp"
#include "mdlmd/simgen.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace mdlmd;

namespace {

// Bad user input detected before any computation; exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_validation(const Error& e) {
  switch (e.code()) {
    case ErrorCode::BadParameters:
    case ErrorCode::UnknownExample:
    case ErrorCode::BadK:
    case ErrorCode::InvalidArgument:
    case ErrorCode::LabelMissing:
      return true;
    default:
      return false;
  }
}

// Writes to the file, or standard output when the path is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
  write(os);
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> number_list(const std::string& what, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ValidationError(what + ": '" + s + "' is not a number");
    }
  }
  return out;
}

struct TrainFlags {
  std::string config_path;
  std::string scatter;
  std::optional<std::uint64_t> seed;
  std::optional<int> bootstrap_b;
};

void add_train_flags(CLI::App* app, TrainFlags& f) {
  app->add_option("--config", f.config_path, "key = value file with training settings")->check(CLI::ExistingFile);
  app->add_option("--scatter", f.scatter, "moment|diagonal|identity|mcd|auto")
      ->check(CLI::IsMember({"moment", "diagonal", "identity", "mcd", "auto"}));
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--bootstrap-b", f.bootstrap_b, "bootstrap resamples for h selection")->check(CLI::PositiveNumber);
}

TrainConfig train_config(const TrainFlags& f) {
  TrainConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream is(f.config_path);
    if (!is) throw Error(ErrorCode::IoError, "cannot read " + f.config_path);
    read_train_config(is, cfg);
  }
  if (!f.scatter.empty()) cfg.scatter = scatter_choice_from_string(f.scatter);
  if (f.seed) cfg.seed = *f.seed;
  if (f.bootstrap_b) cfg.bootstrap_b = *f.bootstrap_b;
  cfg.validate();
  return cfg;
}

// Feature columns of a prediction input: everything numeric except the
// label column (when present) and the dropped columns.
RowMatrix feature_rows(const CsvTable& table, const std::string& label, const std::vector<std::string>& drop) {
  std::set<std::string> skip(drop.begin(), drop.end());
  skip.insert(label);
  std::vector<int> cols;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c)
    if (!skip.count(table.header[c])) cols.push_back(c);
  RowMatrix X(static_cast<Index>(table.rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::string& s = table.rows[i][cols[k]];
      try {
        std::size_t used = 0;
        X(i, k) = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "data row " + std::to_string(i + 1) + ", column '" +
                                               table.header[cols[k]] + "': not a number");
      }
    }
  return X;
}

void write_matrix(std::ostream& os, const std::string& title, const Matrix& m) {
  os << title << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  kernels::apply_thread_limit_from_env();

  CLI::App app{"Mahalanobis and local Mahalanobis distance classifiers"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a simulated example as CSV");
  std::string sim_example = "1", sim_out, sim_part = "train";
  int sim_d = 2, sim_n = 100;
  std::uint64_t sim_seed = 1;
  sim->add_option("--example", sim_example, "example id (1..24, A, B)")->required();
  sim->add_option("--d", sim_d, "dimension")->check(CLI::PositiveNumber);
  sim->add_option("--n", sim_n, "rows per class")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--part", sim_part, "train or test stream")->check(CLI::IsMember({"train", "test"}));
  sim->add_option("--out", sim_out, "output CSV (default: standard output)");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a classifier from a CSV file");
  std::string fit_train, fit_method = "md", fit_model, fit_label = "label", fit_drop;
  TrainFlags fit_flags;
  fit->add_option("--train", fit_train, "training CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--method", fit_method, "md or lmd")->check(CLI::IsMember({"md", "lmd"}));
  fit->add_option("--label", fit_label, "label column name");
  fit->add_option("--drop", fit_drop, "comma-separated columns to ignore");
  fit->add_option("--model-out", fit_model, "model file")->required();
  add_train_flags(fit, fit_flags);

  // predict
  auto* pred = app.add_subcommand("predict", "apply a saved model to a CSV file");
  std::string pred_model, pred_data, pred_out, pred_label = "label", pred_drop;
  pred->add_option("--model", pred_model, "model file")->required()->check(CLI::ExistingFile);
  pred->add_option("--data", pred_data, "input CSV")->required()->check(CLI::ExistingFile);
  pred->add_option("--label", pred_label, "label column, ignored as a feature and used for the error rate");
  pred->add_option("--drop", pred_drop, "comma-separated columns to ignore");
  pred->add_option("--out", pred_out, "output CSV (default: standard output)");

  // bench
  auto* bench = app.add_subcommand("bench", "repeated train/test error rates");
  std::string bench_example, bench_csv, bench_classifiers = "md,lmd,lda,qda,knn", bench_out, bench_label = "label",
                                       bench_drop, bench_split_col, bench_d = "2";
  int bench_reps = 25, bench_n_train = 100, bench_n_test = 2000;
  double bench_fraction = 0.5;
  bool bench_markdown = false;
  TrainFlags bench_flags;
  auto* ex_opt = bench->add_option("--example", bench_example, "simulated example id");
  auto* csv_opt = bench->add_option("--csv", bench_csv, "benchmark CSV file")->check(CLI::ExistingFile);
  ex_opt->excludes(csv_opt);
  bench->add_option("--d", bench_d, "dimension, or a comma-separated list");
  bench->add_option("--classifiers", bench_classifiers, "comma-separated: md,lmd,lda,qda,knn,bayes");
  bench->add_option("--reps", bench_reps, "repetitions")->check(CLI::PositiveNumber);
  bench->add_option("--n-train", bench_n_train, "training rows per class")->check(CLI::PositiveNumber);
  bench->add_option("--n-test", bench_n_test, "test rows per class")->check(CLI::PositiveNumber);
  bench->add_option("--label", bench_label, "label column of the CSV");
  bench->add_option("--drop", bench_drop, "comma-separated CSV columns to ignore");
  bench->add_option("--split-column", bench_split_col, "column with train/test values for a fixed split");
  bench->add_option("--fraction", bench_fraction, "training fraction of each class for random splits")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_flag("--markdown", bench_markdown, "aligned text table instead of CSV");
  bench->add_option("--out", bench_out, "output file (default: standard output)");
  add_train_flags(bench, bench_flags);

  // hdlss-check
  auto* hd = app.add_subcommand("hdlss-check", "compare scaled distance features with their high-dimensional limits");
  std::string hd_sigma2 = "1,1.5", hd_shift = "0,0.7071067811865476";
  HdlssCheckInput hd_in;
  hd->add_option("--sigma2", hd_sigma2, "per-class variances");
  hd->add_option("--shift", hd_shift, "per-class mean shifts (mean = shift * 1)");
  hd->add_option("--n", hd_in.n_per_class, "training rows per class")->check(CLI::PositiveNumber);
  hd->add_option("--n-test", hd_in.n_test_per_class, "test rows per class")->check(CLI::PositiveNumber);
  hd->add_option("--d", hd_in.d, "dimension")->check(CLI::PositiveNumber);
  hd->add_option("--seed", hd_in.seed, "master seed");

  // efficiency
  auto* eff = app.add_subcommand("efficiency", "efficiency scores from a results CSV");
  std::string eff_results, eff_out;
  eff->add_option("--results", eff_results, "CSV with dataset, classifier and accuracy or mean_error_pct")
      ->required()
      ->check(CLI::ExistingFile);
  eff->add_option("--out", eff_out, "output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) {
      if (!is_known_example(sim_example)) throw ValidationError("unknown example '" + sim_example + "'");
      const Dataset data =
          gen_example_sample(sim_example, sim_d, sim_n, sim_seed, sim_part == "train" ? stream::kTrain : stream::kTest);
      emit(sim_out, [&](std::ostream& os) { write_dataset_csv(os, data); });
    } else if (*fit) {
      TrainConfig cfg = train_config(fit_flags);
      cfg.feature = feature_choice_from_string(fit_method);
      const LabeledData data = to_labeled(read_csv_file(fit_train), fit_label, split_list(fit_drop));
      FittedClassifier clf = fit_classifier(data.data, cfg);
      clf.class_names = data.class_names;
      save_classifier_file(clf, fit_model);
      std::cerr << "fitted " << fit_method << " (" << to_string(clf.diagnostics.chosen_mode) << " scatter";
      if (clf.feature_kind.tag == FeatureKind::Tag::LMD) std::cerr << ", h = " << clf.feature_kind.h;
      std::cerr << ") on " << data.data.n() << " rows\n";
    } else if (*pred) {
      const FittedClassifier clf = load_classifier_file(pred_model);
      const CsvTable table = read_csv_file(pred_data);
      const RowMatrix X = feature_rows(table, pred_label, split_list(pred_drop));
      const Prediction p = predict(clf, X);
      auto name = [&](int label) {
        return clf.class_names.empty() ? std::to_string(label) : clf.class_names[label - 1];
      };
      emit(pred_out, [&](std::ostream& os) {
        os << "predicted";
        for (int j = 1; j <= clf.class_count(); ++j) os << ",p_" << name(j);
        os << '\n';
        for (Index i = 0; i < X.rows(); ++i) {
          os << name(p.classes[i]);
          for (Index j = 0; j < p.posteriors.cols(); ++j) os << ',' << format_double(p.posteriors(i, j));
          os << '\n';
        }
      });
      const auto lc = std::find(table.header.begin(), table.header.end(), pred_label);
      if (lc != table.header.end()) {
        const auto col = lc - table.header.begin();
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < table.rows.size(); ++i) wrong += table.rows[i][col] != name(p.classes[i]);
        std::cerr << "error rate " << format_double(static_cast<double>(wrong) / table.rows.size()) << " on "
                  << table.rows.size() << " rows\n";
      }
    } else if (*bench) {
      if (bench_example.empty() == bench_csv.empty()) throw ValidationError("give exactly one of --example or --csv");
      const auto classifiers = parse_classifier_list(bench_classifiers);
      BenchOptions opts;
      opts.train = train_config(bench_flags);
      if (!bench_flags.scatter.empty()) opts.scatter = scatter_choice_from_string(bench_flags.scatter);
      const std::uint64_t seed = opts.train.seed;
      std::vector<ExperimentResult> results;
      if (!bench_example.empty()) {
        if (!is_known_example(bench_example)) throw ValidationError("unknown example '" + bench_example + "'");
        std::vector<int> dims;
        for (double v : number_list("--d", bench_d)) {
          if (v < 1 || v != static_cast<int>(v)) throw ValidationError("--d must list positive integers");
          dims.push_back(static_cast<int>(v));
        }
        if (dims.empty()) throw ValidationError("--d is empty");
        for (int d : dims) {
          ExampleSpec spec{bench_example, d, bench_n_train, bench_n_test};
          results.push_back(run_experiment(spec, classifiers, bench_reps, seed, opts));
        }
      } else {
        const LabeledData data =
            to_labeled(read_csv_file(bench_csv), bench_label, split_list(bench_drop), bench_split_col);
        SplitPlan plan;
        plan.fixed = !bench_split_col.empty();
        plan.repetitions = bench_reps;
        plan.train_fraction = bench_fraction;
        results.push_back(run_benchmark(data, plan, classifiers, seed, opts, bench_csv));
      }
      for (const auto& r : results)
        for (const auto& c : r.classifiers) {
          if (c.failures) std::cerr << c.name << ": " << c.failures << " failed cells (" << c.last_failure << ")\n";
          if (c.se_flagged) std::cerr << c.name << ": fewer than two successful repetitions, standard error set to 0\n";
        }
      emit(bench_out, [&](std::ostream& os) {
        if (bench_markdown)
          write_results_markdown(os, results);
        else
          write_results_csv(os, results);
      });
    } else if (*hd) {
      hd_in.sigma2 = number_list("--sigma2", hd_sigma2);
      hd_in.shift = number_list("--shift", hd_shift);
      if (hd_in.sigma2.size() < 2 || hd_in.sigma2.size() != hd_in.shift.size())
        throw ValidationError("--sigma2 and --shift need the same number (>= 2) of entries");
      const HdlssCheckReport r = hdlss_limit_check(hd_in);
      std::cout << "h," << format_double(r.h) << "\nc0," << format_double(r.c0) << '\n';
      write_matrix(std::cout, "md_train_empirical", r.md_train_empirical);
      write_matrix(std::cout, "md_train_limit", r.md_train_limit);
      write_matrix(std::cout, "md_test_empirical", r.md_test_empirical);
      write_matrix(std::cout, "md_test_limit", r.md_test_limit);
      write_matrix(std::cout, "lmd_train_empirical", r.lmd_train_empirical);
      write_matrix(std::cout, "lmd_train_limit", r.lmd_train_limit);
      write_matrix(std::cout, "lmd_test_empirical", r.lmd_test_empirical);
      write_matrix(std::cout, "lmd_test_limit", r.lmd_test_limit);
      std::cout << "max_rel_dev_md," << format_double(r.max_rel_dev_md) << "\nmax_rel_dev_lmd,"
                << format_double(r.max_rel_dev_lmd) << '\n';
    } else if (*eff) {
      const auto scores = efficiency_scores(accuracy_records(read_csv_file(eff_results)));
      emit(eff_out, [&](std::ostream& os) { write_efficiency_csv(os, scores); });
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation(e) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
