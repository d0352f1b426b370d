#include "mdlmd/bench.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mdlmd;

TEST_CASE("fixed-split standard error") {
  CHECK(fixed_split_se(0.102, 1000) == doctest::Approx(std::sqrt(0.102 * 0.898 / 1000)).epsilon(1e-12));
  CHECK(std::round(fixed_split_se(0.102, 1000) * 100 * 100) / 100 == doctest::Approx(0.96));
  CHECK_THROWS_AS(fixed_split_se(0.1, 0), Error);
}

TEST_CASE("error summaries") {
  ClassifierResult r;
  r.errors = {0.1, 0.2, 0.3, std::nan("")};
  summarize_errors(r);
  CHECK(r.failures == 1);
  CHECK(r.mean_error == doctest::Approx(0.2));
  CHECK(r.std_error == doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK_FALSE(r.se_flagged);
  ClassifierResult one;
  one.errors = {0.25};
  summarize_errors(one);
  CHECK(one.std_error == 0.0);
  CHECK(one.se_flagged);
}

TEST_CASE("efficiency scores") {
  const auto e = efficiency_scores({{"a", "x", 0.9}, {"a", "y", 0.45}, {"b", "x", 0.7}, {"b", "y", 0.7}});
  CHECK(e[0].efficiency == 1.0);
  CHECK(e[1].efficiency == doctest::Approx(0.5));
  CHECK(e[2].efficiency == 1.0);
  CHECK(e[3].efficiency == 1.0);
  CHECK_THROWS_AS(efficiency_scores({{"a", "x", 0.0}, {"a", "y", 0.0}}), Error);
  CHECK_THROWS_AS(efficiency_scores({{"a", "x", 1.5}}), Error);

  std::istringstream csv("dataset,d,classifier,mean_error_pct,se_pct\nd1,2,md,10,1\nd1,2,lda,55,1\n");
  const auto rec = accuracy_records(read_csv(csv));
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].accuracy == doctest::Approx(0.9));
  CHECK(rec[1].accuracy == doctest::Approx(0.45));
}

TEST_CASE("simulated experiments") {
  BenchOptions opt;
  opt.train.bootstrap_b = 5;
  const ExampleSpec spec{"1", 2, 50, 200};
  const ExperimentResult a = run_experiment(spec, {"md", "lda", "bayes"}, 3, 42, opt);
  const ExperimentResult b = run_experiment(spec, {"md", "lda", "bayes"}, 3, 42, opt);
  for (const auto& name : {"md", "lda", "bayes"}) {
    CHECK(a.at(name).errors == b.at(name).errors);
    CHECK(a.at(name).mean_error >= 0.0);
    CHECK(a.at(name).mean_error <= 1.0);
  }
  CHECK(a.at("bayes").mean_error == 0.0);
  const auto& md = a.at("md");
  double ss = 0.0;
  for (double e : md.errors) ss += (e - md.mean_error) * (e - md.mean_error);
  CHECK(md.std_error == doctest::Approx(std::sqrt(ss / 2) / std::sqrt(3.0)).epsilon(1e-12));

  const ExperimentResult single = run_experiment(spec, {"lda"}, 1, 1, opt);
  CHECK(single.at("lda").std_error == 0.0);
  CHECK(single.at("lda").se_flagged);

  CHECK_THROWS_AS(run_experiment(spec, {"svm"}, 2, 1, opt), Error);
  CHECK_THROWS_AS(run_experiment(spec, {"md"}, 0, 1, opt), Error);
  CHECK_THROWS_AS(run_experiment({"x", 2, 10, 10}, {"md"}, 1, 1, opt), Error);
}

TEST_CASE("failures become missing cells") {
  // Moment scatter needs more rows than the classes have here.
  BenchOptions opt;
  opt.scatter = ScatterChoice::Moment;
  const ExperimentResult r = run_experiment({"2", 20, 8, 20}, {"md", "lda"}, 2, 3, opt);
  CHECK(r.at("md").failures == 2);
  CHECK(std::isnan(r.at("md").mean_error));
  CHECK_FALSE(r.at("md").last_failure.empty());
  CHECK(r.at("lda").failures == 0);
}

TEST_CASE("pure-noise features show no train/test leakage") {
  const int n = 2400;
  Dataset ds;
  ds.rows = testutil::normal_rows(n, 3, 91);
  for (int i = 0; i < n; ++i) ds.labels.push_back(i % 3 == 0 ? 2 : 1);  // priors 2/3, 1/3
  LabeledData data{ds, {"1", "2"}, {"a", "b", "c"}, {}};
  SplitPlan plan;
  plan.repetitions = 2;
  plan.train_fraction = 1.0 / 6.0;  // 2000 test rows
  BenchOptions opt;
  const ExperimentResult r = run_benchmark(data, plan, {"md", "lda", "qda", "knn"}, 5, opt);
  for (const auto& c : r.classifiers) {
    CAPTURE(c.name);
    CHECK(c.failures == 0);
    CHECK(std::abs(c.mean_error - 1.0 / 3.0) < 0.05);
  }
}

TEST_CASE("CSV benchmarks") {
  std::ostringstream os;
  os << "f1,f2,kind,part\n";
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int i = 0; i < 120; ++i) {
    const bool b = i % 2;
    os << z(rng) + (b ? 2 : 0) << ',' << z(rng) << ',' << (b ? "yes" : "no") << ',' << (i < 80 ? "train" : "test") << '\n';
  }
  std::istringstream is(os.str());
  const CsvTable table = read_csv(is);

  SUBCASE("fixed split") {
    const LabeledData d = to_labeled(table, "kind", {}, "part");
    CHECK(d.class_names == std::vector<std::string>{"no", "yes"});
    SplitPlan plan;
    plan.fixed = true;
    const ExperimentResult r = run_benchmark(d, plan, {"lda"}, 1);
    const auto& c = r.at("lda");
    CHECK(c.std_error == doctest::Approx(fixed_split_se(c.mean_error, 40)));
  }
  SUBCASE("repeated splits are reproducible") {
    const LabeledData d = to_labeled(table, "kind", {"part"});
    SplitPlan plan;
    plan.repetitions = 2;
    const ExperimentResult a = run_benchmark(d, plan, {"lda", "knn"}, 7), b = run_benchmark(d, plan, {"lda", "knn"}, 7);
    CHECK(a.at("lda").errors == b.at("lda").errors);
    CHECK(a.at("knn").errors == b.at("knn").errors);
    std::ostringstream out, md;
    write_results_csv(out, {a});
    CHECK(out.str().rfind("dataset,d,classifier,mean_error_pct,se_pct,reps,failures\n", 0) == 0);
    write_results_markdown(md, {a});
    CHECK(md.str().find("| lda |") != std::string::npos);
  }
  SUBCASE("input errors") {
    CHECK_THROWS_AS(to_labeled(table, "missing"), Error);
    std::istringstream ragged("a,b\n1,2\n3\n");
    try {
      read_csv(ragged);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream text("a,label\n1,x\nfoo,y\n");
    CHECK_THROWS_AS(to_labeled(read_csv(text), "label"), Error);
    std::istringstream single("a,label\n1,x\n2,x\n3,x\n");
    const LabeledData one = to_labeled(read_csv(single), "label");
    CHECK_THROWS_AS(run_benchmark(one, SplitPlan{}, {"lda"}, 1), Error);
  }
}

TEST_CASE("classifier list parsing") {
  CHECK(parse_classifier_list("md, lda,md") == std::vector<std::string>{"md", "lda"});
  CHECK_THROWS_AS(parse_classifier_list("md,svm"), Error);
  CHECK_THROWS_AS(parse_classifier_list(""), Error);
}
