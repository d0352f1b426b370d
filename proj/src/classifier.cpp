#include "mdlmd/classifier.hpp"

#include "mdlmd/kernels.hpp"
#include "mdlmd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <istream>
#include <random>
#include <sstream>

namespace mdlmd {

const char* to_string(ScatterChoice choice) {
  switch (choice) {
    case ScatterChoice::Moment: return "moment";
    case ScatterChoice::Diagonal: return "diagonal";
    case ScatterChoice::Identity: return "identity";
    case ScatterChoice::MCD: return "mcd";
    case ScatterChoice::AutoHDLSS: return "auto";
  }
  return "unknown";
}

ScatterChoice scatter_choice_from_string(const std::string& name) {
  if (name == "moment") return ScatterChoice::Moment;
  if (name == "diagonal") return ScatterChoice::Diagonal;
  if (name == "identity") return ScatterChoice::Identity;
  if (name == "mcd") return ScatterChoice::MCD;
  if (name == "auto") return ScatterChoice::AutoHDLSS;
  throw Error(ErrorCode::InvalidArgument, "unknown scatter mode '" + name + "'");
}

const char* to_string(FeatureChoice choice) { return choice == FeatureChoice::MD ? "md" : "lmd"; }

FeatureChoice feature_choice_from_string(const std::string& name) {
  if (name == "md") return FeatureChoice::MD;
  if (name == "lmd") return FeatureChoice::LMD;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

void TrainConfig::validate() const {
  if (!(k0 > 1.0)) throw Error(ErrorCode::BadParameters, "k0 must exceed 1");
  if (!(r_stop > 0.0 && r_stop < 1.0)) throw Error(ErrorCode::BadParameters, "r_stop must lie in (0,1)");
  if (!(percentile > 0.0 && percentile < 100.0)) throw Error(ErrorCode::BadParameters, "percentile must lie in (0,100)");
  if (!(shrink > 0.0)) throw Error(ErrorCode::BadParameters, "shrink must be positive");
  if (max_grid < 1) throw Error(ErrorCode::BadParameters, "max_grid must be >= 1");
  if (bootstrap_b < 1 || hdlss_b < 1) throw Error(ErrorCode::BadParameters, "bootstrap size must be >= 1");
  if (!(mcd_coverage > 0.5 && mcd_coverage <= 1.0)) throw Error(ErrorCode::BadParameters, "MCD coverage must lie in (0.5,1]");
  if (gam.lambda_grid.empty()) throw Error(ErrorCode::BadParameters, "empty lambda grid");
}

namespace {

double setting_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::BadParameters, "setting '" + key + "': '" + value + "' is not a number");
}

int setting_int(const std::string& key, const std::string& value) {
  const double v = setting_number(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw Error(ErrorCode::BadParameters, "setting '" + key + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

void apply_train_setting(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "percentile") c.percentile = setting_number(key, value);
  else if (key == "shrink") c.shrink = setting_number(key, value);
  else if (key == "k0") c.k0 = setting_number(key, value);
  else if (key == "r_stop") c.r_stop = setting_number(key, value);
  else if (key == "max_grid") c.max_grid = setting_int(key, value);
  else if (key == "bootstrap_b") c.bootstrap_b = setting_int(key, value);
  else if (key == "hdlss_b") c.hdlss_b = setting_int(key, value);
  else if (key == "mcd_coverage") c.mcd_coverage = setting_number(key, value);
  else if (key == "seed") {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(value, &used);
      if (used != value.size() || value[0] == '-') throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadParameters, "setting 'seed' must be a non-negative integer");
    }
  } else if (key == "scatter") {
    try {
      c.scatter = scatter_choice_from_string(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadParameters, e.what());
    }
  } else if (key == "feature") {
    try {
      c.feature = feature_choice_from_string(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadParameters, e.what());
    }
  } else if (key == "gam.max_iterations") c.gam.max_iterations = setting_int(key, value);
  else if (key == "gam.tolerance") c.gam.tolerance = setting_number(key, value);
  else if (key == "gam.coefficient_bound") c.gam.coefficient_bound = setting_number(key, value);
  else if (key == "gam.interior_knots") c.gam.interior_knots = setting_int(key, value);
  else if (key == "gam.lambda_grid") {
    std::vector<double> grid;
    std::istringstream is(value);
    std::string tok;
    while (is >> tok) grid.push_back(setting_number(key, tok));
    for (double l : grid)
      if (!(l > 0.0)) throw Error(ErrorCode::BadParameters, "lambda values must be positive");
    c.gam.lambda_grid = grid;
  } else {
    throw Error(ErrorCode::BadParameters, "unknown setting '" + key + "'");
  }
}

void read_train_config(std::istream& is, TrainConfig& config) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadParameters, "config line " + std::to_string(lineno) + ": expected 'key = value'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    apply_train_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

KernelProfile classifier_kernel(int d) { return KernelProfile::gaussian(d).normalized(); }

double error_rate(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
  if (truth.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

namespace {

McdOptions mcd_options(const TrainConfig& cfg) {
  McdOptions o;
  o.coverage = cfg.mcd_coverage;
  o.seed = derive_seed(cfg.seed, {stream::kMcd});
  return o;
}

ScatterMode concrete_mode(ScatterChoice c) {
  switch (c) {
    case ScatterChoice::Moment: return ScatterMode::Moment;
    case ScatterChoice::Diagonal: return ScatterMode::Diagonal;
    case ScatterChoice::Identity: return ScatterMode::Identity;
    case ScatterChoice::MCD: return ScatterMode::MCD;
    case ScatterChoice::AutoHDLSS: break;
  }
  return ScatterMode::Moment;
}

bool is_hdlss(const Dataset& train) {
  const auto sizes = train.class_sizes();
  return train.d() > *std::max_element(sizes.begin(), sizes.end());
}

void check_class_sizes(const Dataset& train, ScatterMode mode) {
  const int d = train.d();
  int need = 1;
  switch (mode) {
    case ScatterMode::Identity: need = 1; break;
    case ScatterMode::Diagonal: need = 2; break;
    case ScatterMode::Moment:
    case ScatterMode::MCD: need = std::max(d + 2, 10); break;
  }
  const auto sizes = train.class_sizes();
  for (std::size_t j = 0; j < sizes.size(); ++j)
    if (sizes[j] < need)
      throw Error(ErrorCode::ClassTooSmall, "class " + std::to_string(j + 1) + " has " + std::to_string(sizes[j]) +
                                                " rows, " + to_string(mode) + " scatter needs " + std::to_string(need));
}

std::vector<RowMatrix> split_classes(const Dataset& data) {
  std::vector<RowMatrix> out;
  for (int j = 1; j <= data.class_count(); ++j) out.push_back(data.class_rows(j));
  return out;
}

std::vector<ScatterModel> fit_models(const std::vector<RowMatrix>& per_class, ScatterMode mode, const TrainConfig& cfg) {
  std::vector<ScatterModel> models;
  for (std::size_t j = 0; j < per_class.size(); ++j) {
    models.push_back(fit_scatter(per_class[j], mode, mcd_options(cfg)));
    models.back().class_id = static_cast<int>(j) + 1;
  }
  return models;
}

FeatureKind md_kind(bool hdlss) { return hdlss ? FeatureKind::md_squared_scaled() : FeatureKind::md(); }

FeatureMatrix md_type_features(const RowMatrix& X, const std::vector<ScatterModel>& models, const FeatureKind& kind) {
  return kind == FeatureKind::md_squared_scaled() ? md_squared_scaled_features(X, models) : md_features(X, models);
}

double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

// One stratified bootstrap resample: in-bag rows (with repetition) and the
// rows never drawn.
struct Resample {
  std::vector<int> in;
  std::vector<int> oob;
};

Resample draw_resample(const Dataset& train, std::uint64_t seed, int b) {
  Rng rng = make_rng(seed, {stream::kBootstrap, static_cast<std::uint64_t>(b)});
  std::vector<std::vector<int>> by_class(train.class_count());
  for (int i = 0; i < train.n(); ++i) by_class[train.labels[i] - 1].push_back(i);
  std::vector<char> drawn(train.n(), 0);
  Resample r;
  for (const auto& idx : by_class) {
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const int row = idx[pick(rng)];
      r.in.push_back(row);
      drawn[row] = 1;
    }
  }
  for (int i = 0; i < train.n(); ++i)
    if (!drawn[i]) r.oob.push_back(i);
  return r;
}

Dataset subset(const Dataset& data, const std::vector<int>& idx) {
  Dataset out;
  out.rows.resize(static_cast<Index>(idx.size()), data.d());
  out.labels.resize(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.rows.row(static_cast<Index>(k)) = data.rows.row(idx[k]);
    out.labels[k] = data.labels[idx[k]];
  }
  out.meta = data.meta;
  return out;
}

// Per-resample out-of-bag error for every h of the grid. Rows of the result
// are resamples (NaN when skipped), columns grid points.
Matrix bootstrap_lmd_table(const Dataset& train, const std::vector<double>& grid, const TrainConfig& cfg,
                           ScatterMode mode, int b) {
  const KernelProfile kernel = classifier_kernel(train.d());
  Matrix table(b, static_cast<Index>(grid.size()));
  table.setConstant(std::numeric_limits<double>::quiet_NaN());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < b; ++r) {
    try {
    const Resample rs = draw_resample(train, cfg.seed, r);
    if (rs.oob.empty()) continue;
    const Dataset in = subset(train, rs.in);
    const Dataset oob = subset(train, rs.oob);
    const auto per_class = split_classes(in);
    const auto models = fit_models(per_class, mode, cfg);
    std::vector<Matrix> q_in, q_oob;
    for (std::size_t j = 0; j < models.size(); ++j) {
      q_in.push_back(standardized_sq_dist(in.rows, per_class[j], models[j]));
      q_oob.push_back(standardized_sq_dist(oob.rows, per_class[j], models[j]));
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
      Matrix f_in(in.n(), models.size()), f_oob(oob.n(), models.size());
      for (std::size_t j = 0; j < models.size(); ++j) {
        f_in.col(j) = lmd_column_from_sq(q_in[j], grid[g], kernel);
        f_oob.col(j) = lmd_column_from_sq(q_oob[j], grid[g], kernel);
      }
      const GamModel gam = fit_gam(FeatureMatrix(std::move(f_in), FeatureKind::lmd(grid[g])), in.labels, cfg.gam);
      const Labels pred = predict_class(gam, FeatureMatrix(std::move(f_oob), FeatureKind::lmd(grid[g])));
      table(r, static_cast<Index>(g)) = error_rate(pred, oob.labels);
    }
    } catch (...) {
#pragma omp critical(mdlmd_bootstrap_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

HSelection summarize(const Matrix& table, const std::vector<double>& grid) {
  HSelection s;
  s.mean_errors.assign(grid.size(), 0.0);
  int used = 0;
  for (Index r = 0; r < table.rows(); ++r) {
    if (std::isnan(table(r, 0))) {
      ++s.skipped;
      continue;
    }
    ++used;
    for (std::size_t g = 0; g < grid.size(); ++g) s.mean_errors[g] += table(r, static_cast<Index>(g));
  }
  if (used == 0) throw Error(ErrorCode::AllResamplesSkipped, "every bootstrap resample had an empty out-of-bag set");
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    s.mean_errors[g] /= used;
    if (s.mean_errors[g] < s.mean_errors[best]) best = g;
  }
  s.h_best = grid[best];
  return s;
}

FittedClassifier assemble(const Dataset& train, const TrainConfig& cfg, ScatterMode mode, const FeatureKind& kind,
                          Diagnostics diag) {
  FittedClassifier clf;
  clf.config = cfg;
  clf.per_class_rows = split_classes(train);
  clf.models = fit_models(clf.per_class_rows, mode, cfg);
  clf.feature_kind = kind;
  diag.chosen_mode = mode;
  clf.diagnostics = std::move(diag);
  FeatureMatrix f = classifier_features(clf, train.rows);
  clf.gam = fit_gam(f, train.labels, cfg.gam);
  // MD prediction does not need the training rows.
  if (kind.tag != FeatureKind::Tag::LMD) clf.per_class_rows.clear();
  return clf;
}

FittedClassifier fit_md_mode(const Dataset& train, const TrainConfig& cfg, ScatterMode mode, bool hdlss) {
  check_class_sizes(train, mode);
  Diagnostics diag;
  diag.hdlss = hdlss;
  return assemble(train, cfg, mode, md_kind(hdlss), std::move(diag));
}

struct LmdPlan {
  std::vector<double> grid;
  HSelection selection;
};

LmdPlan plan_lmd(const Dataset& train, const TrainConfig& cfg, ScatterMode mode, bool always_bootstrap) {
  LmdPlan p;
  const auto models = fit_models(split_classes(train), mode, cfg);
  p.grid = build_h_grid(train, models, classifier_kernel(train.d()), cfg);
  if (p.grid.size() == 1 && !always_bootstrap) {
    p.selection.h_best = p.grid.front();
    return p;
  }
  p.selection = summarize(bootstrap_lmd_table(train, p.grid, cfg, mode, cfg.bootstrap_b), p.grid);
  return p;
}

FittedClassifier finish_lmd(const Dataset& train, const TrainConfig& cfg, ScatterMode mode, const LmdPlan& plan,
                            Diagnostics diag) {
  diag.h_grid = plan.grid;
  diag.bootstrap_errors = plan.selection.mean_errors;
  diag.skipped_resamples = plan.selection.skipped;
  return assemble(train, cfg, mode, FeatureKind::lmd(plan.selection.h_best), std::move(diag));
}

}  // namespace

std::vector<double> build_h_grid(const Dataset& train, const std::vector<ScatterModel>& models,
                                 const KernelProfile& kernel, const TrainConfig& config) {
  config.validate();
  const int J = train.class_count();
  if (static_cast<int>(models.size()) != J) throw Error(ErrorCode::DimensionMismatch, "one scatter model per class required");
  std::vector<Matrix> within;
  std::vector<double> dists;
  for (int j = 0; j < J; ++j) {
    const RowMatrix rows = train.class_rows(j + 1);
    within.push_back(standardized_sq_dist(rows, rows, models[j]));
    const Matrix& q = within.back();
    for (Index a = 0; a < q.rows(); ++a)
      for (Index b = a + 1; b < q.cols(); ++b) dists.push_back(std::sqrt(std::max(0.0, q(a, b))));
  }
  const bool degenerate =
      dists.empty() || std::all_of(dists.begin(), dists.end(), [](double v) { return v <= 0.0; });
  if (degenerate) return {1.0};

  double base = quantile7(dists, config.percentile / 100.0);
  if (!(base > 0.0)) {
    // Many tied rows: fall back to the smallest positive distance.
    base = std::numeric_limits<double>::infinity();
    for (double v : dists)
      if (v > 0.0) base = std::min(base, v);
  }

  // Own-class squared distances to the class centre, the large-h limit shape.
  std::vector<double> md_sq;
  for (int j = 0; j < J; ++j) {
    const RowMatrix rows = train.class_rows(j + 1);
    Vector c;
    const Vector center = models[j].whiten_rows(RowMatrix(models[j].location.transpose())).row(0).transpose();
    kernels::sq_dist_to_point(models[j].whiten_rows(rows), center, c);
    for (Index i = 0; i < c.size(); ++i) md_sq.push_back(c(i) + train.d());
  }

  std::vector<double> grid;
  double h = config.shrink * base;
  for (int i = 0; i < config.max_grid; ++i, h *= config.k0) {
    grid.push_back(h);
    std::vector<double> gamma;
    for (int j = 0; j < J; ++j) {
      const Vector col = lmd_column_from_sq(within[j], h, kernel);
      gamma.insert(gamma.end(), col.data(), col.data() + col.size());
    }
    const double r = pearson(gamma, md_sq);
    if (r > config.r_stop) break;
  }
  return grid;
}

HSelection bootstrap_select_h(const Dataset& train, const std::vector<double>& grid, const TrainConfig& config,
                              ScatterMode mode, int b) {
  if (grid.empty()) throw Error(ErrorCode::BadParameters, "empty h grid");
  if (b < 1) throw Error(ErrorCode::BadParameters, "bootstrap size must be >= 1");
  if (grid.size() == 1) {
    HSelection s;
    s.h_best = grid.front();
    return s;
  }
  return summarize(bootstrap_lmd_table(train, grid, config, mode, b), grid);
}

double bootstrap_md_error(const Dataset& train, const TrainConfig& cfg, ScatterMode mode, int b, int* skipped) {
  const bool hdlss = mode == ScatterMode::Identity || mode == ScatterMode::Diagonal;
  const FeatureKind kind = md_kind(hdlss && is_hdlss(train));
  std::vector<double> errs(b, std::numeric_limits<double>::quiet_NaN());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < b; ++r) {
    try {
    const Resample rs = draw_resample(train, cfg.seed, r);
    if (rs.oob.empty()) continue;
    const Dataset in = subset(train, rs.in);
    const Dataset oob = subset(train, rs.oob);
    const auto models = fit_models(split_classes(in), mode, cfg);
    const GamModel gam = fit_gam(md_type_features(in.rows, models, kind), in.labels, cfg.gam);
    errs[r] = error_rate(predict_class(gam, md_type_features(oob.rows, models, kind)), oob.labels);
    } catch (...) {
#pragma omp critical(mdlmd_bootstrap_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  double total = 0.0;
  int used = 0;
  for (double e : errs)
    if (!std::isnan(e)) {
      total += e;
      ++used;
    }
  if (skipped) *skipped = b - used;
  if (used == 0) throw Error(ErrorCode::AllResamplesSkipped, "every bootstrap resample had an empty out-of-bag set");
  return total / used;
}

FittedClassifier fit_md(const Dataset& train, const TrainConfig& config) {
  config.validate();
  validate_labels(train.labels, train.n());
  if (config.scatter == ScatterChoice::AutoHDLSS) {
    if (is_hdlss(train)) {
      TrainConfig c = config;
      c.feature = FeatureChoice::MD;
      return fit_hdlss(train, c);
    }
    return fit_md_mode(train, config, ScatterMode::Moment, false);
  }
  return fit_md_mode(train, config, concrete_mode(config.scatter), false);
}

FittedClassifier fit_lmd(const Dataset& train, const TrainConfig& config) {
  config.validate();
  validate_labels(train.labels, train.n());
  ScatterMode mode = ScatterMode::Moment;
  if (config.scatter == ScatterChoice::AutoHDLSS) {
    if (is_hdlss(train)) {
      TrainConfig c = config;
      c.feature = FeatureChoice::LMD;
      return fit_hdlss(train, c);
    }
  } else {
    mode = concrete_mode(config.scatter);
  }
  check_class_sizes(train, mode);
  const LmdPlan plan = plan_lmd(train, config, mode, false);
  return finish_lmd(train, config, mode, plan, Diagnostics{});
}

FittedClassifier fit_hdlss(const Dataset& train, const TrainConfig& config) {
  config.validate();
  validate_labels(train.labels, train.n());
  check_class_sizes(train, ScatterMode::Diagonal);
  Diagnostics diag;
  diag.hdlss = true;
  if (config.feature == FeatureChoice::MD) {
    diag.identity_error = bootstrap_md_error(train, config, ScatterMode::Identity, config.hdlss_b);
    diag.diagonal_error = bootstrap_md_error(train, config, ScatterMode::Diagonal, config.hdlss_b);
    const ScatterMode mode = diag.diagonal_error < diag.identity_error ? ScatterMode::Diagonal : ScatterMode::Identity;
    return assemble(train, config, mode, md_kind(true), std::move(diag));
  }
  const LmdPlan identity = plan_lmd(train, config, ScatterMode::Identity, true);
  const LmdPlan diagonal = plan_lmd(train, config, ScatterMode::Diagonal, true);
  diag.identity_error = *std::min_element(identity.selection.mean_errors.begin(), identity.selection.mean_errors.end());
  diag.diagonal_error = *std::min_element(diagonal.selection.mean_errors.begin(), diagonal.selection.mean_errors.end());
  if (diag.diagonal_error < diag.identity_error) return finish_lmd(train, config, ScatterMode::Diagonal, diagonal, diag);
  return finish_lmd(train, config, ScatterMode::Identity, identity, diag);
}

FittedClassifier fit_classifier(const Dataset& train, const TrainConfig& config) {
  return config.feature == FeatureChoice::MD ? fit_md(train, config) : fit_lmd(train, config);
}

FeatureMatrix classifier_features(const FittedClassifier& clf, const RowMatrix& X) {
  if (X.cols() != clf.dim()) throw Error(ErrorCode::DimensionMismatch, "data dimension differs from the model");
  if (clf.feature_kind.tag == FeatureKind::Tag::LMD)
    return lmd_features(X, clf.per_class_rows, clf.models, clf.feature_kind.h, classifier_kernel(clf.dim()));
  return md_type_features(X, clf.models, clf.feature_kind);
}

Prediction predict(const FittedClassifier& clf, const RowMatrix& X) {
  Prediction p;
  p.posteriors = predict_proba(clf.gam, classifier_features(clf, X));
  p.classes = argmax_labels(p.posteriors);
  return p;
}

Matrix theta_train(const std::vector<double>& sigma2, const Matrix& nu2, const std::vector<int>& n) {
  const int J = static_cast<int>(sigma2.size());
  Matrix t(J, J);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < J; ++k)
      t(j, k) = j == k ? (1.0 - 1.0 / n[j]) * sigma2[j] : nu2(j, k) + sigma2[j] + sigma2[k] / n[k];
  return t;
}

Matrix theta_test(const std::vector<double>& sigma2, const Matrix& nu2, const std::vector<int>& n) {
  const int J = static_cast<int>(sigma2.size());
  Matrix t(J, J);
  for (int i = 0; i < J; ++i)
    for (int k = 0; k < J; ++k)
      t(i, k) = i == k ? (1.0 + 1.0 / n[i]) * sigma2[i] : nu2(i, k) + sigma2[i] + sigma2[k] / n[k];
  return t;
}

Matrix theta_lmd_test(const std::vector<double>& sigma2, const Matrix& nu2, double c0, const KernelProfile& kernel) {
  const int J = static_cast<int>(sigma2.size());
  Matrix t(J, J);
  for (int i = 0; i < J; ++i)
    for (int k = 0; k < J; ++k) {
      const double s = sigma2[i] + sigma2[k] + (i == k ? 0.0 : nu2(i, k));
      t(i, k) = kernel.psi(s / c0) * s;
    }
  return t;
}

Matrix theta_lmd_train(const std::vector<double>& sigma2, const Matrix& nu2, const std::vector<int>& n, double c0,
                       const KernelProfile& kernel) {
  Matrix t = theta_lmd_test(sigma2, nu2, c0, kernel);
  for (Index j = 0; j < t.rows(); ++j) t(j, j) *= 1.0 - 1.0 / n[j];
  return t;
}

HdlssCheckReport hdlss_limit_check(const HdlssCheckInput& in) {
  const int J = static_cast<int>(in.sigma2.size());
  if (J < 2 || static_cast<int>(in.shift.size()) != J)
    throw Error(ErrorCode::BadParameters, "need matching sigma2 and shift lists for at least two classes");
  for (double s : in.sigma2)
    if (!(s > 0.0)) throw Error(ErrorCode::BadParameters, "sigma2 must be positive");
  if (in.d < 1 || in.n_per_class < 2 || in.n_test_per_class < 1)
    throw Error(ErrorCode::BadParameters, "bad sizes for the limit check");

  const int d = in.d;
  auto draw = [&](int j, int n, std::uint64_t tag) {
    Rng rng = make_rng(in.seed, {stream::kHdlss, tag, static_cast<std::uint64_t>(j)});
    std::normal_distribution<double> z(0.0, 1.0);
    RowMatrix x(n, d);
    const double sd = std::sqrt(in.sigma2[j]);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = in.shift[j] + sd * z(rng);
    return x;
  };
  std::vector<RowMatrix> train, test;
  for (int j = 0; j < J; ++j) {
    train.push_back(draw(j, in.n_per_class, stream::kTrain));
    test.push_back(draw(j, in.n_test_per_class, stream::kTest));
  }
  std::vector<ScatterModel> models;
  for (const auto& t : train) models.push_back(fit_identity(t));

  Matrix nu2(J, J);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < J; ++k) nu2(j, k) = (in.shift[j] - in.shift[k]) * (in.shift[j] - in.shift[k]);
  const std::vector<int> n(J, in.n_per_class);

  HdlssCheckReport rep;
  rep.md_train_empirical.resize(J, J);
  rep.md_test_empirical.resize(J, J);
  for (int j = 0; j < J; ++j) {
    rep.md_train_empirical.row(j) = (squared_md_matrix(train[j], models) / d).colwise().mean();
    rep.md_test_empirical.row(j) = (squared_md_matrix(test[j], models) / d).colwise().mean();
  }
  rep.md_train_limit = theta_train(in.sigma2, nu2, n);
  rep.md_test_limit = theta_test(in.sigma2, nu2, n);

  // Median heuristic over all pooled training pairs.
  RowMatrix pooled(J * in.n_per_class, d);
  for (int j = 0; j < J; ++j) pooled.middleRows(j * in.n_per_class, in.n_per_class) = train[j];
  Matrix pq;
  kernels::pairwise_sq_dist(pooled, pooled, pq);
  std::vector<double> dists;
  for (Index a = 0; a < pq.rows(); ++a)
    for (Index b = a + 1; b < pq.cols(); ++b) dists.push_back(std::sqrt(pq(a, b)));
  rep.h = quantile7(dists, 0.5);
  rep.c0 = rep.h * rep.h / d;

  const KernelProfile kernel = classifier_kernel(d);
  rep.lmd_train_empirical.resize(J, J);
  rep.lmd_test_empirical.resize(J, J);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < J; ++k) {
      rep.lmd_train_empirical(j, k) =
          lmd_column_from_sq(standardized_sq_dist(train[j], train[k], models[k]), rep.h, kernel).mean() / d;
      rep.lmd_test_empirical(j, k) =
          lmd_column_from_sq(standardized_sq_dist(test[j], train[k], models[k]), rep.h, kernel).mean() / d;
    }
  rep.lmd_train_limit = theta_lmd_train(in.sigma2, nu2, n, rep.c0, kernel);
  rep.lmd_test_limit = theta_lmd_test(in.sigma2, nu2, rep.c0, kernel);

  auto rel = [](const Matrix& e, const Matrix& l) {
    return ((e - l).array().abs() / l.array().abs()).maxCoeff();
  };
  rep.max_rel_dev_md = std::max(rel(rep.md_train_empirical, rep.md_train_limit), rel(rep.md_test_empirical, rep.md_test_limit));
  rep.max_rel_dev_lmd =
      std::max(rel(rep.lmd_train_empirical, rep.lmd_train_limit), rel(rep.lmd_test_empirical, rep.lmd_test_limit));
  return rep;
}

}  // namespace mdlmd
