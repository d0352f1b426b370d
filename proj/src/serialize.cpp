#include "mdlmd/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mdlmd {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    // strtod rather than stod: subnormal values set ERANGE but are valid.
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    const bool overflow = std::isinf(v) && tok.find("inf") == std::string::npos;
    if (end != tok.c_str() + tok.size() || overflow)
      throw Error(ErrorCode::ParseError, "key '" + key + "': bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

void TextRecord::put(const std::string& key, const std::string& value) {
  if (values_.count(key)) throw Error(ErrorCode::Internal, "duplicate key " + key);
  order_.push_back(key);
  values_[key] = value;
}

void TextRecord::put(const std::string& key, double value) { put(key, format_double(value)); }
void TextRecord::put(const std::string& key, long long value) { put(key, std::to_string(value)); }

void TextRecord::put(const std::string& key, const Vector& values) {
  std::string s;
  for (Index i = 0; i < values.size(); ++i) {
    if (i) s += ' ';
    s += format_double(values(i));
  }
  put(key, s);
}

void TextRecord::put(const std::string& key, const std::vector<double>& values) {
  put(key, Vector(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()))));
}

void TextRecord::put(const std::string& key, const Matrix& values) {
  std::string s = std::to_string(values.rows()) + " " + std::to_string(values.cols());
  for (Index i = 0; i < values.rows(); ++i)
    for (Index j = 0; j < values.cols(); ++j) s += " " + format_double(values(i, j));
  put(key, s);
}

const std::string& TextRecord::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::ParseError, "missing key '" + key + "'");
  return it->second;
}

double TextRecord::number(const std::string& key) const {
  const auto v = parse_numbers(key, text(key));
  if (v.size() != 1) throw Error(ErrorCode::ParseError, "key '" + key + "' must hold one number");
  return v[0];
}

long long TextRecord::integer(const std::string& key) const {
  const std::string& t = text(key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, "key '" + key + "' must hold an integer");
}

std::vector<double> TextRecord::list(const std::string& key) const { return parse_numbers(key, text(key)); }

Vector TextRecord::vector(const std::string& key) const {
  const auto v = list(key);
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

Matrix TextRecord::matrix(const std::string& key) const {
  const auto v = list(key);
  if (v.size() < 2) throw Error(ErrorCode::ParseError, "key '" + key + "' lacks matrix dimensions");
  const auto r = static_cast<Index>(v[0]), c = static_cast<Index>(v[1]);
  if (r < 0 || c < 0 || static_cast<std::size_t>(r * c + 2) != v.size())
    throw Error(ErrorCode::ParseError, "key '" + key + "' has the wrong number of entries");
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = v[2 + i * c + j];
  return m;
}

void TextRecord::write(std::ostream& os, const std::string& header) const {
  os << header << '\n';
  for (const auto& k : order_) os << k << " = " << values_.at(k) << '\n';
}

TextRecord TextRecord::read(std::istream& is, const std::string& header) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != header)
    throw Error(ErrorCode::ParseError, "expected header '" + header + "'");
  TextRecord rec;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty() || rec.values_.count(key))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty or duplicate key");
    rec.order_.push_back(key);
    rec.values_[key] = trim(t.substr(eq + 1));
  }
  return rec;
}

void write_gam(TextRecord& rec, const std::string& p, const GamModel& m) {
  rec.put(p + "classes", static_cast<long long>(m.class_count));
  rec.put(p + "feature_kind", m.feature_kind.to_string());
  rec.put(p + "feature_h", m.feature_kind.h);
  rec.put(p + "intercepts", m.intercepts);
  rec.put(p + "iterations", static_cast<long long>(m.convergence.iterations));
  rec.put(p + "deviance", m.convergence.deviance);
  rec.put(p + "converged", static_cast<long long>(m.convergence.converged));
  rec.put(p + "separated", static_cast<long long>(m.convergence.separated));
  for (int k = 0; k < m.class_count; ++k) {
    const std::string b = p + "basis." + std::to_string(k) + ".";
    const SplineBasis& s = m.bases[k];
    rec.put(b + "linear", static_cast<long long>(s.linear_fallback));
    rec.put(b + "lo", s.lo);
    rec.put(b + "hi", s.hi);
    rec.put(b + "knots", s.knots);
    rec.put(b + "means", m.basis_means[k]);
  }
  for (int j = 0; j + 1 < m.class_count; ++j)
    for (int k = 0; k < m.class_count; ++k) {
      const std::string c = p + "coef." + std::to_string(j) + "." + std::to_string(k);
      rec.put(c, m.coefficients[j][k]);
      rec.put(p + "lambda." + std::to_string(j) + "." + std::to_string(k), m.lambda[j][k]);
    }
}

GamModel read_gam(const TextRecord& rec, const std::string& p) {
  GamModel m;
  m.class_count = static_cast<int>(rec.integer(p + "classes"));
  if (m.class_count < 2) throw Error(ErrorCode::ParseError, "model needs at least two classes");
  m.feature_kind = FeatureKind::parse(rec.text(p + "feature_kind"));
  if (m.feature_kind.tag == FeatureKind::Tag::LMD) m.feature_kind.h = rec.number(p + "feature_h");
  m.intercepts = rec.vector(p + "intercepts");
  if (m.intercepts.size() != m.class_count - 1) throw Error(ErrorCode::ParseError, "intercept count mismatch");
  m.convergence.iterations = static_cast<int>(rec.integer(p + "iterations"));
  m.convergence.deviance = rec.number(p + "deviance");
  m.convergence.converged = rec.integer(p + "converged") != 0;
  m.convergence.separated = rec.integer(p + "separated") != 0;
  for (int k = 0; k < m.class_count; ++k) {
    const std::string b = p + "basis." + std::to_string(k) + ".";
    SplineBasis s;
    s.linear_fallback = rec.integer(b + "linear") != 0;
    s.lo = rec.number(b + "lo");
    s.hi = rec.number(b + "hi");
    s.knots = rec.vector(b + "knots");
    s.degree = s.linear_fallback ? 1 : 3;
    s.n_basis = s.linear_fallback ? 2 : static_cast<int>(s.knots.size()) + 4;
    m.basis_means.push_back(rec.vector(b + "means"));
    if (m.basis_means.back().size() != s.n_basis) throw Error(ErrorCode::ParseError, "basis mean length mismatch");
    m.bases.push_back(std::move(s));
  }
  m.coefficients.assign(m.class_count - 1, {});
  m.lambda.assign(m.class_count - 1, std::vector<double>(m.class_count, 0.0));
  for (int j = 0; j + 1 < m.class_count; ++j)
    for (int k = 0; k < m.class_count; ++k) {
      Vector c = rec.vector(p + "coef." + std::to_string(j) + "." + std::to_string(k));
      if (c.size() != m.bases[k].n_basis - 1) throw Error(ErrorCode::ParseError, "coefficient length mismatch");
      m.coefficients[j].push_back(std::move(c));
      m.lambda[j][k] = rec.number(p + "lambda." + std::to_string(j) + "." + std::to_string(k));
    }
  return m;
}

void save_classifier(const FittedClassifier& clf, std::ostream& os) {
  TextRecord rec;
  const TrainConfig& c = clf.config;
  rec.put("dim", static_cast<long long>(clf.dim()));
  rec.put("classes", static_cast<long long>(clf.class_count()));
  rec.put("feature_kind", clf.feature_kind.to_string());
  rec.put("feature_h", clf.feature_kind.h);
  rec.put("scatter_mode", std::string(to_string(clf.diagnostics.chosen_mode)));
  rec.put("config.scatter", std::string(to_string(c.scatter)));
  rec.put("config.feature", std::string(to_string(c.feature)));
  rec.put("config.percentile", c.percentile);
  rec.put("config.shrink", c.shrink);
  rec.put("config.k0", c.k0);
  rec.put("config.r_stop", c.r_stop);
  rec.put("config.max_grid", static_cast<long long>(c.max_grid));
  rec.put("config.bootstrap_b", static_cast<long long>(c.bootstrap_b));
  rec.put("config.hdlss_b", static_cast<long long>(c.hdlss_b));
  rec.put("config.seed", std::to_string(c.seed));
  rec.put("config.mcd_coverage", c.mcd_coverage);
  rec.put("config.lambda_grid", c.gam.lambda_grid);
  rec.put("diagnostics.hdlss", static_cast<long long>(clf.diagnostics.hdlss));
  rec.put("diagnostics.h_grid", clf.diagnostics.h_grid);
  rec.put("diagnostics.bootstrap_errors", clf.diagnostics.bootstrap_errors);
  rec.put("diagnostics.skipped_resamples", static_cast<long long>(clf.diagnostics.skipped_resamples));
  rec.put("diagnostics.identity_error", clf.diagnostics.identity_error);
  rec.put("diagnostics.diagonal_error", clf.diagnostics.diagonal_error);
  for (int j = 0; j < clf.class_count(); ++j) {
    const std::string p = "scatter." + std::to_string(j) + ".";
    const ScatterModel& m = clf.models[j];
    rec.put(p + "location", m.location);
    rec.put(p + "scatter", m.scatter);
    rec.put(p + "ridge", m.ridge_used);
    rec.put(p + "clamped", static_cast<long long>(m.zero_variance_clamped));
    rec.put(p + "converged", static_cast<long long>(m.converged));
  }
  rec.put("class_names", static_cast<long long>(clf.class_names.size()));
  for (std::size_t j = 0; j < clf.class_names.size(); ++j) rec.put("class_name." + std::to_string(j), clf.class_names[j]);
  rec.put("rows.stored", static_cast<long long>(!clf.per_class_rows.empty()));
  for (std::size_t j = 0; j < clf.per_class_rows.size(); ++j)
    rec.put("rows." + std::to_string(j), Matrix(clf.per_class_rows[j]));
  write_gam(rec, "gam.", clf.gam);
  rec.write(os, kModelHeader);
}

FittedClassifier load_classifier(std::istream& is) {
  const TextRecord rec = TextRecord::read(is, kModelHeader);
  FittedClassifier clf;
  const int d = static_cast<int>(rec.integer("dim"));
  const int J = static_cast<int>(rec.integer("classes"));
  if (d < 1 || J < 2) throw Error(ErrorCode::ParseError, "bad model dimensions");
  clf.feature_kind = FeatureKind::parse(rec.text("feature_kind"));
  if (clf.feature_kind.tag == FeatureKind::Tag::LMD) clf.feature_kind.h = rec.number("feature_h");
  const ScatterMode mode = scatter_mode_from_string(rec.text("scatter_mode"));

  TrainConfig& c = clf.config;
  c.scatter = scatter_choice_from_string(rec.text("config.scatter"));
  c.feature = feature_choice_from_string(rec.text("config.feature"));
  c.percentile = rec.number("config.percentile");
  c.shrink = rec.number("config.shrink");
  c.k0 = rec.number("config.k0");
  c.r_stop = rec.number("config.r_stop");
  c.max_grid = static_cast<int>(rec.integer("config.max_grid"));
  c.bootstrap_b = static_cast<int>(rec.integer("config.bootstrap_b"));
  c.hdlss_b = static_cast<int>(rec.integer("config.hdlss_b"));
  try {
    c.seed = std::stoull(rec.text("config.seed"));
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad seed");
  }
  c.mcd_coverage = rec.number("config.mcd_coverage");
  c.gam.lambda_grid = rec.list("config.lambda_grid");

  Diagnostics& dg = clf.diagnostics;
  dg.chosen_mode = mode;
  dg.hdlss = rec.integer("diagnostics.hdlss") != 0;
  dg.h_grid = rec.list("diagnostics.h_grid");
  dg.bootstrap_errors = rec.list("diagnostics.bootstrap_errors");
  dg.skipped_resamples = static_cast<int>(rec.integer("diagnostics.skipped_resamples"));
  dg.identity_error = rec.number("diagnostics.identity_error");
  dg.diagonal_error = rec.number("diagnostics.diagonal_error");

  for (int j = 0; j < J; ++j) {
    const std::string p = "scatter." + std::to_string(j) + ".";
    ScatterModel m;
    m.class_id = j + 1;
    m.mode = mode;
    m.location = rec.vector(p + "location");
    m.scatter = rec.matrix(p + "scatter");
    if (m.location.size() != d || m.scatter.rows() != d || m.scatter.cols() != d)
      throw Error(ErrorCode::ParseError, "scatter model " + std::to_string(j) + " has the wrong dimension");
    m.ridge_used = rec.number(p + "ridge");
    m.zero_variance_clamped = rec.integer(p + "clamped") != 0;
    m.converged = rec.integer(p + "converged") != 0;
    finalize_scatter(m);
    clf.models.push_back(std::move(m));
  }
  const long long names = rec.integer("class_names");
  if (names != 0 && names != J) throw Error(ErrorCode::ParseError, "class name count differs from class count");
  for (long long j = 0; j < names; ++j) clf.class_names.push_back(rec.text("class_name." + std::to_string(j)));
  if (rec.integer("rows.stored") != 0) {
    for (int j = 0; j < J; ++j) {
      const Matrix r = rec.matrix("rows." + std::to_string(j));
      if (r.cols() != d) throw Error(ErrorCode::ParseError, "stored rows have the wrong dimension");
      clf.per_class_rows.emplace_back(r);
    }
  }
  if (clf.feature_kind.tag == FeatureKind::Tag::LMD && clf.per_class_rows.empty())
    throw Error(ErrorCode::ParseError, "LMD model without stored training rows");
  clf.gam = read_gam(rec, "gam.");
  if (clf.gam.class_count != J || !(clf.gam.feature_kind == clf.feature_kind))
    throw Error(ErrorCode::ParseError, "GAM block does not match the classifier header");
  return clf;
}

void save_classifier_file(const FittedClassifier& clf, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
  save_classifier(clf, os);
  if (!os) throw Error(ErrorCode::IoError, "write failed for " + path);
}

FittedClassifier load_classifier_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
  return load_classifier(is);
}

}  // namespace mdlmd
