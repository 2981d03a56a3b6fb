#include "olfact/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "olfact/csv.hpp"
#include "olfact/error.hpp"

namespace olfact::io {

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw ParseError(source, 0, 0, what);
}

const Json& field(const Json& j, const std::string& source, std::string_view name) {
  if (!j.is_object()) fail(source, "expected a JSON object");
  auto it = j.find(std::string(name));
  if (it == j.end()) fail(source, "missing field '" + std::string(name) + "'");
  return *it;
}

double number(const Json& j, const std::string& source, std::string_view name) {
  const Json& v = field(j, source, name);
  if (!v.is_number()) fail(source, "field '" + std::string(name) + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(source, "field '" + std::string(name) + "' is not finite");
  return x;
}

long integer(const Json& j, const std::string& source, std::string_view name) {
  const Json& v = field(j, source, name);
  if (!v.is_number_integer()) fail(source, "field '" + std::string(name) + "' must be an integer");
  return v.get<long>();
}

std::vector<std::string> strings(const Json& j, const std::string& source, std::string_view name) {
  const Json& v = field(j, source, name);
  if (!v.is_array()) fail(source, "field '" + std::string(name) + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) fail(source, "field '" + std::string(name) + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Json matrix_rows(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

Matrix matrix_from_rows(const Json& j, const std::string& source, std::string_view name,
                        Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    fail(source, "field '" + std::string(name) + "' must have " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Vector r = vector_from_json(j[static_cast<std::size_t>(i)], source, name);
    if (r.size() != cols) {
      fail(source, "field '" + std::string(name) + "' row " + std::to_string(i + 1) + " must have " +
                       std::to_string(cols) + " entries");
    }
    m.row(i) = r.transpose();
  }
  return m;
}

}  // namespace

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Vector vector_from_json(const Json& j, const std::string& source, std::string_view name) {
  if (!j.is_array()) fail(source, "field '" + std::string(name) + "' must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(source, "field '" + std::string(name) + "' must hold numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
    if (!std::isfinite(v(static_cast<Index>(i)))) {
      fail(source, "field '" + std::string(name) + "' holds a non-finite value");
    }
  }
  return v;
}

Json map_to_json(const PerceptualMap& map) {
  Json j;
  j["k"] = map.feature_dim();
  j["l"] = map.percept_dim();
  j["lambda"] = map.lambda;
  Json flat = Json::array();
  for (Index i = 0; i < map.a.rows(); ++i) {
    for (Index c = 0; c < map.a.cols(); ++c) flat.push_back(map.a(i, c));
  }
  j["a"] = std::move(flat);
  j["singular_values"] = to_json(map.singular_values);
  j["rank"] = map.rank();
  j["train_rmse"] = map.train_rmse;
  j["feature_scale"] = map.feature_scale ? to_json(*map.feature_scale) : Json(nullptr);
  j["descriptors"] = map.descriptor_names;
  j["features"] = map.feature_names;
  j["iterations"] = map.iterations;
  j["kkt_residual"] = map.kkt_residual;
  return j;
}

PerceptualMap map_from_json(const Json& j, const std::string& source) {
  PerceptualMap m;
  const long k = integer(j, source, "k");
  const long l = integer(j, source, "l");
  if (k < 1 || l < 1) fail(source, "k and l must be positive");
  m.lambda = number(j, source, "lambda");
  const Vector flat = vector_from_json(field(j, source, "a"), source, "a");
  if (flat.size() != k * l) fail(source, "field 'a' must hold k*l row-major entries");
  m.a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), l, k);
  m.singular_values = vector_from_json(field(j, source, "singular_values"), source, "singular_values");
  m.train_rmse = number(j, source, "train_rmse");
  const Json& scale = field(j, source, "feature_scale");
  if (!scale.is_null()) {
    Vector s = vector_from_json(scale, source, "feature_scale");
    if (s.size() != k) fail(source, "feature_scale must have k entries");
    if ((s.array() <= 0.0).any()) fail(source, "feature_scale entries must be positive");
    m.feature_scale = std::move(s);
  }
  m.descriptor_names = strings(j, source, "descriptors");
  m.feature_names = strings(j, source, "features");
  if (static_cast<long>(m.descriptor_names.size()) != l) fail(source, "descriptors must have l names");
  if (static_cast<long>(m.feature_names.size()) != k) fail(source, "features must have k names");
  if (j.contains("iterations")) m.iterations = integer(j, source, "iterations");
  if (j.contains("kkt_residual")) m.kkt_residual = number(j, source, "kkt_residual");
  return m;
}

PerceptualMap load_map(const std::string& path) {
  return map_from_json(read_json(path), path);
}

Json cv_to_json(const CvReport& cv) {
  Json j;
  j["folds"] = cv.folds;
  j["seed"] = cv.seed;
  j["lambda_grid"] = to_json(cv.lambda_grid);
  j["mean_rmse"] = to_json(cv.mean_rmse);
  j["fold_rmse"] = matrix_rows(cv.fold_rmse);
  j["best_lambda"] = cv.best_lambda;
  return j;
}

CvReport cv_from_json(const Json& j, const std::string& source) {
  CvReport cv;
  cv.folds = integer(j, source, "folds");
  const Json& seed = field(j, source, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail(source, "seed must be an integer");
  cv.seed = seed.get<std::uint64_t>();
  cv.lambda_grid = vector_from_json(field(j, source, "lambda_grid"), source, "lambda_grid");
  cv.mean_rmse = vector_from_json(field(j, source, "mean_rmse"), source, "mean_rmse");
  if (cv.mean_rmse.size() != cv.lambda_grid.size()) fail(source, "mean_rmse must match lambda_grid");
  cv.fold_rmse = matrix_from_rows(field(j, source, "fold_rmse"), source, "fold_rmse", cv.folds,
                                  cv.lambda_grid.size());
  cv.best_lambda = number(j, source, "best_lambda");
  return cv;
}

Json cancellation_to_json(const CancellationSolution& sol, const Dictionary& dict) {
  Json j;
  Json weights = Json::object();
  for (Index i = 0; i < dict.size(); ++i) {
    weights[dict.ids()[static_cast<std::size_t>(i)]] = to_json(Vector(sol.w.row(i).transpose()));
  }
  j["mu"] = sol.mu;
  j["support"] = sol.support;
  j["residual_frobenius"] = sol.residual_frobenius;
  j["residual_per_odor"] = to_json(sol.residual_per_odor);
  j["white_offset"] = sol.white_offset ? to_json(*sol.white_offset) : Json(nullptr);
  j["group_norm"] = group_norm(sol.w);
  j["objective"] = sol.objective;
  j["kkt_residual"] = sol.kkt_residual;
  j["iterations"] = sol.iterations;
  j["weights"] = std::move(weights);
  return j;
}

StoredCancellation cancellation_from_json(const Json& j, const std::string& source) {
  StoredCancellation s;
  s.mu = number(j, source, "mu");
  s.support = strings(j, source, "support");
  s.residual_frobenius = number(j, source, "residual_frobenius");
  s.residual_per_odor =
      vector_from_json(field(j, source, "residual_per_odor"), source, "residual_per_odor");
  const Json& off = field(j, source, "white_offset");
  if (!off.is_null()) s.white_offset = vector_from_json(off, source, "white_offset");
  const Json& w = field(j, source, "weights");
  if (!w.is_object()) fail(source, "weights must be an object keyed by compound id");
  const Index m = s.residual_per_odor.size();
  s.w.resize(static_cast<Index>(w.size()), m);
  Index i = 0;
  for (auto it = w.begin(); it != w.end(); ++it, ++i) {
    s.ids.push_back(it.key());
    const Vector row = vector_from_json(it.value(), source, "weights");
    if (row.size() != m) fail(source, "weights of '" + it.key() + "' must have one entry per malodor");
    s.w.row(i) = row.transpose();
  }
  return s;
}

Json additive_to_json(const AdditiveSolution& sol) {
  Json j;
  Json weights = Json::object();
  for (std::size_t i = 0; i < sol.ids.size(); ++i) {
    weights[sol.ids[i]] = sol.weights(static_cast<Index>(i));
  }
  j["support"] = sol.support;
  j["residual_l2"] = sol.residual_l2;
  j["objective"] = sol.objective;
  j["kkt_residual"] = sol.kkt_residual;
  j["iterations"] = sol.iterations;
  j["weights"] = std::move(weights);
  return j;
}

AdditiveSolution additive_from_json(const Json& j, const std::string& source) {
  AdditiveSolution s;
  s.support = strings(j, source, "support");
  s.residual_l2 = number(j, source, "residual_l2");
  s.objective = number(j, source, "objective");
  s.kkt_residual = number(j, source, "kkt_residual");
  s.iterations = integer(j, source, "iterations");
  const Json& w = field(j, source, "weights");
  if (!w.is_object()) fail(source, "weights must be an object keyed by id");
  s.weights.resize(static_cast<Index>(w.size()));
  Index i = 0;
  for (auto it = w.begin(); it != w.end(); ++it, ++i) {
    if (!it.value().is_number()) fail(source, "weight of '" + it.key() + "' must be a number");
    s.ids.push_back(it.key());
    s.weights(i) = it.value().get<double>();
  }
  return s;
}

Json scenario_to_json(const EnvironmentScenario& s) {
  Json j;
  Json segs = Json::array();
  for (const auto& seg : s.segments) {
    Json e;
    e["steps"] = seg.steps;
    e["x_in"] = to_json(seg.x_in);
    e["y_des"] = to_json(seg.y_des);
    segs.push_back(std::move(e));
  }
  j["segments"] = std::move(segs);
  j["seed"] = s.seed;
  j["jitter_sigma"] = s.jitter_sigma;
  return j;
}

EnvironmentScenario scenario_from_json(const Json& j, const std::string& source) {
  EnvironmentScenario s;
  const Json& segs = field(j, source, "segments");
  if (!segs.is_array() || segs.empty()) fail(source, "segments must be a non-empty array");
  for (const auto& e : segs) {
    ScenarioSegment seg;
    seg.steps = integer(e, source, "steps");
    if (seg.steps < 1) fail(source, "segment steps must be at least 1");
    seg.x_in = vector_from_json(field(e, source, "x_in"), source, "x_in");
    seg.y_des = vector_from_json(field(e, source, "y_des"), source, "y_des");
    if (!s.segments.empty() && (seg.x_in.size() != s.segments.front().x_in.size() ||
                                seg.y_des.size() != s.segments.front().y_des.size())) {
      throw DimensionMismatch(source + ": segments disagree on dimensions");
    }
    s.segments.push_back(std::move(seg));
  }
  if (j.contains("seed")) {
    const Json& seed = j["seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      fail(source, "seed must be a nonnegative integer");
    }
    s.seed = seed.get<std::uint64_t>();
  }
  if (j.contains("jitter_sigma")) {
    s.jitter_sigma = number(j, source, "jitter_sigma");
    if (s.jitter_sigma < 0.0) fail(source, "jitter_sigma must be nonnegative");
  }
  return s;
}

EnvironmentScenario load_scenario(const std::string& path) {
  return scenario_from_json(read_json(path), path);
}

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    fail(path, std::string("malformed JSON: ") + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

void write_json(const std::string& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_run_csv(const std::string& path, const AdaptiveRun& run, std::string_view comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  csv::write_comment(out, comment);
  const Index n = run.final_w.size();
  std::vector<std::string> header = {"t", "residual"};
  for (Index i = 0; i < n; ++i) header.push_back("w_" + std::to_string(i + 1));
  csv::write_row(out, header);
  for (std::size_t t = 0; t < run.w_trajectory.size(); ++t) {
    std::vector<std::string> row = {std::to_string(t), csv::format_real(run.residual_trajectory[t])};
    for (Index i = 0; i < n; ++i) row.push_back(csv::format_real(run.w_trajectory[t](i)));
    csv::write_row(out, row);
  }
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace olfact::io
