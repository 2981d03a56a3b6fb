#include "olfact/perceptmap.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "olfact/error.hpp"

namespace olfact {

Matrix PerceptualMap::effective() const {
  if (!feature_scale) return a;
  return a * feature_scale->cwiseInverse().asDiagonal();
}

double fit_objective(const Matrix& x, const Matrix& y, const Matrix& a, double lambda) {
  return 0.5 * (y - a * x).squaredNorm() + lambda * numerics::nuclear_norm(a);
}

double mean_descriptor_rmse(const Matrix& actual, const Matrix& predicted) {
  if (actual.rows() != predicted.rows() || actual.cols() != predicted.cols()) {
    throw DimensionMismatch("rmse: shape mismatch");
  }
  if (actual.cols() == 0 || actual.rows() == 0) return 0.0;
  const Matrix diff = actual - predicted;
  double total = 0.0;
  for (Index i = 0; i < diff.rows(); ++i) {
    total += std::sqrt(diff.row(i).squaredNorm() / static_cast<double>(diff.cols()));
  }
  return total / static_cast<double>(diff.rows());
}

PerceptualMap fit(const Matrix& x, const Matrix& y, double lambda, const FitOptions& options) {
  return fit(x, y, lambda, options, nullptr);
}

PerceptualMap fit(const Matrix& x_raw, const Matrix& y, double lambda, const FitOptions& options,
                  std::vector<double>* objective_trace) {
  if (x_raw.cols() != y.cols()) {
    throw DimensionMismatch("fit: features have " + std::to_string(x_raw.cols()) +
                            " columns, percepts have " + std::to_string(y.cols()));
  }
  if (x_raw.cols() == 0 || x_raw.rows() == 0 || y.rows() == 0) {
    throw DimensionMismatch("fit: empty training data");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidConfig("fit: lambda must be finite and nonnegative");
  }
  numerics::require_finite(x_raw, "fit features");
  numerics::require_finite(y, "fit percepts");

  PerceptualMap map;
  map.lambda = lambda;
  Matrix x = x_raw;
  if (options.standardize) {
    Vector scale(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      const double mean = x.row(i).mean();
      const double var = (x.row(i).array() - mean).square().mean();
      scale(i) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    x = scale.cwiseInverse().asDiagonal() * x;
    map.feature_scale = std::move(scale);
  }

  const Index l = y.rows();
  const Index k = x.rows();
  const Matrix gram = x * x.transpose();
  const Matrix yxt = y * x.transpose();
  const double lipschitz = std::pow(numerics::spectral_norm(x), 2);

  // Ties with the threshold are decided with a little slack: two SVDs of the
  // same matrix disagree in the last bits.
  if (lipschitz == 0.0 || lambda >= (1.0 - 1e-12) * numerics::spectral_norm(yxt)) {
    // Zero satisfies 0 in grad f(0) + lambda * subdiff ||.||_*(0).
    map.a = Matrix::Zero(l, k);
    if (objective_trace) objective_trace->push_back(0.5 * y.squaredNorm());
  } else {
    CompositeProblem problem;
    problem.smooth_value = [&](const Matrix& a) { return 0.5 * (y - a * x).squaredNorm(); };
    problem.smooth_gradient = [&](const Matrix& a) -> Matrix { return a * gram - yxt; };
    problem.prox = [lambda](const Matrix& v, double step, double& penalty) {
      double nn = 0.0;
      Matrix z = numerics::svt(v, step * lambda, nn);
      penalty = lambda * nn;
      return z;
    };
    problem.lipschitz = lipschitz;
    problem.kkt_scale = yxt.norm();
    SolverOptions solver = options.solver;
    solver.record_trace = objective_trace != nullptr;
    ApgResult r = minimize_composite(problem, Matrix::Zero(l, k), 0.0, solver, "fit");
    map.a = std::move(r.x);
    map.iterations = r.iterations;
    map.kkt_residual = r.kkt_residual;
    if (objective_trace) *objective_trace = std::move(r.trace);
  }
  map.singular_values = numerics::svd(map.a).s;
  map.train_rmse = mean_descriptor_rmse(y, map.a * x);
  return map;
}

// --- cross-validation ------------------------------------------------------

std::vector<int> assign_folds(Index n, Index folds, std::uint64_t seed) {
  if (folds < 2 || n < folds) throw InvalidConfig("cross-validation needs 2 <= folds <= n");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) {
    fold_of[static_cast<std::size_t>(order[i])] = static_cast<int>(static_cast<Index>(i) % folds);
  }
  return fold_of;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidConfig("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw InvalidConfig("lambda grid values must be finite and nonnegative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidConfig("lambda grid must be strictly increasing");
  }
}

Matrix select_columns(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

}  // namespace

CvReport cross_validate(const Matrix& x, const Matrix& y, std::span<const double> lambda_grid,
                        std::span<const int> fold_of, const FitOptions& options) {
  check_grid(lambda_grid);
  if (x.cols() != y.cols()) throw DimensionMismatch("cross_validate: column counts differ");
  if (static_cast<Index>(fold_of.size()) != x.cols()) {
    throw InvalidConfig("cross_validate: one fold label per compound required");
  }
  if (fold_of.empty()) throw InvalidConfig("cross_validate: no data");
  const int n_folds = *std::max_element(fold_of.begin(), fold_of.end()) + 1;
  if (n_folds < 2 || *std::min_element(fold_of.begin(), fold_of.end()) < 0) {
    throw InvalidConfig("cross_validate: fold labels must cover [0, folds) with folds >= 2");
  }
  std::vector<std::vector<Index>> train(static_cast<std::size_t>(n_folds));
  std::vector<std::vector<Index>> test(static_cast<std::size_t>(n_folds));
  for (std::size_t j = 0; j < fold_of.size(); ++j) {
    for (int f = 0; f < n_folds; ++f) {
      (fold_of[j] == f ? test : train)[static_cast<std::size_t>(f)].push_back(static_cast<Index>(j));
    }
  }
  for (int f = 0; f < n_folds; ++f) {
    if (test[static_cast<std::size_t>(f)].empty() || train[static_cast<std::size_t>(f)].empty()) {
      throw InvalidConfig("cross_validate: fold " + std::to_string(f) + " is empty");
    }
  }

  const Index g = static_cast<Index>(lambda_grid.size());
  auto run_fold = [&](int f) {
    const auto& tr = train[static_cast<std::size_t>(f)];
    const auto& te = test[static_cast<std::size_t>(f)];
    const Matrix x_tr = select_columns(x, tr);
    const Matrix y_tr = select_columns(y, tr);
    const Matrix x_te = select_columns(x, te);
    const Matrix y_te = select_columns(y, te);
    Vector row(g);
    for (Index i = 0; i < g; ++i) {
      const PerceptualMap m = fit(x_tr, y_tr, lambda_grid[static_cast<std::size_t>(i)], options);
      row(i) = mean_descriptor_rmse(y_te, m.effective() * x_te);
    }
    return row;
  };

  std::vector<std::future<Vector>> pending;
  for (int f = 0; f < n_folds; ++f) pending.push_back(std::async(std::launch::async, run_fold, f));

  CvReport report;
  report.lambda_grid = Eigen::Map<const Vector>(lambda_grid.data(), g);
  report.fold_rmse.resize(n_folds, g);
  for (int f = 0; f < n_folds; ++f) report.fold_rmse.row(f) = pending[static_cast<std::size_t>(f)].get().transpose();
  report.mean_rmse = report.fold_rmse.colwise().mean().transpose();
  Index best = 0;
  for (Index i = 1; i < g; ++i) {
    if (report.mean_rmse(i) < report.mean_rmse(best)) best = i;
  }
  report.best_lambda = report.lambda_grid(best);
  report.folds = n_folds;
  return report;
}

CvReport cross_validate(const Matrix& x, const Matrix& y, std::span<const double> lambda_grid,
                        Index folds, std::uint64_t seed, const FitOptions& options) {
  if (x.cols() != y.cols()) throw DimensionMismatch("cross_validate: column counts differ");
  const std::vector<int> fold_of = assign_folds(x.cols(), folds, seed);
  CvReport r = cross_validate(x, y, lambda_grid, fold_of, options);
  r.seed = seed;
  return r;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw InvalidConfig("log grid needs 0 < lo < hi and at least two points");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw InvalidConfig("");
      return v;
    } catch (const std::exception&) {
      throw InvalidConfig("invalid grid value '" + s + "' in '" + text + "'");
    }
  };
  std::vector<double> grid;
  const auto c1 = text.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.compare(c2 + 1, 3, "log") != 0) {
      throw InvalidConfig("grid must look like lo:hi:logN, got '" + text + "'");
    }
    const double lo = number(text.substr(0, c1));
    const double hi = number(text.substr(c1 + 1, c2 - c1 - 1));
    const double count = number(text.substr(c2 + 4));
    if (count != std::floor(count) || count < 2 || count > 10000) {
      throw InvalidConfig("grid point count must be an integer >= 2");
    }
    grid = log_grid(lo, hi, static_cast<int>(count));
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(number(item));
  }
  check_grid(grid);
  return grid;
}

// --- prediction --------------------------------------------------------------

Vector predict_compound(const PerceptualMap& map, const Vector& features) {
  if (features.size() != map.feature_dim()) {
    throw DimensionMismatch("predict: expected " + std::to_string(map.feature_dim()) +
                            " features, got " + std::to_string(features.size()));
  }
  return map.effective() * features;
}

Vector predict_mixture(const PerceptualMap& map, const Dictionary& dict, const MixtureSpec& spec,
                       bool normalize) {
  if (dict.feature_dim() != map.feature_dim()) {
    throw DimensionMismatch("predict: dictionary has " + std::to_string(dict.feature_dim()) +
                            " features, map expects " + std::to_string(map.feature_dim()));
  }
  return predict_compound(map, mix(dict, spec, normalize));
}

double perceptual_distance(const PerceptualMap& map, const Vector& features_a,
                           const Vector& features_b) {
  return (predict_compound(map, features_a) - predict_compound(map, features_b)).norm();
}

double perceptual_distance(const PerceptualMap& map, const Dictionary& dict,
                           const MixtureSpec& a, const MixtureSpec& b, bool normalize) {
  return (predict_mixture(map, dict, a, normalize) - predict_mixture(map, dict, b, normalize)).norm();
}

TrainingSet join_training(const CompoundSet& compounds, const PerceptSet& percepts) {
  if (percepts.records.empty()) throw DimensionMismatch("no percept records");
  if (compounds.records.size() != percepts.records.size()) {
    throw DimensionMismatch("compounds and percepts list different numbers of ids (" +
                        std::to_string(compounds.records.size()) + " vs " +
                        std::to_string(percepts.records.size()) + ")");
  }
  std::unordered_map<std::string, const PerceptRecord*> by_id;
  for (const auto& p : percepts.records) by_id.emplace(p.id, &p);
  TrainingSet out;
  const Index n = static_cast<Index>(compounds.records.size());
  out.x.resize(compounds.feature_dim(), n);
  out.y.resize(percepts.descriptor_dim(), n);
  for (Index j = 0; j < n; ++j) {
    const auto& c = compounds.records[static_cast<std::size_t>(j)];
    const auto it = by_id.find(c.id);
    if (it == by_id.end()) throw UnknownCompound("compound '" + c.id + "' has no percept record");
    out.x.col(j) = c.features;
    out.y.col(j) = it->second->scores;
    out.ids.push_back(c.id);
  }
  return out;
}

}  // namespace olfact
