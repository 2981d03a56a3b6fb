#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "olfact/apg.hpp"
#include "olfact/corpus.hpp"
#include "olfact/numerics.hpp"

namespace olfact {

/// Learned linear operator from physicochemical features to odor-descriptor
/// scores, fitted by nuclear-norm regularized least squares.
struct PerceptualMap {
  Matrix a;                 ///< l x k, acting on (optionally rescaled) features
  double lambda = 0.0;
  Vector singular_values;   ///< spectrum of `a`
  double train_rmse = 0.0;  ///< per-descriptor RMSE on the training set, averaged
  /// Per-feature divisor applied before `a` when fitted with standardization.
  std::optional<Vector> feature_scale;
  std::vector<std::string> feature_names;
  std::vector<std::string> descriptor_names;
  long iterations = 0;
  double kkt_residual = 0.0;

  Index feature_dim() const { return a.cols(); }
  Index percept_dim() const { return a.rows(); }

  /// The operator applied to raw feature vectors: a * diag(1/feature_scale).
  Matrix effective() const;

  /// Rank under the relative threshold 1e-6 * s[0].
  Index rank() const { return numerics::numerical_rank(singular_values); }
};

struct FitOptions {
  SolverOptions solver{};
  /// Divide each feature by its standard deviation over the training set.
  bool standardize = false;
};

/// Objective 0.5*||Y - A X||_F^2 + lambda*||A||_*.
double fit_objective(const Matrix& x, const Matrix& y, const Matrix& a, double lambda);

/// Accelerated proximal gradient with singular value thresholding, step
/// 1/sigma_max(X)^2. x is k x n, y is l x n. Throws DimensionMismatch,
/// NonFinite, InvalidConfig, NoConvergence.
PerceptualMap fit(const Matrix& x, const Matrix& y, double lambda, const FitOptions& options = {});

/// Full diagnostic variant exposing the objective trace.
PerceptualMap fit(const Matrix& x, const Matrix& y, double lambda, const FitOptions& options,
                  std::vector<double>* objective_trace);

/// Mean over descriptors of the per-descriptor RMSE of `predicted` vs `actual`
/// (both l x n).
double mean_descriptor_rmse(const Matrix& actual, const Matrix& predicted);

struct CvReport {
  Vector lambda_grid;
  Matrix fold_rmse;  ///< folds x grid
  Vector mean_rmse;
  double best_lambda = 0.0;
  Index folds = 0;
  std::uint64_t seed = 0;
};

/// Seeded fold assignment: a shuffled index list dealt round-robin.
std::vector<int> assign_folds(Index n, Index folds, std::uint64_t seed);

/// K-fold cross-validation over an increasing grid. Folds are evaluated
/// concurrently and reduced in fold order. Throws InvalidConfig.
CvReport cross_validate(const Matrix& x, const Matrix& y, std::span<const double> lambda_grid,
                        Index folds, std::uint64_t seed, const FitOptions& options = {});

/// Same, with an explicit fold label in [0, folds) per column.
CvReport cross_validate(const Matrix& x, const Matrix& y, std::span<const double> lambda_grid,
                        std::span<const int> fold_of, const FitOptions& options = {});

/// `count` points spaced logarithmically from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Parses "lo:hi:logN" or a comma-separated list; the result must be
/// strictly increasing. Throws InvalidConfig.
std::vector<double> parse_grid(const std::string& text);

/// A * x for one compound. Throws DimensionMismatch.
Vector predict_compound(const PerceptualMap& map, const Vector& features);

/// A * mix(dict, spec, normalize): the mixture is synthesized in feature
/// space before mapping.
Vector predict_mixture(const PerceptualMap& map, const Dictionary& dict, const MixtureSpec& spec,
                       bool normalize);

/// ||A x_a - A x_b||_2.
double perceptual_distance(const PerceptualMap& map, const Vector& features_a,
                           const Vector& features_b);

double perceptual_distance(const PerceptualMap& map, const Dictionary& dict,
                           const MixtureSpec& a, const MixtureSpec& b, bool normalize);

/// Joins compounds and percepts on id (in compound file order). Throws
/// DimensionMismatch or UnknownCompound when the id sets differ.
struct TrainingSet {
  Matrix x;
  Matrix y;
  std::vector<std::string> ids;
};
TrainingSet join_training(const CompoundSet& compounds, const PerceptSet& percepts);

}  // namespace olfact
