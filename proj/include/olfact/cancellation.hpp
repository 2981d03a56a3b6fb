#pragma once

#include <optional>
#include <string>
#include <vector>

#include "olfact/apg.hpp"
#include "olfact/corpus.hpp"
#include "olfact/design.hpp"
#include "olfact/perceptmap.hpp"

namespace olfact {

/// Cancel m malodors at once with a row-sparse nonnegative mixture:
///
///   min_{W >= 0} 0.5*||Y_mal + A X_dict W||_F^2 + mu*||W||_{1,2}
///
/// With `white_family` the target is any matrix 1 c^T instead of zero; the
/// optimal c (column means of the residual) is eliminated in closed form by
/// centering every column of the residual.
struct CancellationProblem {
  Matrix y_mal;  ///< l x m malodor percepts
  Dictionary dict;
  PerceptualMap map;
  double mu = 0.0;
  bool white_family = false;
};

struct CancellationSolution {
  Matrix w;                      ///< n x m, elementwise >= 0
  std::vector<std::string> support;
  double residual_frobenius = 0.0;
  Vector residual_per_odor;      ///< length m
  std::optional<Vector> white_offset;
  long iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  double mu = 0.0;
  std::vector<double> objective_trace;
};

/// D = A X_dict, the percept of every dictionary compound (l x n).
Matrix dictionary_percepts(const PerceptualMap& map, const Dictionary& dict);

/// The problem in solver form (centered when white_family is set).
NonnegDesign cancellation_design(const CancellationProblem& p);

/// Throws DimensionMismatch, InvalidConfig, NoConvergence.
CancellationSolution solve_cancellation(const CancellationProblem& p,
                                        const SolverOptions& options = {});

struct ResidualReport {
  double frobenius = 0.0;
  Vector per_odor;
  Matrix residual;  ///< l x m, centered when white_family is set
};

ResidualReport residual_report(const CancellationProblem& p, const Matrix& w);
ResidualReport residual_report(const CancellationProblem& p, const CancellationSolution& sol);

/// Ids of the dictionary rows of W above the activity threshold.
std::vector<std::string> support_ids(const Dictionary& dict, const Matrix& w);

/// Subtracts each column's mean (the operator I - 11^T/l).
Matrix center_columns(const Matrix& m);

}  // namespace olfact
