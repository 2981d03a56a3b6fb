#pragma once

#include <string>
#include <vector>

#include "olfact/apg.hpp"
#include "olfact/numerics.hpp"

namespace olfact {

/// Penalty on a nonnegative weight matrix W (n x m).
enum class Penalty {
  group,  ///< sum of row l2 norms (simultaneous sparsity across columns)
  l1,     ///< sum of entries
  l2sq,   ///< squared Frobenius norm
  none,
};

/// min over W >= 0 of  (fidelity_weight/2) * ||offset + op * W||_F^2 + reg * penalty(W)
///
/// Every design problem in the library (cancellation, steganography,
/// filtering) reduces to this form and runs through one solver.
struct NonnegDesign {
  Matrix offset;  ///< l x m
  Matrix op;      ///< l x n
  double fidelity_weight = 1.0;
  Penalty penalty = Penalty::group;
  double reg = 0.0;
};

struct DesignResult {
  Matrix w;  ///< n x m, elementwise >= 0
  double objective = 0.0;
  double kkt_residual = 0.0;
  long iterations = 0;
  long restarts = 0;
  bool zero_certified = false;  ///< W = 0 returned by the first-order zero test
  std::vector<double> trace;
};

double penalty_value(Penalty penalty, const Matrix& w);
double design_objective(const NonnegDesign& d, const Matrix& w);
Matrix design_gradient(const NonnegDesign& d, const Matrix& w);

/// Applies the penalty's nonnegative proximal operator with threshold theta.
Matrix prox_penalty(Penalty penalty, const Matrix& v, double theta);

/// Smallest reg for which W = 0 is optimal (0 for l2sq and none when the
/// zero point is optimal at all, +inf when it never is).
double zero_threshold(const NonnegDesign& d);

/// Sum of row l2 norms.
double group_norm(const Matrix& w);

/// Throws DimensionMismatch, NonFinite, InvalidConfig, NoConvergence.
DesignResult solve_nonneg_design(const NonnegDesign& d, const SolverOptions& options,
                                 const std::string& label);

/// Relative KKT residual of W for the design problem.
double design_kkt_residual(const NonnegDesign& d, const Matrix& w);

/// Rows (or entries, for a vector) with any weight above 1e-8 * max(W).
std::vector<Index> active_rows(const Matrix& w);

}  // namespace olfact
