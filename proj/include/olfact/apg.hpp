#pragma once

#include <functional>
#include <string>
#include <vector>

#include "olfact/numerics.hpp"

namespace olfact {

/// Stopping rule shared by every proximal-gradient solver in the library.
///
/// The solver stops once the relative gradient-mapping norm is at most
/// `kkt_tol`. That check runs whenever an accepted iteration decreases the
/// objective by less than `tol` (relative) and every 10th accepted iteration.
/// Reaching `max_iter` first throws NoConvergence.
struct SolverOptions {
  double tol = 1e-9;
  double kkt_tol = 1e-9;
  long max_iter = 50000;
  bool record_trace = false;
};

/// Composite problem min f(x) + g(x) with f smooth (gradient Lipschitz
/// constant `lipschitz`) and g prox-friendly.
struct CompositeProblem {
  std::function<double(const Matrix&)> smooth_value;
  std::function<Matrix(const Matrix&)> smooth_gradient;
  /// Returns prox_{step*g}(v) and writes g at the returned point.
  std::function<Matrix(const Matrix&, double step, double& penalty_value)> prox;
  double lipschitz = 0.0;
  /// Normalizer of the KKT residual, typically ||grad f(0)||_F.
  double kkt_scale = 1.0;
};

struct ApgResult {
  Matrix x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  long iterations = 0;
  long restarts = 0;
  bool converged = false;  ///< false when max_iter ran out
  std::vector<double> trace;  ///< objective after every iteration, if requested
};

/// Relative gradient-mapping norm L*||x - prox(x - grad f(x)/L)|| / kkt_scale.
double kkt_residual(const CompositeProblem& problem, const Matrix& x);

/// Monotone FISTA with function-value and gradient restarts, started from `x0` where the
/// penalty takes value `g0`. The objective sequence is nonincreasing.
ApgResult minimize_composite(const CompositeProblem& problem, const Matrix& x0, double g0,
                             const SolverOptions& options, const std::string& label);

/// Same iteration, but running out of iterations returns the last iterate
/// with `converged` unset instead of throwing.
ApgResult run_composite(const CompositeProblem& problem, const Matrix& x0, double g0,
                        const SolverOptions& options, const std::string& label);

}  // namespace olfact
