#include "olfact/apg.hpp"

#include <cmath>
#include <limits>

#include "olfact/error.hpp"

namespace olfact {

namespace {
constexpr long kKktCheckPeriod = 10;
}  // namespace

double kkt_residual(const CompositeProblem& problem, const Matrix& x) {
  if (problem.lipschitz <= 0.0) return 0.0;
  const double step = 1.0 / problem.lipschitz;
  double g = 0.0;
  const Matrix grad = problem.smooth_gradient(x);
  const Matrix z = problem.prox(x - step * grad, step, g);
  const double scale = problem.kkt_scale > 0.0 ? problem.kkt_scale : 1.0;
  return problem.lipschitz * (x - z).norm() / scale;
}

ApgResult run_composite(const CompositeProblem& problem, const Matrix& x0, double g0,
                        const SolverOptions& options, const std::string& label) {
  if (!(options.tol > 0.0) || !(options.kkt_tol > 0.0) || options.max_iter < 1) {
    throw InvalidConfig(label + ": tol, kkt_tol and max_iter must be positive");
  }
  ApgResult out;
  out.x = x0;
  double fx = problem.smooth_value(x0) + g0;
  out.objective = fx;
  if (problem.lipschitz <= 0.0) {
    // f is constant along every direction the penalty allows; x0 is optimal.
    out.converged = true;
    return out;
  }
  const double step = 1.0 / problem.lipschitz;

  Matrix x = x0;
  Matrix y = x0;
  double t = 1.0;
  bool just_restarted = false;
  long since_check = 0;
  for (long it = 1; it <= options.max_iter; ++it) {
    out.iterations = it;
    double gz = 0.0;
    const Matrix z = problem.prox(y - step * problem.smooth_gradient(y), step, gz);
    const double fz = problem.smooth_value(z) + gz;

    if (fz <= fx) {
      const double decrease = fx - fz;
      const double rel = decrease / std::max(std::abs(fx), std::numeric_limits<double>::min());
      // Momentum is dropped when the step direction opposes the last move.
      const bool opposed = ((y - z).cwiseProduct(z - x)).sum() > 0.0;
      const double t_next = opposed ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      if (opposed) ++out.restarts;
      y = z + ((t - 1.0) / t_next) * (z - x);
      x = z;
      fx = fz;
      t = t_next;
      just_restarted = false;
      if (options.record_trace) out.trace.push_back(fx);
      // The KKT residual costs one extra gradient; evaluate it when progress
      // stalls and periodically (objectives tending to zero never stall).
      if (rel <= options.tol || ++since_check >= kKktCheckPeriod) {
        since_check = 0;
        const double kkt = kkt_residual(problem, x);
        if (kkt <= options.kkt_tol) {
          out.x = std::move(x);
          out.objective = fx;
          out.kkt_residual = kkt;
          out.converged = true;
          return out;
        }
      }
    } else {
      if (options.record_trace) out.trace.push_back(fx);
      if (just_restarted) {
        // A plain proximal-gradient step from x failed to decrease the
        // objective: x sits at the floating-point floor of the problem.
        out.x = std::move(x);
        out.objective = fx;
        out.kkt_residual = kkt_residual(problem, out.x);
        out.converged = true;
        return out;
      }
      ++out.restarts;
      t = 1.0;
      y = x;
      just_restarted = true;
    }
  }
  out.x = std::move(x);
  out.objective = fx;
  out.kkt_residual = kkt_residual(problem, out.x);
  return out;
}

ApgResult minimize_composite(const CompositeProblem& problem, const Matrix& x0, double g0,
                             const SolverOptions& options, const std::string& label) {
  ApgResult r = run_composite(problem, x0, g0, options, label);
  if (!r.converged) throw NoConvergence(label, options.max_iter, r.kkt_residual);
  return r;
}

}  // namespace olfact
