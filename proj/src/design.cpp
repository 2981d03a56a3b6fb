#include "olfact/design.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "olfact/error.hpp"

namespace olfact {

double group_norm(const Matrix& w) {
  double total = 0.0;
  for (Index i = 0; i < w.rows(); ++i) total += w.row(i).norm();
  return total;
}

double penalty_value(Penalty penalty, const Matrix& w) {
  switch (penalty) {
    case Penalty::group: return group_norm(w);
    case Penalty::l1: return w.cwiseAbs().sum();
    case Penalty::l2sq: return w.squaredNorm();
    case Penalty::none: return 0.0;
  }
  return 0.0;
}

double design_objective(const NonnegDesign& d, const Matrix& w) {
  return 0.5 * d.fidelity_weight * (d.offset + d.op * w).squaredNorm() +
         d.reg * penalty_value(d.penalty, w);
}

Matrix design_gradient(const NonnegDesign& d, const Matrix& w) {
  return d.fidelity_weight * (d.op.transpose() * (d.offset + d.op * w));
}

Matrix prox_penalty(Penalty penalty, const Matrix& v, double theta) {
  Matrix out(v.rows(), v.cols());
  switch (penalty) {
    case Penalty::group:
      for (Index i = 0; i < v.rows(); ++i) {
        out.row(i) = numerics::prox_nonneg_group(v.row(i).transpose(), theta).transpose();
      }
      break;
    case Penalty::l1:
      out = (v.array() - theta).max(0.0).matrix();
      break;
    case Penalty::l2sq:
      out = v.cwiseMax(0.0) / (1.0 + 2.0 * theta);
      break;
    case Penalty::none:
      out = v.cwiseMax(0.0);
      break;
  }
  return out;
}

double zero_threshold(const NonnegDesign& d) {
  const Matrix push = (-design_gradient(d, Matrix::Zero(d.op.cols(), d.offset.cols()))).cwiseMax(0.0);
  switch (d.penalty) {
    case Penalty::group: {
      double worst = 0.0;
      for (Index i = 0; i < push.rows(); ++i) worst = std::max(worst, push.row(i).norm());
      return worst;
    }
    case Penalty::l1:
      return push.size() ? push.maxCoeff() : 0.0;
    case Penalty::l2sq:
    case Penalty::none:
      return (push.size() == 0 || push.maxCoeff() == 0.0) ? 0.0
                                                          : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

namespace {

void validate(const NonnegDesign& d, const std::string& label) {
  if (d.offset.rows() != d.op.rows()) {
    throw DimensionMismatch(label + ": offset has " + std::to_string(d.offset.rows()) +
                            " rows, operator has " + std::to_string(d.op.rows()));
  }
  if (d.op.cols() == 0 || d.offset.cols() == 0) throw DimensionMismatch(label + ": empty problem");
  if (!(d.reg >= 0.0) || !std::isfinite(d.reg)) {
    throw InvalidConfig(label + ": regularization weight must be finite and nonnegative");
  }
  if (!(d.fidelity_weight > 0.0)) throw InvalidConfig(label + ": fidelity weight must be positive");
  numerics::require_finite(d.offset, label + " offset");
  numerics::require_finite(d.op, label + " operator");
}

CompositeProblem composite(const NonnegDesign& d) {
  CompositeProblem p;
  p.smooth_value = [&d](const Matrix& w) {
    return 0.5 * d.fidelity_weight * (d.offset + d.op * w).squaredNorm();
  };
  p.smooth_gradient = [&d](const Matrix& w) -> Matrix { return design_gradient(d, w); };
  p.prox = [&d](const Matrix& v, double step, double& g) {
    Matrix z = prox_penalty(d.penalty, v, step * d.reg);
    g = d.reg * penalty_value(d.penalty, z);
    return z;
  };
  const double s = d.op.size() ? numerics::spectral_norm(d.op) : 0.0;
  p.lipschitz = d.fidelity_weight * s * s;
  // Gradient components pointing out of the orthant never matter; the
  // largest row of the inward push at zero sets the problem's scale.
  const Matrix push = (-design_gradient(d, Matrix::Zero(d.op.cols(), d.offset.cols()))).cwiseMax(0.0);
  const double scale = push.size() ? push.rowwise().norm().maxCoeff() : 0.0;
  p.kkt_scale = scale > 0.0 ? scale : 1.0;
  return p;
}

}  // namespace

double design_kkt_residual(const NonnegDesign& d, const Matrix& w) {
  return kkt_residual(composite(d), w);
}

namespace {

constexpr double kFirstStageKkt = 1e-4;
constexpr long kFirstStageBudget = 1000;
constexpr int kMaxNewtonSteps = 200;
constexpr int kMaxActiveSetRounds = 100;
constexpr int kLargeFaceSteps = 10;
constexpr long kGreedyBudget = 2000;

/// Newton steps on the face {W_ij > 0} of the orthant, where every penalty
/// is smooth. Entries driven to zero leave the face. Each accepted step
/// strictly lowers the objective and is appended to `trace`. Every step
/// spends one unit of `budget`.
void newton_on_face(const NonnegDesign& d, Matrix& w, double& objective, std::vector<double>* trace,
                    long& budget) {
  const Index n = w.rows();
  const Index m = w.cols();
  const double c = d.fidelity_weight;
  const Matrix gram = d.op.transpose() * d.op;

  for (int step = 0; step < kMaxNewtonSteps && budget > 0; ++step) {
    --budget;
    std::vector<std::pair<Index, Index>> face;
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < n; ++i) {
        if (w(i, j) > 0.0) face.emplace_back(i, j);
      }
    }
    if (face.empty()) return;
    const auto nf = static_cast<Index>(face.size());
    // Dense Newton is expensive while the support is still far too large.
    if (nf > 2 * d.op.rows() * m + 16 && step >= kLargeFaceSteps) return;
    const Vector row_norm = w.rowwise().norm();

    const Matrix full_grad = design_gradient(d, w);
    Vector g(nf);
    Matrix h = Matrix::Zero(nf, nf);
    for (Index a = 0; a < nf; ++a) {
      const auto [i, j] = face[static_cast<std::size_t>(a)];
      g(a) = full_grad(i, j);
      switch (d.penalty) {
        case Penalty::group: g(a) += d.reg * w(i, j) / row_norm(i); break;
        case Penalty::l1: g(a) += d.reg; break;
        case Penalty::l2sq: g(a) += 2.0 * d.reg * w(i, j); break;
        case Penalty::none: break;
      }
      for (Index b = 0; b < nf; ++b) {
        const auto [i2, j2] = face[static_cast<std::size_t>(b)];
        if (j == j2) h(a, b) = c * gram(i, i2);
        if (i == i2) {
          if (d.penalty == Penalty::group) {
            const double r = row_norm(i);
            h(a, b) += d.reg * ((j == j2 ? 1.0 / r : 0.0) - w(i, j) * w(i, j2) / (r * r * r));
          } else if (d.penalty == Penalty::l2sq && j == j2) {
            h(a, b) += 2.0 * d.reg;
          }
        }
      }
    }
    const Vector dir = -Eigen::CompleteOrthogonalDecomposition<Matrix>(h).solve(g);
    const double slope = g.dot(dir);
    if (!(slope < 0.0) || !dir.allFinite()) return;
    if (-slope <= 1e-15 * std::abs(objective)) return;

    // Projected arc first: it can retire many entries at once.
    bool accepted = false;
    Matrix trial;
    double alpha = 1.0;
    for (int half = 0; half < 30 && !accepted; ++half, alpha *= 0.5) {
      trial = w;
      for (Index a = 0; a < nf; ++a) {
        const auto [i, j] = face[static_cast<std::size_t>(a)];
        trial(i, j) = std::max(0.0, w(i, j) + alpha * dir(a));
      }
      const double ft = design_objective(d, trial);
      if (ft < objective && ft <= objective + 1e-4 * alpha * slope) {
        objective = ft;
        accepted = true;
      }
    }
    if (!accepted) {
      // Fall back to the feasible segment, stopping at the first entry to
      // reach zero.
      double alpha_max = std::numeric_limits<double>::infinity();
      Index blocking = -1;
      for (Index a = 0; a < nf; ++a) {
        if (dir(a) < 0.0) {
          const auto [i, j] = face[static_cast<std::size_t>(a)];
          const double lim = -w(i, j) / dir(a);
          if (lim < alpha_max) {
            alpha_max = lim;
            blocking = a;
          }
        }
      }
      alpha = std::min(1.0, alpha_max);
      for (int half = 0; half < 40 && !accepted; ++half) {
        trial = w;
        for (Index a = 0; a < nf; ++a) {
          const auto [i, j] = face[static_cast<std::size_t>(a)];
          trial(i, j) = std::max(0.0, w(i, j) + alpha * dir(a));
        }
        if (alpha == alpha_max && blocking >= 0) {
          const auto [i, j] = face[static_cast<std::size_t>(blocking)];
          trial(i, j) = 0.0;
        }
        const double ft = design_objective(d, trial);
        if (ft < objective) {
          objective = ft;
          accepted = true;
        }
        alpha *= 0.5;
      }
    }
    if (!accepted) return;
    w = std::move(trial);
    if (trace) trace->push_back(objective);
  }
}

/// How far row i of W is from satisfying its optimality condition (entries
/// at zero only), given the fidelity gradient g.
double row_violation(const NonnegDesign& d, const Matrix& w, const Matrix& g, Index i) {
  if (d.penalty == Penalty::group && w.row(i).maxCoeff() == 0.0) {
    return (-g.row(i)).cwiseMax(0.0).norm() - d.reg;
  }
  const double push = d.penalty == Penalty::l1 ? d.reg : 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < w.cols(); ++j) {
    if (w(i, j) == 0.0) worst = std::max(worst, -(g(i, j) + push));
  }
  return worst;
}

/// Exact minimization of the objective over row i alone (the fidelity is
/// isotropic in a row). Keeps the residual r = offset + op*W current.
bool minimize_row(const NonnegDesign& d, Matrix& w, Matrix& r, Index i) {
  const double c = d.fidelity_weight;
  const double li = c * d.op.col(i).squaredNorm();
  if (!(li > 0.0)) return false;
  const Matrix gi = c * (d.op.col(i).transpose() * r);
  const Matrix next = prox_penalty(d.penalty, w.row(i) - gi / li, d.reg / li);
  r += d.op.col(i) * (next - w.row(i));
  w.row(i) = next;
  return true;
}

/// Row minimization on every row where a zero entry violates its
/// optimality condition. Returns false when no row qualifies.
bool enter_violators(const NonnegDesign& d, Matrix& w, double& objective, double slack) {
  Matrix r = d.offset + d.op * w;
  const Matrix g = d.fidelity_weight * (d.op.transpose() * r);
  bool any = false;
  for (Index i = 0; i < w.rows(); ++i) {
    if (row_violation(d, w, g, i) > slack) any = minimize_row(d, w, r, i) || any;
  }
  if (any) objective = design_objective(d, w);
  return any;
}

/// Greedy active-set method from W = 0: enter the worst violating row, solve
/// on the face, repeat. Suited to small optimal supports, where the gradient
/// method crawls on badly conditioned operators. Returns the iterations spent.
long grow_active_set(const NonnegDesign& d, const CompositeProblem& p, double kkt_tol, Matrix& w,
                     double& objective, long budget) {
  const long start = budget;
  const double slack = 1e-13 * p.kkt_scale;
  w.setZero();
  objective = design_objective(d, w);
  while (budget > 0) {
    --budget;
    Matrix r = d.offset + d.op * w;
    const Matrix g = d.fidelity_weight * (d.op.transpose() * r);
    Index worst = -1;
    double worst_v = slack;
    for (Index i = 0; i < w.rows(); ++i) {
      const double v = row_violation(d, w, g, i);
      if (v > worst_v) {
        worst_v = v;
        worst = i;
      }
    }
    if (worst < 0 || !minimize_row(d, w, r, worst)) break;
    const double entered = design_objective(d, w);
    if (!(entered < objective)) break;
    objective = entered;
    newton_on_face(d, w, objective, nullptr, budget);
    if (kkt_residual(p, w) <= kkt_tol) break;
    // Past this size the face solve is capped and the method loses its edge.
    if (static_cast<Index>(active_rows(w).size()) * w.cols() > 2 * d.op.rows() * w.cols() + 16) break;
  }
  return start - budget;
}

/// Alternates Newton solves on the current face with row updates that let
/// violating entries in, until the KKT test passes, progress stops or the
/// iteration budget runs out. Returns the iterations spent.
long refine_active_set(const NonnegDesign& d, const CompositeProblem& p, double kkt_tol, Matrix& w,
                       double& objective, std::vector<double>* trace, long budget) {
  const long start = budget;
  const double slack = 1e-13 * p.kkt_scale;
  for (int round = 0; round < kMaxActiveSetRounds && budget > 0; ++round) {
    newton_on_face(d, w, objective, trace, budget);
    if (kkt_residual(p, w) <= kkt_tol || budget == 0) break;
    --budget;
    const double before = objective;
    if (!enter_violators(d, w, objective, slack)) break;
    if (!(objective <= before)) break;
    if (trace) trace->push_back(objective);
  }
  return start - budget;
}

}  // namespace

DesignResult solve_nonneg_design(const NonnegDesign& d, const SolverOptions& options,
                                 const std::string& label) {
  validate(d, label);
  if (!(options.kkt_tol > 0.0) || options.max_iter < 1) {
    throw InvalidConfig(label + ": kkt_tol and max_iter must be positive");
  }
  const Matrix zero = Matrix::Zero(d.op.cols(), d.offset.cols());
  DesignResult out;
  if (d.reg >= zero_threshold(d)) {
    out.w = zero;
    out.objective = design_objective(d, zero);
    out.zero_certified = true;
    if (options.record_trace) out.trace.push_back(out.objective);
    return out;
  }
  const CompositeProblem p = composite(d);
  std::vector<double>* trace = options.record_trace ? &out.trace : nullptr;

  // Accelerated gradient identifies the support, then the active-set
  // refinement finishes the job. A stage that fails the KKT test resumes the
  // gradient method from the refined point with a tighter target and a
  // larger iteration budget.
  Matrix w = zero;
  double stage_tol = std::max(options.kkt_tol, kFirstStageKkt);
  long budget = kFirstStageBudget;
  bool tried_greedy = false;
  for (;;) {
    SolverOptions so = options;
    so.kkt_tol = stage_tol;
    so.max_iter = std::min(options.max_iter - out.iterations, budget);
    ApgResult r = run_composite(p, w, d.reg * penalty_value(d.penalty, w), so, label);
    out.iterations += r.iterations;
    out.restarts += r.restarts;
    if (trace) trace->insert(trace->end(), r.trace.begin(), r.trace.end());

    Matrix refined = r.x;
    double f = r.objective;
    out.iterations += refine_active_set(d, p, options.kkt_tol, refined, f, trace,
                                        options.max_iter - out.iterations);
    const double kkt = kkt_residual(p, refined);
    const bool floor = r.converged && r.kkt_residual > stage_tol && stage_tol <= options.kkt_tol;
    if (kkt <= options.kkt_tol || r.kkt_residual <= options.kkt_tol || floor) {
      if (kkt <= r.kkt_residual) {
        out.w = std::move(refined);
        out.objective = f;
        out.kkt_residual = kkt;
      } else {
        out.w = std::move(r.x);
        out.objective = r.objective;
        out.kkt_residual = r.kkt_residual;
      }
      return out;
    }
    if (!tried_greedy && out.iterations < options.max_iter) {
      tried_greedy = true;
      Matrix g = zero;
      double fg = 0.0;
      out.iterations += grow_active_set(d, p, options.kkt_tol, g, fg,
                                        std::min(kGreedyBudget, options.max_iter - out.iterations));
      const double kg = kkt_residual(p, g);
      if (kg <= options.kkt_tol) {
        if (trace && (trace->empty() || fg <= trace->back())) trace->push_back(fg);
        out.w = std::move(g);
        out.objective = fg;
        out.kkt_residual = kg;
        return out;
      }
    }
    if (out.iterations >= options.max_iter) {
      throw NoConvergence(label, options.max_iter, std::min(kkt, r.kkt_residual));
    }
    w = std::move(refined);
    if (r.converged) stage_tol = std::max(options.kkt_tol, stage_tol * 1e-2);
    budget *= 2;
  }
}

std::vector<Index> active_rows(const Matrix& w) {
  std::vector<Index> rows;
  if (w.size() == 0) return rows;
  const double top = w.maxCoeff();
  if (!(top > 0.0)) return rows;
  const double cut = 1e-8 * top;
  for (Index i = 0; i < w.rows(); ++i) {
    if (w.row(i).maxCoeff() > cut) rows.push_back(i);
  }
  return rows;
}

}  // namespace olfact
