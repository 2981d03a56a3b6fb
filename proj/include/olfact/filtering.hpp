#pragma once

#include <cstdint>
#include <vector>

#include "olfact/apg.hpp"
#include "olfact/corpus.hpp"
#include "olfact/perceptmap.hpp"
#include "olfact/steganography.hpp"

namespace olfact {

/// Static filter: steer the percept of an ambient input toward a target,
///
///   min_{w >= 0} ||A x_in + A X_dict w - y_des||_2^2 + mu * J(w)
struct FilterProblem {
  Vector x_in;   ///< ambient physicochemical input, length k
  Vector y_des;  ///< desired percept, length l
  Dictionary dict;
  PerceptualMap map;
  double mu = 0.0;
  Regularizer regularizer = Regularizer::l1;
};

NonnegDesign filter_design(const FilterProblem& p);

/// Throws DimensionMismatch, InvalidConfig, NoConvergence.
AdditiveSolution solve_filter(const FilterProblem& p, const SolverOptions& options = {});

struct LmsUpdate {
  Vector w;
  Index clamped = 0;  ///< coordinates the zero clamp had to repair
};

/// One multiplicative LMS update
///
///   w <- w - 2 eta diag(w) (D^T (y_in + D w - y_des) + mu dJ(w)),
///
/// with D = A X_dict, y_in = A x_in, dJ the subgradient of J taking 0 at
/// zero coordinates, followed by a clamp at zero.
LmsUpdate lms_update(const Vector& w, const Vector& y_in, const Vector& y_des, const Matrix& d,
                     double eta, double mu, Regularizer regularizer = Regularizer::l1);

/// Same update expressed on raw inputs. Throws DimensionMismatch.
Vector lms_step(const Vector& w, const Vector& x_in, const Vector& y_des, const Dictionary& dict,
                const PerceptualMap& map, double eta, double mu,
                Regularizer regularizer = Regularizer::l1);

struct ScenarioSegment {
  long steps = 1;
  Vector x_in;
  Vector y_des;
};

/// Piecewise-stationary environment with optional Gaussian jitter on x_in.
struct EnvironmentScenario {
  std::vector<ScenarioSegment> segments;
  std::uint64_t seed = 0;
  double jitter_sigma = 0.0;

  long total_steps() const;
};

struct AdaptiveOptions {
  Regularizer regularizer = Regularizer::l1;
  /// Accept zero entries in w0. They are absorbing and reported as frozen.
  bool allow_frozen = false;
};

struct AdaptiveRun {
  double eta = 0.0;
  double mu = 0.0;
  std::vector<Vector> w_trajectory;         ///< w_t used at step t
  std::vector<double> residual_trajectory;  ///< ||A x_in,t + D w_t - y_des,t||
  EnvironmentScenario scenario;
  Vector final_w;
  long clamp_events = 0;
  std::vector<Index> frozen;  ///< coordinates stuck at exactly zero
};

/// 1 / (2 * max(w0) * sigma_max(D)^2).
double lms_step_bound(const Matrix& d, const Vector& w0);

/// Uniform initialization 1/n.
Vector uniform_start(Index n);

/// Throws InvalidConfig (eta <= 0, a negative w0 entry, a zero w0 entry
/// unless allowed) and DimensionMismatch.
AdaptiveRun run_adaptive(const EnvironmentScenario& scenario, const Dictionary& dict,
                         const PerceptualMap& map, double eta, double mu, const Vector& w0,
                         const AdaptiveOptions& options = {});

}  // namespace olfact
