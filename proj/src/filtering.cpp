#include "olfact/filtering.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "olfact/cancellation.hpp"
#include "olfact/error.hpp"

namespace olfact {

NonnegDesign filter_design(const FilterProblem& p) {
  if (p.x_in.size() != p.map.feature_dim()) {
    throw DimensionMismatch("filter: input has " + std::to_string(p.x_in.size()) +
                            " features, map expects " + std::to_string(p.map.feature_dim()));
  }
  if (p.y_des.size() != p.map.percept_dim()) {
    throw DimensionMismatch("filter: target has " + std::to_string(p.y_des.size()) +
                            " descriptors, map produces " + std::to_string(p.map.percept_dim()));
  }
  if (!(p.mu >= 0.0)) throw InvalidConfig("filter: mu must be nonnegative");
  NonnegDesign d;
  d.offset = predict_compound(p.map, p.x_in) - p.y_des;
  d.op = dictionary_percepts(p.map, p.dict);
  d.fidelity_weight = 2.0;
  d.penalty = to_penalty(p.regularizer);
  d.reg = p.mu;
  return d;
}

AdditiveSolution solve_filter(const FilterProblem& p, const SolverOptions& options) {
  const NonnegDesign d = filter_design(p);
  DesignResult r = solve_nonneg_design(d, options, "filter");
  AdditiveSolution sol;
  sol.weights = r.w.col(0);
  sol.ids = p.dict.ids();
  for (Index i : active_rows(r.w)) sol.support.push_back(sol.ids[static_cast<std::size_t>(i)]);
  sol.residual_l2 = (d.offset + d.op * sol.weights).norm();
  sol.objective = r.objective;
  sol.kkt_residual = r.kkt_residual;
  sol.iterations = r.iterations;
  sol.objective_trace = std::move(r.trace);
  return sol;
}

LmsUpdate lms_update(const Vector& w, const Vector& y_in, const Vector& y_des, const Matrix& d,
                     double eta, double mu, Regularizer regularizer) {
  if (w.size() != d.cols() || y_in.size() != d.rows() || y_des.size() != d.rows()) {
    throw DimensionMismatch("lms: inconsistent dimensions");
  }
  Vector direction = d.transpose() * (y_in + d * w - y_des);
  switch (regularizer) {
    case Regularizer::l1:
      direction += mu * (w.array() > 0.0).cast<double>().matrix();
      break;
    case Regularizer::l2sq:
      direction += mu * 2.0 * w;
      break;
    case Regularizer::none:
      break;
  }
  LmsUpdate out;
  out.w = w - 2.0 * eta * w.cwiseProduct(direction);
  for (Index i = 0; i < out.w.size(); ++i) {
    if (out.w(i) < 0.0) {
      out.w(i) = 0.0;
      ++out.clamped;
    }
  }
  return out;
}

Vector lms_step(const Vector& w, const Vector& x_in, const Vector& y_des, const Dictionary& dict,
                const PerceptualMap& map, double eta, double mu, Regularizer regularizer) {
  return lms_update(w, predict_compound(map, x_in), y_des, dictionary_percepts(map, dict), eta, mu,
                    regularizer)
      .w;
}

long EnvironmentScenario::total_steps() const {
  long total = 0;
  for (const auto& s : segments) total += s.steps;
  return total;
}

double lms_step_bound(const Matrix& d, const Vector& w0) {
  const double s = numerics::spectral_norm(d);
  const double top = w0.size() ? w0.maxCoeff() : 0.0;
  if (s == 0.0 || top <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * top * s * s);
}

Vector uniform_start(Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

AdaptiveRun run_adaptive(const EnvironmentScenario& scenario, const Dictionary& dict,
                         const PerceptualMap& map, double eta, double mu, const Vector& w0,
                         const AdaptiveOptions& options) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidConfig("adapt: eta must be positive");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidConfig("adapt: mu must be nonnegative");
  if (w0.size() != dict.size()) {
    throw DimensionMismatch("adapt: w0 has " + std::to_string(w0.size()) + " entries, dictionary has " +
                            std::to_string(dict.size()));
  }
  if (!w0.allFinite() || (w0.array() < 0.0).any()) {
    throw InvalidConfig("adapt: w0 entries must be finite and nonnegative");
  }
  if (!options.allow_frozen && (w0.array() == 0.0).any()) {
    std::string idx;
    for (Index i = 0; i < w0.size(); ++i) {
      if (w0(i) == 0.0) idx += (idx.empty() ? "" : ", ") + std::to_string(i);
    }
    throw InvalidConfig("adapt: w0 must be strictly positive; coordinates " + idx +
                        " would stay frozen at zero");
  }
  if (scenario.segments.empty()) throw InvalidConfig("adapt: scenario has no segments");
  if (!(scenario.jitter_sigma >= 0.0)) throw InvalidConfig("adapt: jitter_sigma must be nonnegative");
  for (const auto& s : scenario.segments) {
    if (s.steps < 1) throw InvalidConfig("adapt: segment durations must be at least 1");
    if (s.x_in.size() != map.feature_dim() || s.y_des.size() != map.percept_dim()) {
      throw DimensionMismatch("adapt: segment dimensions do not match the map");
    }
  }

  const Matrix d = dictionary_percepts(map, dict);
  const Matrix a = map.effective();
  std::mt19937_64 rng(scenario.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  AdaptiveRun run;
  run.eta = eta;
  run.mu = mu;
  run.scenario = scenario;
  const auto total = static_cast<std::size_t>(scenario.total_steps());
  run.w_trajectory.reserve(total);
  run.residual_trajectory.reserve(total);

  Vector w = w0;
  for (const auto& seg : scenario.segments) {
    for (long step = 0; step < seg.steps; ++step) {
      Vector x = seg.x_in;
      if (scenario.jitter_sigma > 0.0) {
        for (Index i = 0; i < x.size(); ++i) x(i) += scenario.jitter_sigma * gauss(rng);
      }
      const Vector y_in = a * x;
      run.w_trajectory.push_back(w);
      run.residual_trajectory.push_back((y_in + d * w - seg.y_des).norm());
      LmsUpdate u = lms_update(w, y_in, seg.y_des, d, eta, mu, options.regularizer);
      run.clamp_events += u.clamped;
      w = std::move(u.w);
    }
  }
  run.final_w = w;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) == 0.0) run.frozen.push_back(i);
  }
  return run;
}

}  // namespace olfact
