#include "olfact/cancellation.hpp"

#include "olfact/error.hpp"

namespace olfact {

Matrix dictionary_percepts(const PerceptualMap& map, const Dictionary& dict) {
  if (dict.feature_dim() != map.feature_dim()) {
    throw DimensionMismatch("dictionary has " + std::to_string(dict.feature_dim()) +
                            " features, map expects " + std::to_string(map.feature_dim()));
  }
  return map.effective() * dict.features();
}

Matrix center_columns(const Matrix& m) {
  return m.rowwise() - m.colwise().mean();
}

namespace {

void check(const CancellationProblem& p) {
  if (p.y_mal.rows() != p.map.percept_dim()) {
    throw DimensionMismatch("cancellation: malodors have " + std::to_string(p.y_mal.rows()) +
                            " descriptors, map produces " + std::to_string(p.map.percept_dim()));
  }
  if (p.y_mal.cols() == 0) throw DimensionMismatch("cancellation: no malodors");
  if (!(p.mu >= 0.0)) throw InvalidConfig("cancellation: mu must be nonnegative");
}

}  // namespace

NonnegDesign cancellation_design(const CancellationProblem& p) {
  check(p);
  NonnegDesign d;
  d.op = dictionary_percepts(p.map, p.dict);
  d.offset = p.y_mal;
  if (p.white_family) {
    d.op = center_columns(d.op);
    d.offset = center_columns(d.offset);
  }
  d.fidelity_weight = 1.0;
  d.penalty = Penalty::group;
  d.reg = p.mu;
  return d;
}

std::vector<std::string> support_ids(const Dictionary& dict, const Matrix& w) {
  std::vector<std::string> ids;
  for (Index i : active_rows(w)) ids.push_back(dict.ids()[static_cast<std::size_t>(i)]);
  return ids;
}

ResidualReport residual_report(const CancellationProblem& p, const Matrix& w) {
  check(p);
  if (w.rows() != p.dict.size() || w.cols() != p.y_mal.cols()) {
    throw DimensionMismatch("residual_report: W is " + std::to_string(w.rows()) + "x" +
                            std::to_string(w.cols()) + ", expected " +
                            std::to_string(p.dict.size()) + "x" + std::to_string(p.y_mal.cols()));
  }
  ResidualReport r;
  r.residual = p.y_mal + dictionary_percepts(p.map, p.dict) * w;
  if (p.white_family) r.residual = center_columns(r.residual);
  r.per_odor = r.residual.colwise().norm().transpose();
  r.frobenius = r.residual.norm();
  return r;
}

ResidualReport residual_report(const CancellationProblem& p, const CancellationSolution& sol) {
  return residual_report(p, sol.w);
}

CancellationSolution solve_cancellation(const CancellationProblem& p, const SolverOptions& options) {
  const NonnegDesign d = cancellation_design(p);
  DesignResult r = solve_nonneg_design(d, options, "cancellation");

  CancellationSolution sol;
  sol.w = std::move(r.w);
  sol.iterations = r.iterations;
  sol.kkt_residual = r.kkt_residual;
  sol.objective = r.objective;
  sol.mu = p.mu;
  sol.objective_trace = std::move(r.trace);
  sol.support = support_ids(p.dict, sol.w);
  const ResidualReport rep = residual_report(p, sol.w);
  sol.residual_frobenius = rep.frobenius;
  sol.residual_per_odor = rep.per_odor;
  if (p.white_family) {
    const Matrix raw = p.y_mal + dictionary_percepts(p.map, p.dict) * sol.w;
    sol.white_offset = raw.colwise().mean().transpose();
  }
  return sol;
}

}  // namespace olfact
