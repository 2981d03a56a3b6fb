#include "olfact/steganography.hpp"

#include "olfact/cancellation.hpp"
#include "olfact/error.hpp"

namespace olfact {

std::string_view to_string(Regularizer r) {
  switch (r) {
    case Regularizer::l1: return "l1";
    case Regularizer::l2sq: return "l2sq";
    case Regularizer::none: return "none";
  }
  return "none";
}

Regularizer parse_regularizer(std::string_view text) {
  if (text == "l1") return Regularizer::l1;
  if (text == "l2sq") return Regularizer::l2sq;
  if (text == "none") return Regularizer::none;
  throw InvalidConfig("unknown regularizer '" + std::string(text) + "' (expected l1, l2sq or none)");
}

Penalty to_penalty(Regularizer r) {
  switch (r) {
    case Regularizer::l1: return Penalty::l1;
    case Regularizer::l2sq: return Penalty::l2sq;
    case Regularizer::none: return Penalty::none;
  }
  return Penalty::none;
}

Vector stego_offset(const StegoProblem& p) {
  return predict_mixture(p.map, p.hidden_dict, p.hidden, /*normalize=*/true);
}

Matrix stego_operator(const StegoProblem& p) {
  const Matrix d = dictionary_percepts(p.map, p.dict);
  if (!p.ingredients) return d;
  const IngredientTable& t = *p.ingredients;
  if (t.weights.rows() != p.dict.size() || t.compound_ids != p.dict.ids()) {
    throw DimensionMismatch("ingredient table compound axis does not match the dictionary");
  }
  return d * t.weights;
}

NonnegDesign stego_design(const StegoProblem& p) {
  if (!(p.nu >= 0.0)) throw InvalidConfig("stego: nu must be nonnegative");
  NonnegDesign d;
  d.offset = stego_offset(p);
  d.op = stego_operator(p);
  d.fidelity_weight = 2.0;
  d.penalty = to_penalty(p.regularizer);
  d.reg = p.nu;
  return d;
}

AdditiveSolution solve_stego(const StegoProblem& p, const SolverOptions& options) {
  const NonnegDesign d = stego_design(p);
  DesignResult r = solve_nonneg_design(d, options, "stego");
  AdditiveSolution sol;
  sol.weights = r.w.col(0);
  sol.ids = p.ingredients ? p.ingredients->ingredient_ids : p.dict.ids();
  for (Index i : active_rows(r.w)) sol.support.push_back(sol.ids[static_cast<std::size_t>(i)]);
  sol.residual_l2 = (d.offset + d.op * sol.weights).norm();
  sol.objective = r.objective;
  sol.kkt_residual = r.kkt_residual;
  sol.iterations = r.iterations;
  sol.objective_trace = std::move(r.trace);
  return sol;
}

HidingCheck verify_hiding(const StegoProblem& p, const AdditiveSolution& sol,
                          const MixtureSpec& cover, const Dictionary& cover_dict) {
  const Matrix e = stego_operator(p);
  if (sol.weights.size() != e.cols()) {
    throw DimensionMismatch("verify_hiding: solution has " + std::to_string(sol.weights.size()) +
                            " weights, problem expects " + std::to_string(e.cols()));
  }
  HidingCheck out;
  out.hidden_residual = (stego_offset(p) + e * sol.weights).norm();

  Vector additive_weights = sol.weights;
  if (p.ingredients) additive_weights = p.ingredients->weights * sol.weights;
  const Vector x_cover = mix(cover_dict, cover, /*normalize=*/false);
  const Vector x_hidden = mix(p.hidden_dict, p.hidden, /*normalize=*/true);
  const Vector x_additive = p.dict.features() * additive_weights;
  out.combined_vs_cover_distance =
      perceptual_distance(p.map, Vector(x_cover + x_hidden + x_additive), x_cover);
  return out;
}

}  // namespace olfact
