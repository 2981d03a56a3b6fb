#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olfact/apg.hpp"
#include "olfact/corpus.hpp"
#include "olfact/design.hpp"
#include "olfact/perceptmap.hpp"

namespace olfact {

/// Secondary objective J on an additive's weights.
enum class Regularizer { l1, l2sq, none };

std::string_view to_string(Regularizer r);
/// Throws InvalidConfig.
Regularizer parse_regularizer(std::string_view text);
Penalty to_penalty(Regularizer r);

/// Additive design: choose w >= 0 so the additive's percept cancels the
/// hidden food's percept b,
///
///   min_{w >= 0} ||b + E w||_2^2 + nu * J(w)
///
/// with b = A X_hid w_hid (w_hid rescaled to unit l2 norm) and E = A X_dict,
/// or E = A X_dict W_ingr when an ingredient table is present.
struct StegoProblem {
  MixtureSpec hidden;
  Dictionary hidden_dict;  ///< resolves `hidden`
  Dictionary dict;         ///< candidate compounds of the additive
  std::optional<IngredientTable> ingredients;
  PerceptualMap map;
  double nu = 0.0;
  Regularizer regularizer = Regularizer::l1;
};

/// Solution of an additive design (also returned by target filtering).
struct AdditiveSolution {
  Vector weights;                 ///< over `ids`, elementwise >= 0
  std::vector<std::string> ids;   ///< dictionary compounds or ingredients
  std::vector<std::string> support;
  double residual_l2 = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  long iterations = 0;
  std::vector<double> objective_trace;
};

/// Percept of the hidden food, b.
Vector stego_offset(const StegoProblem& p);
/// The additive's percept operator, E.
Matrix stego_operator(const StegoProblem& p);
NonnegDesign stego_design(const StegoProblem& p);

/// Throws DimensionMismatch, UnknownCompound, InvalidConfig, NoConvergence.
AdditiveSolution solve_stego(const StegoProblem& p, const SolverOptions& options = {});

struct HidingCheck {
  double hidden_residual = 0.0;             ///< ||b + E w||_2
  double combined_vs_cover_distance = 0.0;  ///< d(cover + hidden + additive, cover)
};

/// Checks the design against a concrete cover food. Under a linear map the
/// two numbers coincide whatever the cover.
HidingCheck verify_hiding(const StegoProblem& p, const AdditiveSolution& sol,
                          const MixtureSpec& cover, const Dictionary& cover_dict);

}  // namespace olfact
