#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "olfact/numerics.hpp"

namespace olfact {

/// A compound with its physicochemical descriptors.
struct CompoundRecord {
  std::string id;    ///< registry-style key, unique within a corpus
  std::string name;
  Vector features;   ///< length k
};

/// Odor-descriptor scores of one compound on the 0-100 applicability scale.
struct PerceptRecord {
  std::string id;
  Vector scores;     ///< length l
};

struct CompoundSet {
  std::vector<std::string> feature_names;
  std::vector<CompoundRecord> records;

  Index feature_dim() const { return static_cast<Index>(feature_names.size()); }
};

struct PerceptSet {
  std::vector<std::string> descriptor_names;
  std::vector<PerceptRecord> records;

  Index descriptor_dim() const { return static_cast<Index>(descriptor_names.size()); }
};

/// Candidate compounds stored column-wise: features is k x n and column j
/// belongs to ids[j].
class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::vector<std::string> ids, std::vector<std::string> names, Matrix features);

  static Dictionary from_compounds(const CompoundSet& set);

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& names() const { return names_; }
  const Matrix& features() const { return features_; }
  Index size() const { return features_.cols(); }
  Index feature_dim() const { return features_.rows(); }

  std::optional<Index> find(const std::string& id) const;
  /// Throws UnknownCompound.
  Index index_of(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  Matrix features_;
  std::unordered_map<std::string, Index> index_;
};

/// Compound-by-ingredient concentrations; every column has unit l2 norm.
struct IngredientTable {
  std::vector<std::string> ingredient_ids;
  std::vector<std::string> compound_ids;  ///< row axis, matches a Dictionary
  Matrix weights;                         ///< n x n'
};

struct MixtureEntry {
  std::string id;
  double weight = 0.0;
};

/// Nonnegative weights over named compounds.
struct MixtureSpec {
  std::vector<MixtureEntry> entries;

  /// Throws InvalidConfig on a negative or non-finite weight, or when no
  /// weight is strictly positive.
  void validate() const;
};

// Savers write `comment` (if any) as leading `#` lines, which loaders skip.

// --- ingestion -----------------------------------------------------------

/// `id,name,f1,...,fk`. Throws ParseError, DimensionMismatch, DuplicateId.
CompoundSet load_compounds(const std::string& path);
void save_compounds(const std::string& path, const CompoundSet& set,
                    std::string_view comment = {});

/// `id,d1,...,dl`; scores must lie in [0, 100].
PerceptSet load_percepts(const std::string& path);
void save_percepts(const std::string& path, const PerceptSet& set,
                   std::string_view comment = {});

/// `id,weight`.
MixtureSpec load_mixture(const std::string& path);
void save_mixture(const std::string& path, const MixtureSpec& spec,
                  std::string_view comment = {});

/// Long-form `ingredient_id,compound_id,concentration`. Compounds are
/// resolved against `dict`; columns are rescaled to unit l2 norm.
IngredientTable load_ingredients(const std::string& path, const Dictionary& dict);
void save_ingredients(const std::string& path, const IngredientTable& table,
                      std::string_view comment = {});

/// Concentration literal: a real, a `lo..hi` range (midpoint) or `trace`.
std::optional<double> parse_concentration(const std::string& text);

/// Concentration assigned to the literal `trace` (ppm).
inline constexpr double kTraceConcentration = 1e-6;

/// Normalizes every column of an ingredient weight matrix to unit l2 norm.
void normalize_columns(Matrix& weights);

// --- mixing --------------------------------------------------------------

/// Weight vector over the dictionary columns. Throws UnknownCompound.
Vector mixture_weights(const Dictionary& dict, const MixtureSpec& spec, bool normalize);

/// Physicochemical vector X*w of a mixture; with `normalize`, w is first
/// rescaled to unit l2 norm.
Vector mix(const Dictionary& dict, const MixtureSpec& spec, bool normalize);

// --- synthetic data ------------------------------------------------------

struct SyntheticConfig {
  std::uint64_t seed = 7;
  Index k = 18;
  Index l = 20;
  Index n_train = 60;
  Index n_dict = 200;
  Index true_rank = 3;
  double noise_sigma = 0.5;
};

struct SyntheticData {
  CompoundSet compounds;   ///< characterized training compounds
  PerceptSet percepts;     ///< clip(A0 X + noise, 0, 100)
  CompoundSet dictionary;  ///< candidate compounds for design problems
  Matrix ground_truth;     ///< A0, l x k with rank true_rank
};

/// Deterministic per seed. Throws InvalidConfig.
SyntheticData generate_synthetic(const SyntheticConfig& config);

/// Mixture files used by the demonstration pipeline: malodors, a hidden food,
/// a cover food, and an ingredient table over the dictionary.
struct SyntheticDesignInputs {
  std::vector<MixtureSpec> malodors;
  MixtureSpec hidden;
  MixtureSpec cover;
  IngredientTable ingredients;
};

SyntheticDesignInputs generate_design_inputs(const SyntheticData& data, std::uint64_t seed,
                                             Index n_malodors = 2, Index n_ingredients = 12);

}  // namespace olfact
