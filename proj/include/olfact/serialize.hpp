#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "olfact/cancellation.hpp"
#include "olfact/filtering.hpp"
#include "olfact/perceptmap.hpp"
#include "olfact/steganography.hpp"

namespace olfact::io {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const std::vector<double>& v);
/// Throws ParseError (naming `source`) unless j is an array of numbers.
Vector vector_from_json(const Json& j, const std::string& source, std::string_view field);

// map.json: {k, l, lambda, a (flat, row-major), singular_values, train_rmse,
// feature_scale|null, descriptors, features, ...}
Json map_to_json(const PerceptualMap& map);
PerceptualMap map_from_json(const Json& j, const std::string& source);
PerceptualMap load_map(const std::string& path);

Json cv_to_json(const CvReport& cv);
CvReport cv_from_json(const Json& j, const std::string& source);

// solution.json: weights keyed by compound id, one entry per malodor.
Json cancellation_to_json(const CancellationSolution& sol, const Dictionary& dict);
struct StoredCancellation {
  std::vector<std::string> ids;
  Matrix w;
  std::vector<std::string> support;
  double residual_frobenius = 0.0;
  Vector residual_per_odor;
  std::optional<Vector> white_offset;
  double mu = 0.0;
};
StoredCancellation cancellation_from_json(const Json& j, const std::string& source);

Json additive_to_json(const AdditiveSolution& sol);
AdditiveSolution additive_from_json(const Json& j, const std::string& source);

// scenario.json: {segments:[{steps, x_in, y_des}], seed, jitter_sigma}
Json scenario_to_json(const EnvironmentScenario& s);
EnvironmentScenario scenario_from_json(const Json& j, const std::string& source);
EnvironmentScenario load_scenario(const std::string& path);

/// Parses a JSON file. Throws IoError or ParseError.
Json read_json(const std::string& path);
/// Pretty-prints with two-space indent and a trailing newline.
void write_json(const std::string& path, const Json& j);
/// Throws IoError.
void write_text(const std::string& path, const std::string& text);

/// run.csv: `t,residual,w_1..w_n`, one row per step, t from 0.
void write_run_csv(const std::string& path, const AdaptiveRun& run, std::string_view comment = {});

}  // namespace olfact::io
