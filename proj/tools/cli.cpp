#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "olfact/cancellation.hpp"
#include "olfact/corpus.hpp"
#include "olfact/csv.hpp"
#include "olfact/error.hpp"
#include "olfact/filtering.hpp"
#include "olfact/perceptmap.hpp"
#include "olfact/serialize.hpp"
#include "olfact/steganography.hpp"
#include "olfact/version.hpp"

namespace olfact::cli {

namespace {

using io::Json;

struct SolverFlags {
  double tol = 1e-9;
  double kkt_tol = 1e-9;
  long max_iter = 50000;

  void add_to(CLI::App* app) {
    app->add_option("--tol", tol, "relative objective change tolerance")->capture_default_str();
    app->add_option("--kkt-tol", kkt_tol, "KKT residual tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
  }
  SolverOptions options() const {
    if (!(tol > 0.0) || !(kkt_tol > 0.0) || max_iter < 1) {
      throw InvalidConfig("--tol, --kkt-tol and --max-iter must be positive");
    }
    SolverOptions o;
    o.tol = tol;
    o.kkt_tol = kkt_tol;
    o.max_iter = max_iter;
    return o;
  }
  Json echo() const { return Json{{"tol", tol}, {"kkt_tol", kkt_tol}, {"max_iter", max_iter}}; }
};

Json make_meta(std::string_view command, std::uint64_t seed, Json config) {
  Json m;
  m["tool"] = kToolName;
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = std::move(config);
  return m;
}

Json with_meta(const Json& meta, const Json& body) {
  Json j;
  j["meta"] = meta;
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

Dictionary load_dictionary(const std::string& path) {
  return Dictionary::from_compounds(load_compounds(path));
}

std::string stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

/// `descriptor,score` rows, reordered to the map's descriptor order.
Vector load_descriptor_vector(const std::string& path, const PerceptualMap& map) {
  const csv::Table t = csv::read(path);
  csv::expect_header_prefix(t, {"descriptor", "score"});
  csv::expect_rectangular(t);
  std::map<std::string, double> by_name;
  for (const auto& row : t.rows) {
    const double v = csv::parse_real(t, row, 1);
    if (!by_name.emplace(row.fields[0], v).second) {
      throw DuplicateId(path + ":" + std::to_string(row.line) + ": descriptor '" + row.fields[0] +
                        "' listed twice");
    }
  }
  if (by_name.size() != map.descriptor_names.size()) {
    throw DimensionMismatch(path + ": " + std::to_string(by_name.size()) + " descriptors, map has " +
                            std::to_string(map.descriptor_names.size()));
  }
  Vector y(map.percept_dim());
  for (std::size_t i = 0; i < map.descriptor_names.size(); ++i) {
    auto it = by_name.find(map.descriptor_names[i]);
    if (it == by_name.end()) {
      throw DimensionMismatch(path + ": descriptor '" + map.descriptor_names[i] + "' missing");
    }
    y(static_cast<Index>(i)) = it->second;
  }
  return y;
}

void write_descriptor_vector(const std::string& path, const PerceptualMap& map, const Vector& y,
                             const Json& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  csv::write_comment(out, meta.dump());
  csv::write_row(out, {"descriptor", "score"});
  for (Index i = 0; i < y.size(); ++i) {
    csv::write_row(out, {map.descriptor_names[static_cast<std::size_t>(i)], csv::format_real(y(i))});
  }
}

// --- fit-map ---------------------------------------------------------------

struct FitMapArgs {
  std::string features, percepts, grid = "1e-2:1e6:log9", out_map, out_cv;
  long folds = 5;
  std::uint64_t seed = 0;
  bool standardize = false;
  SolverFlags solver;
};

int cmd_fit_map(const FitMapArgs& a, std::ostream& out) {
  const auto grid = parse_grid(a.grid);
  if (a.folds < 2) throw InvalidConfig("--folds must be at least 2");
  FitOptions opts;
  opts.solver = a.solver.options();
  opts.standardize = a.standardize;

  const CompoundSet compounds = load_compounds(a.features);
  const PerceptSet percepts = load_percepts(a.percepts);
  const TrainingSet train = join_training(compounds, percepts);

  const CvReport cv = cross_validate(train.x, train.y, grid, a.folds, a.seed, opts);
  PerceptualMap map = fit(train.x, train.y, cv.best_lambda, opts);
  map.feature_names = compounds.feature_names;
  map.descriptor_names = percepts.descriptor_names;

  Json config{{"features", a.features},   {"percepts", a.percepts}, {"lambda_grid", a.grid},
              {"folds", a.folds},         {"standardize", a.standardize},
              {"out_map", a.out_map},     {"out_cv", a.out_cv},     {"solver", a.solver.echo()}};
  const Json meta = make_meta("fit-map", a.seed, std::move(config));
  io::write_json(a.out_map, with_meta(meta, io::map_to_json(map)));
  io::write_json(a.out_cv, with_meta(meta, io::cv_to_json(cv)));

  const auto best = std::min_element(cv.mean_rmse.data(), cv.mean_rmse.data() + cv.mean_rmse.size());
  out << "best_lambda " << csv::format_real(cv.best_lambda) << "\n"
      << "cv_rmse " << csv::format_real(*best) << "\n"
      << "rank " << map.rank() << "\n"
      << "train_rmse " << csv::format_real(map.train_rmse) << "\n";
  return kOk;
}

// --- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string map, dict, mixture, out;
  bool normalize = false;
  std::uint64_t seed = 0;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const PerceptualMap map = io::load_map(a.map);
  const Dictionary dict = load_dictionary(a.dict);
  const MixtureSpec spec = load_mixture(a.mixture);
  const Vector y = predict_mixture(map, dict, spec, a.normalize);
  Json config{{"map", a.map}, {"dict", a.dict}, {"mixture", a.mixture},
              {"normalize", a.normalize}, {"out", a.out}};
  write_descriptor_vector(a.out, map, y, make_meta("predict", a.seed, std::move(config)));
  out << "descriptors " << y.size() << "\n";
  return kOk;
}

// --- design-cancel ---------------------------------------------------------

struct CancelArgs {
  std::string map, dict, pca, out;
  std::vector<std::string> malodors;
  double mu = 0.0;
  bool white_family = false;
  bool normalize = false;
  std::uint64_t seed = 0;
  SolverFlags solver;
};

void write_pca(const std::string& path, const CancellationProblem& p,
               const CancellationSolution& sol, const std::vector<std::string>& malodor_ids,
               const Json& meta) {
  const Matrix d = dictionary_percepts(p.map, p.dict);
  const Index n = d.cols();
  const Index m = p.y_mal.cols();
  Matrix points(n + m, d.rows());
  points.topRows(n) = d.transpose();
  points.bottomRows(m) = p.y_mal.transpose();
  const numerics::PcaResult pc = numerics::pca(points, 2);
  // Percept of each malodor after adding its canceling mixture.
  const Matrix cancelled = (p.y_mal + d * sol.w).transpose();
  const Matrix cancelled_coords =
      (cancelled.rowwise() - pc.mean.transpose()) * pc.components;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  csv::write_comment(out, meta.dump());
  csv::write_row(out, {"kind", "id", "pc1", "pc2"});
  auto row = [&](const char* kind, const std::string& id, const Matrix& c, Index i) {
    csv::write_row(out, {kind, id, csv::format_real(c(i, 0)), csv::format_real(c(i, 1))});
  };
  for (Index i = 0; i < n; ++i) row("dictionary", p.dict.ids()[static_cast<std::size_t>(i)], pc.coords, i);
  for (Index j = 0; j < m; ++j) row("malodor", malodor_ids[static_cast<std::size_t>(j)], pc.coords, n + j);
  for (const auto& id : sol.support) row("selected", id, pc.coords, p.dict.index_of(id));
  for (Index j = 0; j < m; ++j) {
    row("cancelled", malodor_ids[static_cast<std::size_t>(j)], cancelled_coords, j);
  }
}

int cmd_design_cancel(const CancelArgs& a, std::ostream& out) {
  const SolverOptions opts = a.solver.options();
  CancellationProblem p;
  p.map = io::load_map(a.map);
  p.dict = load_dictionary(a.dict);
  p.mu = a.mu;
  p.white_family = a.white_family;
  p.y_mal.resize(p.map.percept_dim(), static_cast<Index>(a.malodors.size()));
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < a.malodors.size(); ++j) {
    p.y_mal.col(static_cast<Index>(j)) =
        predict_mixture(p.map, p.dict, load_mixture(a.malodors[j]), a.normalize);
    ids.push_back(stem(a.malodors[j]));
  }
  const CancellationSolution sol = solve_cancellation(p, opts);

  Json config{{"map", a.map},
              {"dict", a.dict},
              {"malodors", a.malodors},
              {"mu", a.mu},
              {"white_family", a.white_family},
              {"normalize", a.normalize},
              {"pca", a.pca.empty() ? Json(nullptr) : Json(a.pca)},
              {"out", a.out},
              {"solver", a.solver.echo()}};
  const Json meta = make_meta("design-cancel", a.seed, std::move(config));
  Json body = io::cancellation_to_json(sol, p.dict);
  body["malodors"] = ids;
  io::write_json(a.out, with_meta(meta, body));
  if (!a.pca.empty()) write_pca(a.pca, p, sol, ids, meta);

  out << "active " << sol.support.size() << "\n"
      << "residual_frobenius " << csv::format_real(sol.residual_frobenius) << "\n"
      << "iterations " << sol.iterations << "\n";
  return kOk;
}

// --- design-stego ----------------------------------------------------------

struct StegoArgs {
  std::string map, dict, hidden, ingredients, cover, reg = "l1", out;
  double nu = 0.0;
  std::uint64_t seed = 0;
  SolverFlags solver;
};

int cmd_design_stego(const StegoArgs& a, std::ostream& out) {
  const SolverOptions opts = a.solver.options();
  StegoProblem p;
  p.regularizer = parse_regularizer(a.reg);
  p.nu = a.nu;
  p.map = io::load_map(a.map);
  p.dict = load_dictionary(a.dict);
  p.hidden_dict = p.dict;
  p.hidden = load_mixture(a.hidden);
  if (!a.ingredients.empty()) p.ingredients = load_ingredients(a.ingredients, p.dict);
  const AdditiveSolution sol = solve_stego(p, opts);

  Json config{{"map", a.map},
              {"dict", a.dict},
              {"hidden", a.hidden},
              {"ingredients", a.ingredients.empty() ? Json(nullptr) : Json(a.ingredients)},
              {"cover", a.cover.empty() ? Json(nullptr) : Json(a.cover)},
              {"nu", a.nu},
              {"reg", a.reg},
              {"out", a.out},
              {"solver", a.solver.echo()}};
  Json body = io::additive_to_json(sol);
  body["nu"] = a.nu;
  body["reg"] = a.reg;
  body["hidden_percept_norm"] = stego_offset(p).norm();
  if (!a.cover.empty()) {
    const HidingCheck h = verify_hiding(p, sol, load_mixture(a.cover), p.dict);
    body["hiding_check"] = Json{{"hidden_residual", h.hidden_residual},
                                {"combined_vs_cover_distance", h.combined_vs_cover_distance}};
  }
  io::write_json(a.out, with_meta(make_meta("design-stego", a.seed, std::move(config)), body));

  out << "active " << sol.support.size() << "\n"
      << "residual_l2 " << csv::format_real(sol.residual_l2) << "\n";
  return kOk;
}

// --- design-filter ---------------------------------------------------------

struct FilterArgs {
  std::string map, dict, input, target, reg = "l1", out;
  double mu = 0.0;
  bool normalize = false;
  std::uint64_t seed = 0;
  SolverFlags solver;
};

int cmd_design_filter(const FilterArgs& a, std::ostream& out) {
  const SolverOptions opts = a.solver.options();
  FilterProblem p;
  p.regularizer = parse_regularizer(a.reg);
  p.mu = a.mu;
  p.map = io::load_map(a.map);
  p.dict = load_dictionary(a.dict);
  p.x_in = mix(p.dict, load_mixture(a.input), a.normalize);
  p.y_des = load_descriptor_vector(a.target, p.map);
  const AdditiveSolution sol = solve_filter(p, opts);

  Json config{{"map", a.map},     {"dict", a.dict}, {"input_mixture", a.input},
              {"target", a.target}, {"mu", a.mu},   {"reg", a.reg},
              {"normalize", a.normalize}, {"out", a.out}, {"solver", a.solver.echo()}};
  Json body = io::additive_to_json(sol);
  body["mu"] = a.mu;
  body["reg"] = a.reg;
  body["unfiltered_residual"] = (predict_compound(p.map, p.x_in) - p.y_des).norm();
  io::write_json(a.out, with_meta(make_meta("design-filter", a.seed, std::move(config)), body));

  out << "active " << sol.support.size() << "\n"
      << "residual_l2 " << csv::format_real(sol.residual_l2) << "\n";
  return kOk;
}

// --- adapt -----------------------------------------------------------------

struct AdaptArgs {
  std::string map, dict, scenario, w0 = "uniform", reg = "l1", out;
  double eta = 0.0;
  double mu = 0.0;
  bool allow_frozen = false;
  std::uint64_t seed = 0;
};

Vector parse_w0(const std::string& text, Index n) {
  if (text == "uniform") return uniform_start(n);
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InvalidConfig("--w0 must be 'uniform' or a number, got '" + text + "'");
  }
  return Vector::Constant(n, v);
}

int cmd_adapt(const AdaptArgs& a, std::ostream& out) {
  const Regularizer reg = parse_regularizer(a.reg);
  const PerceptualMap map = io::load_map(a.map);
  const Dictionary dict = load_dictionary(a.dict);
  const EnvironmentScenario scenario = io::load_scenario(a.scenario);
  const Vector w0 = parse_w0(a.w0, dict.size());
  AdaptiveOptions opts;
  opts.regularizer = reg;
  opts.allow_frozen = a.allow_frozen;
  const AdaptiveRun run = run_adaptive(scenario, dict, map, a.eta, a.mu, w0, opts);

  Json config{{"map", a.map}, {"dict", a.dict}, {"scenario", a.scenario}, {"eta", a.eta},
              {"mu", a.mu},   {"w0", a.w0},     {"reg", a.reg},           {"allow_frozen", a.allow_frozen},
              {"out", a.out}};
  // The scenario carries its own seed for the jitter stream.
  const Json meta = make_meta("adapt", scenario.seed, std::move(config));
  io::write_run_csv(a.out, run, meta.dump());

  const double bound = lms_step_bound(dictionary_percepts(map, dict), w0);
  out << "steps " << run.residual_trajectory.size() << "\n"
      << "final_residual " << csv::format_real(run.residual_trajectory.back()) << "\n"
      << "step_bound " << csv::format_real(bound) << "\n"
      << "clamp_events " << run.clamp_events << "\n"
      << "frozen " << run.frozen.size() << "\n";
  for (Index i : run.frozen) out << "frozen_id " << dict.ids()[static_cast<std::size_t>(i)] << "\n";
  return kOk;
}

// --- synth-data ------------------------------------------------------------

struct SynthArgs {
  SyntheticConfig config;
  long n_malodors = 2;
  long n_ingredients = 12;
  long steps = 2000;
  std::string out_dir;
};

int cmd_synth_data(const SynthArgs& a, std::ostream& out) {
  if (a.n_malodors < 1 || a.n_ingredients < 1 || a.steps < 1) {
    throw InvalidConfig("--n-malodors, --n-ingredients and --steps must be positive");
  }
  const SyntheticConfig& c = a.config;
  const SyntheticData data = generate_synthetic(c);
  const SyntheticDesignInputs inputs = generate_design_inputs(data, c.seed, a.n_malodors, a.n_ingredients);

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
  const std::filesystem::path dir(a.out_dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };

  Json config{{"k", c.k},
              {"l", c.l},
              {"n_train", c.n_train},
              {"n_dict", c.n_dict},
              {"rank", c.true_rank},
              {"noise", c.noise_sigma},
              {"n_malodors", a.n_malodors},
              {"n_ingredients", a.n_ingredients},
              {"steps", a.steps},
              {"out_dir", a.out_dir}};
  const Json meta = make_meta("synth-data", c.seed, std::move(config));
  const std::string comment = meta.dump();

  save_compounds(at("compounds.csv"), data.compounds, comment);
  save_percepts(at("percepts.csv"), data.percepts, comment);
  save_compounds(at("dictionary.csv"), data.dictionary, comment);
  for (std::size_t j = 0; j < inputs.malodors.size(); ++j) {
    save_mixture(at("malodor_" + std::to_string(j + 1) + ".csv"), inputs.malodors[j], comment);
  }
  save_mixture(at("hidden.csv"), inputs.hidden, comment);
  save_mixture(at("cover.csv"), inputs.cover, comment);
  save_ingredients(at("ingredients.csv"), inputs.ingredients, comment);

  Json truth;
  truth["k"] = c.k;
  truth["l"] = c.l;
  truth["rank"] = c.true_rank;
  truth["noise_sigma"] = c.noise_sigma;
  Json rows = Json::array();
  for (Index i = 0; i < data.ground_truth.rows(); ++i) {
    rows.push_back(io::to_json(Vector(data.ground_truth.row(i).transpose())));
  }
  truth["a"] = std::move(rows);
  io::write_json(at("ground_truth.json"), with_meta(meta, truth));

  // Each malodor in turn is the ambient input; the target is the cover's
  // percept under the ground-truth map.
  const Dictionary dict = Dictionary::from_compounds(data.dictionary);
  EnvironmentScenario scenario;
  scenario.seed = c.seed;
  const Vector target = data.ground_truth * mix(dict, inputs.cover, false);
  for (const auto& m : inputs.malodors) {
    scenario.segments.push_back({a.steps, mix(dict, m, false), target});
  }
  io::write_json(at("scenario.json"), with_meta(meta, io::scenario_to_json(scenario)));

  out << "wrote " << a.out_dir << "\n";
  return kOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::no_convergence: return kNoConvergence;
    case ErrorKind::invalid_config: return kConfigError;
    default: return kInputError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Olfactory perceptual mapping and odor design", "olfact"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  FitMapArgs fa;
  auto* fit_cmd = app.add_subcommand("fit-map", "fit the perceptual map with cross-validated lambda");
  fit_cmd->add_option("--features", fa.features, "compounds CSV")->required();
  fit_cmd->add_option("--percepts", fa.percepts, "percepts CSV")->required();
  fit_cmd->add_option("--lambda-grid", fa.grid, "lo:hi:logN or comma list")->capture_default_str();
  fit_cmd->add_option("--folds", fa.folds)->capture_default_str();
  fit_cmd->add_option("--seed", fa.seed)->capture_default_str();
  fit_cmd->add_option("--out-map", fa.out_map)->required();
  fit_cmd->add_option("--out-cv", fa.out_cv)->required();
  fit_cmd->add_flag("--standardize", fa.standardize, "divide features by their std");
  fa.solver.add_to(fit_cmd);

  PredictArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "percept of a mixture");
  predict_cmd->add_option("--map", pa.map)->required();
  predict_cmd->add_option("--dict", pa.dict)->required();
  predict_cmd->add_option("--mixture", pa.mixture)->required();
  predict_cmd->add_option("--out", pa.out)->required();
  predict_cmd->add_flag("--normalize", pa.normalize, "rescale weights to unit l2 norm");
  predict_cmd->add_option("--seed", pa.seed)->capture_default_str();

  CancelArgs ca;
  auto* cancel_cmd = app.add_subcommand("design-cancel", "sparse mixture canceling malodors");
  cancel_cmd->add_option("--map", ca.map)->required();
  cancel_cmd->add_option("--dict", ca.dict)->required();
  cancel_cmd->add_option("--malodor", ca.malodors, "malodor mixture CSV (repeatable)")->required();
  cancel_cmd->add_option("--mu", ca.mu)->required();
  cancel_cmd->add_flag("--white-family", ca.white_family, "cancel toward any flat percept");
  cancel_cmd->add_flag("--normalize", ca.normalize, "rescale malodor weights to unit l2 norm");
  cancel_cmd->add_option("--pca", ca.pca, "write 2-D PCA coordinates");
  cancel_cmd->add_option("--out", ca.out)->required();
  cancel_cmd->add_option("--seed", ca.seed)->capture_default_str();
  ca.solver.add_to(cancel_cmd);

  StegoArgs sa;
  auto* stego_cmd = app.add_subcommand("design-stego", "additive hiding a food's percept");
  stego_cmd->add_option("--map", sa.map)->required();
  stego_cmd->add_option("--dict", sa.dict)->required();
  stego_cmd->add_option("--hidden", sa.hidden)->required();
  stego_cmd->add_option("--ingredients", sa.ingredients, "ingredient table CSV");
  stego_cmd->add_option("--cover", sa.cover, "cover mixture for a hiding check");
  stego_cmd->add_option("--nu", sa.nu)->required();
  stego_cmd->add_option("--reg", sa.reg, "l1|l2sq|none")->capture_default_str();
  stego_cmd->add_option("--out", sa.out)->required();
  stego_cmd->add_option("--seed", sa.seed)->capture_default_str();
  sa.solver.add_to(stego_cmd);

  FilterArgs ta;
  auto* filter_cmd = app.add_subcommand("design-filter", "additive steering an input to a target percept");
  filter_cmd->add_option("--map", ta.map)->required();
  filter_cmd->add_option("--dict", ta.dict)->required();
  filter_cmd->add_option("--input-mixture", ta.input)->required();
  filter_cmd->add_option("--target", ta.target, "descriptor,score CSV")->required();
  filter_cmd->add_option("--mu", ta.mu)->required();
  filter_cmd->add_option("--reg", ta.reg, "l1|l2sq|none")->capture_default_str();
  filter_cmd->add_flag("--normalize", ta.normalize, "rescale input weights to unit l2 norm");
  filter_cmd->add_option("--out", ta.out)->required();
  filter_cmd->add_option("--seed", ta.seed)->capture_default_str();
  ta.solver.add_to(filter_cmd);

  AdaptArgs aa;
  auto* adapt_cmd = app.add_subcommand("adapt", "multiplicative LMS over a scenario");
  adapt_cmd->add_option("--map", aa.map)->required();
  adapt_cmd->add_option("--dict", aa.dict)->required();
  adapt_cmd->add_option("--scenario", aa.scenario)->required();
  adapt_cmd->add_option("--eta", aa.eta)->required();
  adapt_cmd->add_option("--mu", aa.mu)->capture_default_str();
  adapt_cmd->add_option("--w0", aa.w0, "uniform or a constant")->capture_default_str();
  adapt_cmd->add_option("--reg", aa.reg, "l1|l2sq|none")->capture_default_str();
  adapt_cmd->add_flag("--allow-frozen", aa.allow_frozen, "accept zero entries in w0");
  adapt_cmd->add_option("--out", aa.out)->required();

  SynthArgs ya;
  auto* synth_cmd = app.add_subcommand("synth-data", "generate a seeded synthetic corpus");
  synth_cmd->add_option("--seed", ya.config.seed)->capture_default_str();
  synth_cmd->add_option("--k", ya.config.k)->capture_default_str();
  synth_cmd->add_option("--l", ya.config.l)->capture_default_str();
  synth_cmd->add_option("--n-train", ya.config.n_train)->capture_default_str();
  synth_cmd->add_option("--n-dict", ya.config.n_dict)->capture_default_str();
  synth_cmd->add_option("--rank", ya.config.true_rank)->capture_default_str();
  synth_cmd->add_option("--noise", ya.config.noise_sigma)->capture_default_str();
  synth_cmd->add_option("--n-malodors", ya.n_malodors)->capture_default_str();
  synth_cmd->add_option("--n-ingredients", ya.n_ingredients)->capture_default_str();
  synth_cmd->add_option("--steps", ya.steps, "steps per scenario segment")->capture_default_str();
  synth_cmd->add_option("--out-dir", ya.out_dir)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*fit_cmd) return cmd_fit_map(fa, out);
    if (*predict_cmd) return cmd_predict(pa, out);
    if (*cancel_cmd) return cmd_design_cancel(ca, out);
    if (*stego_cmd) return cmd_design_stego(sa, out);
    if (*filter_cmd) return cmd_design_filter(ta, out);
    if (*adapt_cmd) return cmd_adapt(aa, out);
    if (*synth_cmd) return cmd_synth_data(ya, out);
  } catch (const NoConvergence& e) {
    err << "olfact: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kNoConvergence;
  } catch (const Error& e) {
    err << "olfact: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "olfact: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kConfigError;
}

}  // namespace olfact::cli
