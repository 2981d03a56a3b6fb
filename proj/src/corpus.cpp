#include "olfact/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "olfact/csv.hpp"
#include "olfact/error.hpp"

namespace olfact {

Dictionary::Dictionary(std::vector<std::string> ids, std::vector<std::string> names,
                       Matrix features)
    : ids_(std::move(ids)), names_(std::move(names)), features_(std::move(features)) {
  if (static_cast<Index>(ids_.size()) != features_.cols()) {
    throw DimensionMismatch("dictionary: " + std::to_string(ids_.size()) + " ids for " +
                            std::to_string(features_.cols()) + " feature columns");
  }
  if (names_.empty()) names_ = ids_;
  if (names_.size() != ids_.size()) throw DimensionMismatch("dictionary: names/ids length differ");
  if (ids_.empty()) throw InvalidConfig("dictionary must contain at least one compound");
  numerics::require_finite(features_, "dictionary features");
  for (std::size_t j = 0; j < ids_.size(); ++j) {
    if (!index_.emplace(ids_[j], static_cast<Index>(j)).second) {
      throw DuplicateId("dictionary: duplicate compound id '" + ids_[j] + "'");
    }
  }
}

Dictionary Dictionary::from_compounds(const CompoundSet& set) {
  const Index k = set.feature_dim();
  Matrix features(k, static_cast<Index>(set.records.size()));
  std::vector<std::string> ids;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < set.records.size(); ++j) {
    const auto& r = set.records[j];
    if (r.features.size() != k) {
      throw DimensionMismatch("compound '" + r.id + "' has " +
                              std::to_string(r.features.size()) + " features, expected " +
                              std::to_string(k));
    }
    features.col(static_cast<Index>(j)) = r.features;
    ids.push_back(r.id);
    names.push_back(r.name);
  }
  return Dictionary(std::move(ids), std::move(names), std::move(features));
}

std::optional<Index> Dictionary::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index Dictionary::index_of(const std::string& id) const {
  const auto found = find(id);
  if (!found) throw UnknownCompound("unknown compound '" + id + "'");
  return *found;
}

void MixtureSpec::validate() const {
  bool positive = false;
  for (const auto& e : entries) {
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InvalidConfig("mixture weight for '" + e.id + "' must be finite and nonnegative");
    }
    positive = positive || e.weight > 0.0;
  }
  if (!positive) throw InvalidConfig("mixture needs at least one strictly positive weight");
}

// --- ingestion -----------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void require_rows(const csv::Table& t) {
  if (t.rows.empty()) throw ParseError(t.source, 0, 0, "no data rows");
}

}  // namespace

CompoundSet load_compounds(const std::string& path) {
  const csv::Table t = csv::read(path);
  csv::expect_header_prefix(t, {"id", "name"});
  const std::size_t arity = t.header.fields.size();
  if (arity < 3) throw ParseError(path, t.header.line, 0, "no feature columns");
  require_rows(t);
  CompoundSet set;
  set.feature_names.assign(t.header.fields.begin() + 2, t.header.fields.end());
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    if (row.fields.size() != arity) {
      throw DimensionMismatch(path + ":" + std::to_string(row.line) + ": expected " +
                              std::to_string(arity - 2) + " features, found " +
                              std::to_string(row.fields.size() < 2 ? 0 : row.fields.size() - 2));
    }
    CompoundRecord rec;
    rec.id = row.fields[0];
    rec.name = row.fields[1];
    if (rec.id.empty()) throw ParseError(path, row.line, 1, "empty id");
    if (!seen.insert(rec.id).second) {
      throw DuplicateId(path + ":" + std::to_string(row.line) + ": duplicate id '" + rec.id + "'");
    }
    rec.features.resize(static_cast<Index>(arity - 2));
    for (std::size_t c = 2; c < arity; ++c) {
      rec.features(static_cast<Index>(c - 2)) = csv::parse_real(t, row, c);
    }
    set.records.push_back(std::move(rec));
  }
  return set;
}

void save_compounds(const std::string& path, const CompoundSet& set,
                    std::string_view comment) {
  auto out = open_out(path);
  csv::write_comment(out, comment);
  std::vector<std::string> header = {"id", "name"};
  header.insert(header.end(), set.feature_names.begin(), set.feature_names.end());
  csv::write_row(out, header);
  for (const auto& r : set.records) {
    std::vector<std::string> f = {r.id, r.name};
    for (Index i = 0; i < r.features.size(); ++i) f.push_back(csv::format_real(r.features(i)));
    csv::write_row(out, f);
  }
}

PerceptSet load_percepts(const std::string& path) {
  const csv::Table t = csv::read(path);
  csv::expect_header_prefix(t, {"id"});
  const std::size_t arity = t.header.fields.size();
  if (arity < 2) throw ParseError(path, t.header.line, 0, "no descriptor columns");
  require_rows(t);
  PerceptSet set;
  set.descriptor_names.assign(t.header.fields.begin() + 1, t.header.fields.end());
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    if (row.fields.size() != arity) {
      throw DimensionMismatch(path + ":" + std::to_string(row.line) + ": expected " +
                              std::to_string(arity - 1) + " scores, found " +
                              std::to_string(row.fields.size() - 1));
    }
    PerceptRecord rec;
    rec.id = row.fields[0];
    if (rec.id.empty()) throw ParseError(path, row.line, 1, "empty id");
    if (!seen.insert(rec.id).second) {
      throw DuplicateId(path + ":" + std::to_string(row.line) + ": duplicate id '" + rec.id + "'");
    }
    rec.scores.resize(static_cast<Index>(arity - 1));
    for (std::size_t c = 1; c < arity; ++c) {
      const double v = csv::parse_real(t, row, c);
      if (v < 0.0 || v > 100.0) {
        throw ParseError(path, row.line, c + 1, "score outside [0, 100]");
      }
      rec.scores(static_cast<Index>(c - 1)) = v;
    }
    set.records.push_back(std::move(rec));
  }
  return set;
}

void save_percepts(const std::string& path, const PerceptSet& set,
                   std::string_view comment) {
  auto out = open_out(path);
  csv::write_comment(out, comment);
  std::vector<std::string> header = {"id"};
  header.insert(header.end(), set.descriptor_names.begin(), set.descriptor_names.end());
  csv::write_row(out, header);
  for (const auto& r : set.records) {
    std::vector<std::string> f = {r.id};
    for (Index i = 0; i < r.scores.size(); ++i) f.push_back(csv::format_real(r.scores(i)));
    csv::write_row(out, f);
  }
}

std::optional<double> parse_concentration(const std::string& text) {
  auto parse_plain = [](std::string_view s) -> std::optional<double> {
    csv::Table t;
    csv::Row row;
    row.fields.emplace_back(s);
    try {
      const double v = csv::parse_real(t, row, 0);
      return v;
    } catch (const ParseError&) {
      return std::nullopt;
    }
  };
  if (text == "trace") return kTraceConcentration;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_plain(std::string_view(text).substr(0, dots));
    const auto hi = parse_plain(std::string_view(text).substr(dots + 2));
    if (!lo || !hi || *hi < *lo) return std::nullopt;
    return 0.5 * (*lo + *hi);
  }
  return parse_plain(text);
}

MixtureSpec load_mixture(const std::string& path) {
  const csv::Table t = csv::read(path);
  csv::expect_header_prefix(t, {"id", "weight"});
  if (t.header.fields.size() != 2) throw ParseError(path, t.header.line, 3, "unexpected column");
  csv::expect_rectangular(t);
  require_rows(t);
  MixtureSpec spec;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    const auto w = parse_concentration(row.fields[1]);
    if (!w) throw ParseError(path, row.line, 2, "invalid weight '" + row.fields[1] + "'");
    if (*w < 0.0) throw ParseError(path, row.line, 2, "negative weight");
    if (!seen.insert(row.fields[0]).second) {
      throw DuplicateId(path + ":" + std::to_string(row.line) + ": duplicate id '" +
                        row.fields[0] + "'");
    }
    spec.entries.push_back({row.fields[0], *w});
  }
  try {
    spec.validate();
  } catch (const InvalidConfig& e) {
    throw ParseError(path, 0, 0, e.what());
  }
  return spec;
}

void save_mixture(const std::string& path, const MixtureSpec& spec,
                  std::string_view comment) {
  auto out = open_out(path);
  csv::write_comment(out, comment);
  csv::write_row(out, {"id", "weight"});
  for (const auto& e : spec.entries) csv::write_row(out, {e.id, csv::format_real(e.weight)});
}

void normalize_columns(Matrix& weights) {
  for (Index j = 0; j < weights.cols(); ++j) {
    const double n = weights.col(j).norm();
    if (n > 0.0) weights.col(j) /= n;
  }
}

IngredientTable load_ingredients(const std::string& path, const Dictionary& dict) {
  const csv::Table t = csv::read(path);
  csv::expect_header_prefix(t, {"ingredient_id", "compound_id", "concentration"});
  if (t.header.fields.size() != 3) throw ParseError(path, t.header.line, 4, "unexpected column");
  csv::expect_rectangular(t);
  require_rows(t);

  IngredientTable table;
  table.compound_ids = dict.ids();
  std::map<std::string, Index> column;
  std::vector<std::tuple<Index, Index, double>> cells;
  std::set<std::pair<Index, Index>> seen;
  for (const auto& row : t.rows) {
    const auto conc = parse_concentration(row.fields[2]);
    if (!conc || *conc < 0.0) {
      throw ParseError(path, row.line, 3, "invalid concentration '" + row.fields[2] + "'");
    }
    const auto compound = dict.find(row.fields[1]);
    if (!compound) {
      throw UnknownCompound(path + ":" + std::to_string(row.line) + ": unknown compound '" +
                            row.fields[1] + "'");
    }
    auto [it, inserted] = column.emplace(row.fields[0], static_cast<Index>(table.ingredient_ids.size()));
    if (inserted) table.ingredient_ids.push_back(row.fields[0]);
    if (!seen.emplace(it->second, *compound).second) {
      throw DuplicateId(path + ":" + std::to_string(row.line) + ": compound '" + row.fields[1] +
                        "' listed twice for ingredient '" + row.fields[0] + "'");
    }
    cells.emplace_back(*compound, it->second, *conc);
  }
  table.weights = Matrix::Zero(dict.size(), static_cast<Index>(table.ingredient_ids.size()));
  for (const auto& [r, c, v] : cells) table.weights(r, c) = v;
  for (Index j = 0; j < table.weights.cols(); ++j) {
    if (table.weights.col(j).norm() == 0.0) {
      throw ParseError(path, 0, 0,
                       "ingredient '" + table.ingredient_ids[static_cast<std::size_t>(j)] +
                           "' has no positive concentration");
    }
  }
  normalize_columns(table.weights);
  return table;
}

void save_ingredients(const std::string& path, const IngredientTable& table,
                      std::string_view comment) {
  auto out = open_out(path);
  csv::write_comment(out, comment);
  csv::write_row(out, {"ingredient_id", "compound_id", "concentration"});
  for (Index j = 0; j < table.weights.cols(); ++j) {
    for (Index i = 0; i < table.weights.rows(); ++i) {
      if (table.weights(i, j) == 0.0) continue;
      csv::write_row(out, {table.ingredient_ids[static_cast<std::size_t>(j)],
                           table.compound_ids[static_cast<std::size_t>(i)],
                           csv::format_real(table.weights(i, j))});
    }
  }
}

// --- mixing --------------------------------------------------------------

Vector mixture_weights(const Dictionary& dict, const MixtureSpec& spec, bool normalize) {
  spec.validate();
  Vector w = Vector::Zero(dict.size());
  for (const auto& e : spec.entries) w(dict.index_of(e.id)) += e.weight;
  if (normalize) w /= w.norm();
  return w;
}

Vector mix(const Dictionary& dict, const MixtureSpec& spec, bool normalize) {
  return dict.features() * mixture_weights(dict, spec, normalize);
}

// --- synthetic data ------------------------------------------------------

namespace {

// Registry-style identifier NNNNN-DD-C with the CAS check digit.
std::string registry_id(Index serial) {
  const std::string head = std::to_string(10000 + serial);
  const std::string mid = (serial * 37 % 100 < 10 ? "0" : "") + std::to_string(serial * 37 % 100);
  const std::string digits = head + mid;
  int sum = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    sum += static_cast<int>(i + 1) * (digits[digits.size() - 1 - i] - '0');
  }
  return head + "-" + mid + "-" + std::to_string(sum % 10);
}

constexpr double kFeatureOffset = 5.0;
constexpr double kFeatureSpread = 2.0;
constexpr double kLatentSpread = 4.0;
constexpr double kBaselineLoading = 10.0;
constexpr double kFactorLoading = 2.0;

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.k < 1 || cfg.l < 1 || cfg.n_train < 1 || cfg.n_dict < 1 || cfg.true_rank < 1) {
    throw InvalidConfig("synthetic: all counts must be at least 1");
  }
  if (cfg.true_rank > std::min(cfg.k, cfg.l)) {
    throw InvalidConfig("synthetic: true_rank must not exceed min(k, l)");
  }
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    throw InvalidConfig("synthetic: noise_sigma must be finite and nonnegative");
  }
  const Index k = cfg.k;
  const Index l = cfg.l;
  const Index r = cfg.true_rank;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto gaussian = [&](Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
    return m;
  };

  // Latent perceptual directions in feature space: the mean direction plus
  // r-1 orthonormal directions orthogonal to it.
  Matrix latent = Matrix::Zero(k, std::max<Index>(r - 1, 0));
  if (r > 1) {
    Matrix g = gaussian(k, r - 1);
    g.rowwise() -= g.colwise().mean();
    if (k == 1) g.setZero();
    Eigen::HouseholderQR<Matrix> qr(g);
    latent = qr.householderQ() * Matrix::Identity(k, r - 1);
  }
  Matrix loading_in(r, k);
  loading_in.row(0).setConstant(1.0 / static_cast<double>(k));
  if (r > 1) loading_in.bottomRows(r - 1) = latent.transpose();

  Matrix loading_out(l, r);
  for (Index i = 0; i < l; ++i) loading_out(i, 0) = kBaselineLoading * (0.8 + 0.4 * unit(rng));
  for (Index j = 1; j < r; ++j)
    for (Index i = 0; i < l; ++i) loading_out(i, j) = kFactorLoading * (2.0 * unit(rng) - 1.0);

  SyntheticData out;
  out.ground_truth = loading_out * loading_in;

  auto draw_features = [&](Index n, bool dictionary) {
    Matrix x = kFeatureSpread * gaussian(k, n);
    if (r > 1) x += kLatentSpread * latent * gaussian(r - 1, n);
    for (Index j = 0; j < n; ++j) {
      const double offset = dictionary ? kFeatureOffset * (2.0 * unit(rng) - 1.0) : kFeatureOffset;
      x.col(j).array() += offset;
    }
    return x;
  };

  const Matrix x_train = draw_features(cfg.n_train, false);
  const Matrix noise = gaussian(l, cfg.n_train);
  const Matrix y = (out.ground_truth * x_train + cfg.noise_sigma * noise).cwiseMax(0.0).cwiseMin(100.0);
  const Matrix x_dict = draw_features(cfg.n_dict, true);

  for (Index i = 0; i < k; ++i) out.compounds.feature_names.push_back("f" + std::to_string(i + 1));
  out.dictionary.feature_names = out.compounds.feature_names;
  for (Index i = 0; i < l; ++i) out.percepts.descriptor_names.push_back("d" + std::to_string(i + 1));

  for (Index j = 0; j < cfg.n_train; ++j) {
    const std::string id = registry_id(j);
    out.compounds.records.push_back({id, "train-" + std::to_string(j + 1), x_train.col(j)});
    out.percepts.records.push_back({id, y.col(j)});
  }
  for (Index j = 0; j < cfg.n_dict; ++j) {
    out.dictionary.records.push_back(
        {registry_id(cfg.n_train + j), "candidate-" + std::to_string(j + 1), x_dict.col(j)});
  }
  return out;
}

SyntheticDesignInputs generate_design_inputs(const SyntheticData& data, std::uint64_t seed,
                                             Index n_malodors, Index n_ingredients) {
  const auto& recs = data.dictionary.records;
  if (recs.empty()) throw InvalidConfig("design inputs need a nonempty dictionary");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Compounds sitting on the characterized (positive-offset) side of the
  // feature space smell like ordinary foods; those are the offenders.
  std::vector<Index> smelly;
  std::vector<Index> all;
  for (std::size_t j = 0; j < recs.size(); ++j) {
    all.push_back(static_cast<Index>(j));
    if (recs[j].features.mean() > 0.4 * kFeatureOffset) smelly.push_back(static_cast<Index>(j));
  }
  if (smelly.empty()) smelly = all;

  auto draw = [&](const std::vector<Index>& pool, Index count, double lo, double hi) {
    std::vector<Index> idx = pool;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(std::min<Index>(count, static_cast<Index>(idx.size()))));
    std::sort(idx.begin(), idx.end());
    MixtureSpec spec;
    for (Index j : idx) {
      spec.entries.push_back({recs[static_cast<std::size_t>(j)].id, lo + (hi - lo) * unit(rng)});
    }
    return spec;
  };

  SyntheticDesignInputs out;
  for (Index m = 0; m < n_malodors; ++m) out.malodors.push_back(draw(smelly, 5, 0.2, 1.0));
  out.hidden = draw(smelly, 6, 0.01, 0.65);
  out.cover = draw(all, 5, 0.1, 1.0);

  const Index n = static_cast<Index>(recs.size());
  out.ingredients.compound_ids.reserve(recs.size());
  for (const auto& r : recs) out.ingredients.compound_ids.push_back(r.id);
  out.ingredients.weights = Matrix::Zero(n, n_ingredients);
  for (Index j = 0; j < n_ingredients; ++j) {
    out.ingredients.ingredient_ids.push_back("ingredient-" + std::to_string(j + 1));
    const MixtureSpec contents = draw(all, 4 + static_cast<Index>(unit(rng) * 5), 0.001, 1.0);
    for (const auto& e : contents.entries) {
      const auto it = std::find_if(recs.begin(), recs.end(), [&](const CompoundRecord& c) { return c.id == e.id; });
      out.ingredients.weights(static_cast<Index>(it - recs.begin()), j) = e.weight;
    }
  }
  normalize_columns(out.ingredients.weights);
  return out;
}

}  // namespace olfact
