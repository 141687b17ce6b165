#pragma once

// Datasets, CSV reading and writing, the two synthetic generators, and JSON model
// documents.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "json.hpp"

#include "stretchy/errors.hpp"
#include "stretchy/estimator.hpp"
#include "stretchy/numeric.hpp"

namespace stretchy {

enum class Task { regression, classification };

inline const char* to_string(Task t) { return t == Task::regression ? "regression" : "classification"; }

inline Task task_from_string(const std::string& s) {
  if (s == "regression") return Task::regression;
  if (s == "classification") return Task::classification;
  throw InvalidParameter("task", "expected 'regression' or 'classification', got '" + s + "'");
}

struct Dataset {
  std::string name;
  Matrix features;
  Vector targets;
  Task task = Task::regression;
  std::vector<std::string> feature_names;  // optional; defaults to x1..xd on save
  std::string target_name = "y";

  Index samples() const { return features.rows(); }

  void validate() const {
    if (features.rows() != targets.size()) {
      throw DimensionMismatch("dataset '" + name + "' has " + std::to_string(features.rows()) +
                              " feature rows and " + std::to_string(targets.size()) + " targets");
    }
    if (task == Task::classification) {
      for (Index i = 0; i < targets.size(); ++i) {
        if (targets(i) != 1.0 && targets(i) != -1.0) {
          throw InvalidParameter("targets", "classification labels must be -1 or +1");
        }
      }
    }
  }
};

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) {
    return false;
  }
  if (s.front() == '+') {
    s.remove_prefix(1);
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    cells.emplace_back(trim(cell));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace detail

/// Header plus numeric body of a comma-separated file.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  /// Index of a header name, or header.size() when absent.
  std::size_t find(const std::string& column) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == column) return j;
    }
    return header.size();
  }
};

/// Reads a rectangular, fully numeric CSV with a header row. Blank lines are skipped.
inline CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(1, 1, "missing header row");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line.erase(0, 3);  // UTF-8 BOM
  }
  CsvTable table;
  table.header = detail::split_csv_line(line);
  const std::size_t width = table.header.size();

  std::vector<double> cells_flat;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != width) {
      throw ParseError(line_no, std::min(cells.size(), width) + 1,
                       "expected " + std::to_string(width) + " cells, found " +
                           std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      double v = 0.0;
      if (!parse_double(cells[j], v) || !std::isfinite(v)) {
        throw NonNumericCell(line_no, j + 1, cells[j]);
      }
      cells_flat.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) {
    throw ParseError(line_no, 1, "no data rows");
  }
  table.values.resize(static_cast<Index>(rows), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = cells_flat[i * width + j];
    }
  }
  return table;
}

/// All columns except `drop` (header.size() drops nothing).
inline Matrix columns_except(const CsvTable& table, std::size_t drop) {
  const auto width = static_cast<Index>(table.header.size());
  Matrix out(table.values.rows(), drop < table.header.size() ? width - 1 : width);
  Index c = 0;
  for (Index j = 0; j < width; ++j) {
    if (static_cast<std::size_t>(j) != drop) out.col(c++) = table.values.col(j);
  }
  return out;
}

/// Target column selected by header name or zero-based index.
using TargetColumn = std::variant<std::string, std::size_t>;

/// Reads a comma-separated file with a header row. Every non-target column becomes a
/// feature, in file order. Classification targets in {0, 1} are remapped to {-1, +1}.
inline Dataset load_csv(const std::string& path, const TargetColumn& target, Task task,
                        const std::string& name = {}) {
  const CsvTable table = read_csv_table(path);
  std::size_t target_idx = table.header.size();
  if (const auto* col = std::get_if<std::string>(&target)) {
    target_idx = table.find(*col);
    if (target_idx == table.header.size()) throw MissingTarget(*col);
  } else {
    target_idx = std::get<std::size_t>(target);
    if (target_idx >= table.header.size()) throw MissingTarget(std::to_string(target_idx));
  }
  if (table.header.size() < 2) {
    throw ParseError(1, 1, "need at least one feature column besides the target");
  }

  Dataset ds;
  ds.name = name.empty() ? path : name;
  ds.task = task;
  ds.target_name = table.header[target_idx];
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != target_idx) ds.feature_names.push_back(table.header[j]);
  }
  ds.features = columns_except(table, target_idx);
  ds.targets = table.values.col(static_cast<Index>(target_idx));
  if (task == Task::classification) {
    const bool zero_one = (ds.targets.array() == 0.0 || ds.targets.array() == 1.0).all();
    const bool has_zero = (ds.targets.array() == 0.0).any();
    if (zero_one && has_zero) {
      ds.targets = (2.0 * ds.targets.array() - 1.0).matrix();
    }
  }
  ds.validate();
  return ds;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  out << content;
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Features first (in order), target last.
inline std::string dataset_to_csv(const Dataset& ds) {
  std::string out;
  for (Index j = 0; j < ds.features.cols(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    out += idx < ds.feature_names.size() ? ds.feature_names[idx] : "x" + std::to_string(j + 1);
    out += ',';
  }
  out += ds.target_name;
  out += '\n';
  for (Index i = 0; i < ds.features.rows(); ++i) {
    for (Index j = 0; j < ds.features.cols(); ++j) {
      out += format_double(ds.features(i, j));
      out += ',';
    }
    out += format_double(ds.targets(i));
    out += '\n';
  }
  return out;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
  write_text_file(path, dataset_to_csv(ds));
}

// ---------------------------------------------------------------------------------------
// Synthetic data

enum class SynthKind { poly1d, twoclass2d };

inline SynthKind synth_kind_from_string(const std::string& s) {
  if (s == "poly1d") return SynthKind::poly1d;
  if (s == "twoclass2d") return SynthKind::twoclass2d;
  throw InvalidParameter("kind", "expected 'poly1d' or 'twoclass2d', got '" + s + "'");
}

inline const char* to_string(SynthKind k) { return k == SynthKind::poly1d ? "poly1d" : "twoclass2d"; }

/// Seed whose two-class sample is checked to contain overlapping points.
inline constexpr std::uint64_t kDefaultTwoClassSeed = 14;

/// Noise level used for the noisy polynomial data.
inline constexpr double kTableNoiseSigma = 0.05;

struct SynthSpec {
  SynthKind kind = SynthKind::poly1d;
  Index n_samples = 5;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
};

/// Ground truth 1 + 0.6 x - 1.5 x^3 + 0.8 x^4.
inline double poly1d_truth(double x) {
  return 1.0 + 0.6 * x - 1.5 * x * x * x + 0.8 * x * x * x * x;
}

/// x on the grid {0.1, ..., 0.5} when n = 5, otherwise uniform on [0.1, 0.5]; Gaussian
/// noise of standard deviation noise_sigma on y. Noise-free data ignores the seed.
inline Dataset synth_poly1d(const SynthSpec& spec) {
  if (spec.n_samples < 1) {
    throw InvalidParameter("n_samples", "must be at least 1");
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw InvalidParameter("noise_sigma", "must be non-negative");
  }
  Rng rng(spec.seed);
  Dataset ds;
  ds.name = "poly1d";
  ds.task = Task::regression;
  ds.feature_names = {"x"};
  ds.features.resize(spec.n_samples, 1);
  ds.targets.resize(spec.n_samples);
  for (Index i = 0; i < spec.n_samples; ++i) {
    const double x = spec.n_samples == 5 ? 0.1 * static_cast<double>(i + 1) : rng.uniform(0.1, 0.5);
    ds.features(i, 0) = x;
  }
  for (Index i = 0; i < spec.n_samples; ++i) {
    const double noise = spec.noise_sigma > 0.0 ? rng.normal(0.0, spec.noise_sigma) : 0.0;
    ds.targets(i) = poly1d_truth(ds.features(i, 0)) + noise;
  }
  return ds;
}

/// Two Gaussian clusters centred at (-1, -1) (label -1) and (+1, +1) (label +1) with
/// covariance 0.8 I. The first half of the rows is class -1.
inline Dataset synth_twoclass2d(const SynthSpec& spec) {
  if (spec.n_samples < 2) {
    throw InvalidParameter("n_samples", "need at least one point per class");
  }
  Rng rng(spec.seed);
  const double sd = std::sqrt(0.8);
  const Index negatives = spec.n_samples / 2;
  Dataset ds;
  ds.name = "twoclass2d";
  ds.task = Task::classification;
  ds.feature_names = {"x1", "x2"};
  ds.features.resize(spec.n_samples, 2);
  ds.targets.resize(spec.n_samples);
  for (Index i = 0; i < spec.n_samples; ++i) {
    const double label = i < negatives ? -1.0 : 1.0;
    ds.features(i, 0) = rng.normal(label, sd);
    ds.features(i, 1) = rng.normal(label, sd);
    ds.targets(i) = label;
  }
  return ds;
}

inline Dataset synthesize(const SynthSpec& spec) {
  return spec.kind == SynthKind::poly1d ? synth_poly1d(spec) : synth_twoclass2d(spec);
}

// ---------------------------------------------------------------------------------------
// Model documents

inline constexpr int kModelSchemaVersion = 1;

namespace detail {

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

inline Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

// JSON has no infinity; non-finite reals travel as strings.
inline nlohmann::json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline nlohmann::json spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["basis"] = {{"kind", to_string(spec.basis.kind)},
                {"order", spec.basis.order},
                {"intercept", spec.basis.include_intercept}};
  j["transform"] = {{"standardize", spec.transform.standardize},
                    {"quadrant_map", spec.transform.quadrant_map},
                    {"a", spec.transform.a},
                    {"b", detail::vector_to_json(spec.transform.b)}};
  nlohmann::json stretch = {{"k", spec.stretch.k}, {"rcond", spec.stretch.rcond_threshold}};
  if (spec.stretch.exact()) {
    stretch["c"] = "exact";
  } else {
    stretch["c"] = spec.stretch.c();
  }
  j["stretch"] = stretch;
  j["density"] = spec.density;
  return j;
}

inline ModelSpec spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  const auto& basis = j.at("basis");
  spec.basis.kind = basis_kind_from_string(basis.at("kind").get<std::string>());
  spec.basis.order = basis.at("order").get<int>();
  spec.basis.include_intercept = basis.at("intercept").get<bool>();
  const auto& tr = j.at("transform");
  spec.transform.standardize = tr.at("standardize").get<bool>();
  spec.transform.quadrant_map = tr.at("quadrant_map").get<bool>();
  spec.transform.a = tr.at("a").get<double>();
  spec.transform.b = detail::vector_from_json(tr.at("b"));
  const auto& st = j.at("stretch");
  spec.stretch.k = st.at("k").get<double>();
  spec.stretch.rcond_threshold = st.at("rcond").get<double>();
  if (st.at("c").is_string()) {
    spec.stretch.reg = Exact{};
  } else {
    spec.stretch.reg = Regularized{st.at("c").get<double>()};
  }
  spec.density = j.at("density").get<double>();
  return spec;
}

inline nlohmann::json model_to_json(const FittedModel& model) {
  nlohmann::json j;
  j["schema_version"] = kModelSchemaVersion;
  j["spec"] = spec_to_json(model.spec);
  if (model.transform) {
    j["transform_params"] = {{"means", detail::vector_to_json(model.transform->means)},
                             {"stds", detail::vector_to_json(model.transform->stds)},
                             {"a", model.transform->a},
                             {"b", detail::vector_to_json(model.transform->b)}};
  } else {
    j["transform_params"] = nullptr;
  }
  j["full_columns"] = model.full_columns;
  j["selected_columns"] = model.selected_columns;
  nlohmann::json coef;
  coef["solver_form"] = to_string(model.coefficients.form);
  coef["alpha"] = detail::vector_to_json(model.coefficients.alpha);
  coef["beta"] = model.coefficients.beta ? detail::vector_to_json(*model.coefficients.beta)
                                         : nlohmann::json(nullptr);
  coef["condition_report"] = detail::real_to_json(model.coefficients.condition_report);
  j["coefficients"] = coef;
  j["training_positivity"] = model.training_positivity;
  j["first_pass_residual"] = detail::real_to_json(model.first_pass_residual);
  j["residual"] = detail::real_to_json(model.residual);
  return j;
}

inline FittedModel model_from_json(const nlohmann::json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kModelSchemaVersion) {
    throw SchemaVersionMismatch(version, kModelSchemaVersion);
  }
  FittedModel model;
  model.spec = spec_from_json(j.at("spec"));
  const auto& tp = j.at("transform_params");
  if (!tp.is_null()) {
    TransformParams p;
    p.means = detail::vector_from_json(tp.at("means"));
    p.stds = detail::vector_from_json(tp.at("stds"));
    p.a = tp.at("a").get<double>();
    p.b = detail::vector_from_json(tp.at("b"));
    model.transform = p;
  }
  model.full_columns = j.at("full_columns").get<Index>();
  model.selected_columns = j.at("selected_columns").get<std::vector<Index>>();
  const auto& coef = j.at("coefficients");
  model.coefficients.form = solver_form_from_string(coef.at("solver_form").get<std::string>());
  model.coefficients.alpha = detail::vector_from_json(coef.at("alpha"));
  if (!coef.at("beta").is_null()) {
    model.coefficients.beta = detail::vector_from_json(coef.at("beta"));
  }
  model.coefficients.condition_report = detail::real_from_json(coef.at("condition_report"));
  model.training_positivity = j.at("training_positivity").get<bool>();
  model.first_pass_residual = detail::real_from_json(j.at("first_pass_residual"));
  model.residual = detail::real_from_json(j.at("residual"));
  if (static_cast<Index>(model.selected_columns.size()) != model.coefficients.alpha.size()) {
    throw ParseError(1, 1, "selected_columns and alpha lengths differ");
  }
  return model;
}

inline void save_model(const FittedModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model).dump(2) + "\n");
}

inline FittedModel load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(1, e.byte, e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, 1, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace stretchy
