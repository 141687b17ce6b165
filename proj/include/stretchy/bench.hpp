#pragma once

// Benchmark harness: a JSON run manifest expands into (dataset x configuration x trial x
// fold) cells, each scored by repeated cross-validation. Results go to CSV files.
//
// Manifest layout:
//   {
//     "datasets": [
//       {"name": "poly", "synth": {"kind": "poly1d", "n": 40, "sigma": 0.05, "seed": 3}},
//       {"name": "d", "path": "d.csv", "target": "y", "task": "classification"}
//     ],
//     "algorithms": [
//       {"name": "SR", "k": [1.5, 2] | "paper-grid", "c": [100, "exact"] | "paper-grid",
//        "density": [1.0, 0.1], "basis": "poly:3", "intercept": true,
//        "standardize": true, "quadrant_map": true, "a": -0.2, "b": [0, 0]}
//     ],
//     "plan": {"trials": 10, "folds": 2, "seed": 1},
//     "output_dir": "results",
//     "stats": true
//   }

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stretchy/data_io.hpp"
#include "stretchy/errors.hpp"
#include "stretchy/evaluation.hpp"
#include "stretchy/estimator.hpp"

namespace stretchy {

inline const std::vector<double>& default_k_grid() {
  static const std::vector<double> grid = {1.1, 1.25, 1.5, 1.75, 2.0};
  return grid;
}

/// Regularization grid; 1e100 stands for the exact solution.
inline const std::vector<double>& default_c_grid() {
  static const std::vector<double> grid = {10.0, 1e2, 1e3, 1e4, 1e8, 1e100};
  return grid;
}

inline Regularization regularization_from_c(double c) {
  if (c >= kExactThreshold) {
    return Exact{};
  }
  return Regularized{c};
}

/// "raw", "poly:N" (univariate) or "poly2:N" (bivariate).
inline BasisSpec parse_basis(const std::string& text, bool intercept = true) {
  BasisSpec spec;
  spec.include_intercept = intercept;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  spec.kind = basis_kind_from_string(kind);
  if (spec.kind == BasisKind::raw) {
    if (colon != std::string::npos) {
      throw InvalidParameter("basis", "raw basis takes no order");
    }
    spec.order = 1;
    return spec;
  }
  if (colon == std::string::npos) {
    throw InvalidParameter("basis", "'" + text + "' needs an order, e.g. poly:10");
  }
  double order = 0.0;
  if (!parse_double(text.substr(colon + 1), order) || order < 0 || order != std::floor(order)) {
    throw InvalidParameter("basis", "bad order in '" + text + "'");
  }
  spec.order = static_cast<int>(order);
  return spec;
}

struct DatasetEntry {
  std::string name;
  std::optional<std::string> path;
  std::string target = "y";
  Task task = Task::regression;
  std::optional<SynthSpec> synth;
};

struct AlgorithmConfig {
  std::string name;
  ModelSpec spec;
};

struct RunManifest {
  std::vector<DatasetEntry> datasets;
  std::vector<AlgorithmConfig> algorithms;
  CvPlan plan;
  std::string output_dir = "results";
  bool stats = false;

  void validate() const {
    if (datasets.empty()) throw InvalidParameter("manifest", "no datasets");
    if (algorithms.empty()) throw InvalidParameter("manifest", "no algorithms");
    plan.validate();
  }
};

namespace detail {

inline std::vector<double> grid_from_json(const nlohmann::json& j, const std::string& what,
                                          const std::vector<double>& preset) {
  if (j.is_string()) {
    if (j.get<std::string>() == "paper-grid") return preset;
    if (what == "c" && j.get<std::string>() == "exact") return {std::numeric_limits<double>::infinity()};
    throw InvalidParameter(what, "unknown grid keyword '" + j.get<std::string>() + "'");
  }
  if (j.is_number()) return {j.get<double>()};
  std::vector<double> out;
  for (const auto& item : j) {
    if (item.is_string() && what == "c" && item.get<std::string>() == "exact") {
      out.push_back(std::numeric_limits<double>::infinity());
    } else {
      out.push_back(item.get<double>());
    }
  }
  if (out.empty()) throw InvalidParameter(what, "grid is empty");
  return out;
}

inline std::string c_label(const Regularization& reg) {
  return std::holds_alternative<Exact>(reg) ? "exact" : format_double(std::get<Regularized>(reg).c);
}

}  // namespace detail

/// Expands every algorithm entry into its (density x k x c) grid of configurations.
inline RunManifest manifest_from_json(const nlohmann::json& j, const std::string& base_dir,
                                      std::uint64_t default_seed) {
  RunManifest m;
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? p : (std::filesystem::path(base_dir) / path).string();
  };
  for (const auto& d : j.at("datasets")) {
    DatasetEntry e;
    e.name = d.at("name").get<std::string>();
    if (d.contains("synth")) {
      const auto& s = d.at("synth");
      SynthSpec spec;
      spec.kind = synth_kind_from_string(s.at("kind").get<std::string>());
      spec.n_samples = s.value("n", spec.kind == SynthKind::poly1d ? Index{5} : Index{20});
      spec.noise_sigma = s.value("sigma", 0.0);
      spec.seed = s.value("seed", spec.kind == SynthKind::poly1d ? default_seed : kDefaultTwoClassSeed);
      e.synth = spec;
      e.task = spec.kind == SynthKind::poly1d ? Task::regression : Task::classification;
    } else {
      e.path = resolve(d.at("path").get<std::string>());
      e.target = d.value("target", std::string("y"));
      e.task = task_from_string(d.value("task", std::string("regression")));
    }
    m.datasets.push_back(std::move(e));
  }
  for (const auto& a : j.at("algorithms")) {
    const std::string prefix = a.value("name", std::string("SR"));
    const auto ks = detail::grid_from_json(a.at("k"), "k", default_k_grid());
    const auto cs = detail::grid_from_json(a.value("c", nlohmann::json("exact")), "c", default_c_grid());
    const auto densities = detail::grid_from_json(a.value("density", nlohmann::json(1.0)), "density", {1.0});
    ModelSpec base;
    base.basis = parse_basis(a.value("basis", std::string("raw")), a.value("intercept", true));
    base.transform.standardize = a.value("standardize", false);
    base.transform.quadrant_map = a.value("quadrant_map", false);
    base.transform.a = a.value("a", kNominalQuadrantSlope);
    if (a.contains("b")) base.transform.b = detail::vector_from_json(a.at("b"));
    for (double density : densities) {
      for (double k : ks) {
        for (double c : cs) {
          AlgorithmConfig cfg;
          cfg.spec = base;
          cfg.spec.density = density;
          cfg.spec.stretch.k = k;
          cfg.spec.stretch.reg = regularization_from_c(c);
          cfg.name = prefix + format_double(density) + "_k" + format_double(k) + "_c" +
                     detail::c_label(cfg.spec.stretch.reg);
          cfg.spec.validate();
          m.algorithms.push_back(std::move(cfg));
        }
      }
    }
  }
  if (j.contains("plan")) {
    const auto& p = j.at("plan");
    m.plan.trials = p.value("trials", m.plan.trials);
    m.plan.folds = p.value("folds", m.plan.folds);
    m.plan.seed = p.value("seed", default_seed);
  } else {
    m.plan.seed = default_seed;
  }
  m.output_dir = resolve(j.value("output_dir", std::string("results")));
  m.stats = j.value("stats", false);
  m.validate();
  return m;
}

inline RunManifest load_manifest(const std::string& path, std::uint64_t default_seed) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(1, e.byte, e.what());
  }
  try {
    return manifest_from_json(j, std::filesystem::path(path).parent_path().string(), default_seed);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, 1, std::string("malformed manifest: ") + e.what());
  }
}

struct RunRow {
  std::string dataset;
  std::string config;
  std::size_t trial = 0;
  std::size_t fold = 0;
  std::optional<Metrics> metrics;
  std::string error;
};

struct BenchReport {
  std::vector<RunRow> rows;
  std::string runs_csv;
  std::string summary_csv;
  std::string timing_csv;
  std::string stats_csv;  // empty unless requested and computable

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.metrics ? 0 : 1;
    return n;
  }
};

namespace detail {

inline std::string csv_safe(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

struct MeanStd {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();
};

inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd r;
  if (v.empty()) return r;
  double sum = 0.0;
  for (double x : v) sum += x;
  r.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return r;
}

inline std::string fmt_or_empty(double v) { return std::isnan(v) ? "" : format_double(v); }

}  // namespace detail

/// Runs every cell and renders the CSV documents. Failed cells become rows with an error
/// message; the rest of the grid still runs.
inline BenchReport run_bench(const RunManifest& manifest) {
  manifest.validate();
  BenchReport report;
  const std::size_t n_cfg = manifest.algorithms.size();
  const std::size_t n_cells = manifest.plan.trials * manifest.plan.folds;
  // score[dataset][config] for the rank statistics: mean BER or mean MSE.
  std::vector<std::vector<double>> scores(manifest.datasets.size(), std::vector<double>(n_cfg));

  std::string summary =
      "dataset,config,runs,failed,mse_mean,mse_std,rmse_mean,rmse_std,ber_mean,ber_std\n";
  std::string timing = "dataset,config,train_seconds_mean,train_seconds_std\n";

  for (std::size_t di = 0; di < manifest.datasets.size(); ++di) {
    const DatasetEntry& entry = manifest.datasets[di];
    std::optional<Dataset> data;
    std::vector<Split> splits;
    std::string load_error;
    try {
      if (entry.synth) {
        data = synthesize(*entry.synth);
      } else {
        data = load_csv(*entry.path, entry.target, entry.task, entry.name);
      }
      data->name = entry.name;
      data->validate();
      splits = cv_splits(*data, manifest.plan);
    } catch (const std::exception& e) {
      load_error = std::string("dataset: ") + e.what();
    }

    for (std::size_t ci = 0; ci < n_cfg; ++ci) {
      const AlgorithmConfig& cfg = manifest.algorithms[ci];
      std::vector<double> mses, rmses, bers, secs;
      std::size_t failed = 0;
      for (std::size_t cell = 0; cell < n_cells; ++cell) {
        RunRow row;
        row.dataset = entry.name;
        row.config = cfg.name;
        row.trial = cell / manifest.plan.folds;
        row.fold = cell % manifest.plan.folds;
        if (!load_error.empty()) {
          row.error = load_error;
        } else {
          const Split& s = splits[cell];
          try {
            row.metrics = evaluate_split(subset(*data, s.train), subset(*data, s.test), cfg.spec);
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
        if (row.metrics) {
          mses.push_back(row.metrics->mse);
          rmses.push_back(row.metrics->rmse);
          if (row.metrics->ber) bers.push_back(*row.metrics->ber);
          secs.push_back(row.metrics->train_seconds);
        } else {
          ++failed;
        }
        report.rows.push_back(std::move(row));
      }
      const auto m = detail::mean_std(mses);
      const auto r = detail::mean_std(rmses);
      const auto b = detail::mean_std(bers);
      const auto t = detail::mean_std(secs);
      summary += entry.name + "," + cfg.name + "," + std::to_string(n_cells) + "," +
                 std::to_string(failed) + "," + detail::fmt_or_empty(m.mean) + "," +
                 detail::fmt_or_empty(m.std) + "," + detail::fmt_or_empty(r.mean) + "," +
                 detail::fmt_or_empty(r.std) + "," + detail::fmt_or_empty(b.mean) + "," +
                 detail::fmt_or_empty(b.std) + "\n";
      timing += entry.name + "," + cfg.name + "," + detail::fmt_or_empty(t.mean) + "," +
                detail::fmt_or_empty(t.std) + "\n";
      const bool classification = data && data->task == Task::classification;
      double score = classification ? b.mean : m.mean;
      if (failed > 0 || std::isnan(score)) score = std::numeric_limits<double>::infinity();
      scores[di][ci] = score;
    }
  }

  std::string runs = "dataset,config,trial,fold,mse,rmse,ber,train_seconds,error\n";
  for (const auto& row : report.rows) {
    runs += row.dataset + "," + row.config + "," + std::to_string(row.trial) + "," +
            std::to_string(row.fold) + ",";
    if (row.metrics) {
      runs += format_double(row.metrics->mse) + "," + format_double(row.metrics->rmse) + "," +
              (row.metrics->ber ? format_double(*row.metrics->ber) : "") + "," +
              format_double(row.metrics->train_seconds) + ",";
    } else {
      runs += ",,,," + detail::csv_safe(row.error);
    }
    runs += "\n";
  }
  report.runs_csv = std::move(runs);
  report.summary_csv = std::move(summary);
  report.timing_csv = std::move(timing);

  if (manifest.stats && manifest.datasets.size() >= 2 && n_cfg >= 2) {
    RankTable table;
    table.scores.resize(static_cast<Index>(manifest.datasets.size()), static_cast<Index>(n_cfg));
    for (std::size_t i = 0; i < manifest.datasets.size(); ++i) {
      for (std::size_t j = 0; j < n_cfg; ++j) {
        table.scores(static_cast<Index>(i), static_cast<Index>(j)) = scores[i][j];
      }
    }
    const FriedmanResult fr = friedman_test(table);
    std::string stats = "record,name,value\n";
    stats += "friedman,statistic," + format_double(fr.statistic) + "\n";
    stats += "friedman,p_value," + format_double(fr.p_value) + "\n";
    stats += "friedman,n_datasets," + std::to_string(manifest.datasets.size()) + "\n";
    stats += "friedman,n_algorithms," + std::to_string(n_cfg) + "\n";
    for (double alpha : {0.05, 0.10}) {
      std::string cd = "NA";
      if (n_cfg <= 10) cd = format_double(nemenyi_cd(n_cfg, manifest.datasets.size(), alpha));
      stats += "nemenyi,cd_" + format_double(alpha) + "," + cd + "\n";
    }
    for (std::size_t j = 0; j < n_cfg; ++j) {
      stats += "average_rank," + manifest.algorithms[j].name + "," +
               format_double(fr.average_ranks(static_cast<Index>(j))) + "\n";
    }
    report.stats_csv = std::move(stats);
  }
  return report;
}

/// Writes runs.csv, summary.csv, timing.csv and (when computed) stats.csv.
inline void write_bench_outputs(const BenchReport& report, const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  const std::filesystem::path dir(output_dir);
  write_text_file((dir / "runs.csv").string(), report.runs_csv);
  write_text_file((dir / "summary.csv").string(), report.summary_csv);
  write_text_file((dir / "timing.csv").string(), report.timing_csv);
  if (!report.stats_csv.empty()) {
    write_text_file((dir / "stats.csv").string(), report.stats_csv);
  }
}

}  // namespace stretchy
