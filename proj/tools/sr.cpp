// sr: command-line front end for stretchy regression.
//
//   sr synth poly1d --n 5 --sigma 0 --seed 1 --out d.csv
//   sr fit --train d.csv --target y --k 1.2 --exact --basis poly:10 --model-out m.json
//   sr predict --model m.json --input d.csv --target y --out p.csv
//   sr bench --manifest run.json
//   sr analyze condsweep --k-grid 1.05,1.5,2,10 --out sweep.csv
//   sr analyze variance --rows 10 --cols 4 --k 1.5 --c 100 --sigma 0.3 --out-prefix var

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stretchy/stretchy.hpp"

namespace {

using namespace stretchy;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SR_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring malformed SR_SEED='" << env << "'\n";
    }
  }
  return 1;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double v = 0.0;
    if (!parse_double(item, v) || !std::isfinite(v)) {
      throw CLI::ValidationError(flag, "'" + text + "' is not a comma-separated list of numbers");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Regularization regularization_flag(std::optional<double> c, bool exact) {
  if (exact || !c) {
    return Exact{};
  }
  return regularization_from_c(*c);
}

std::string c_echo(const Regularization& reg) {
  return std::holds_alternative<Exact>(reg) ? "exact" : format_double(std::get<Regularized>(reg).c);
}

std::string remedy(const std::exception& e) {
  if (dynamic_cast<const NegativeBase*>(&e)) {
    return "enable --quadrant-map (optionally with --standardize) so every design entry is positive";
  }
  if (dynamic_cast<const SingularMatrix*>(&e)) {
    return "use a finite --c, move k away from 1, or lower the basis order";
  }
  if (dynamic_cast<const MissingTarget*>(&e)) {
    return "check --target against the CSV header";
  }
  if (dynamic_cast<const IoError*>(&e)) {
    return "check the path";
  }
  return {};
}

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  const std::string hint = remedy(e);
  if (!hint.empty()) {
    std::cerr << "hint: " << hint << "\n";
  }
  return 1;
}

struct SynthArgs {
  std::string kind;
  long long n = -1;
  double sigma = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.kind = synth_kind_from_string(a.kind);
  spec.n_samples = a.n > 0 ? a.n : (spec.kind == SynthKind::poly1d ? 5 : 20);
  spec.noise_sigma = a.sigma;
  spec.seed = a.seed.value_or(spec.kind == SynthKind::poly1d ? default_seed() : kDefaultTwoClassSeed);
  const Dataset ds = synthesize(spec);
  save_csv(ds, a.out);
  std::cout << "wrote " << a.out << ": " << ds.features.rows() << " rows x "
            << ds.features.cols() << " features (" << to_string(ds.task) << ")\n";
  return 0;
}

struct FitArgs {
  std::string train;
  std::string target = "y";
  std::string task = "regression";
  double k = 2.0;
  std::optional<double> c;
  bool exact = false;
  double density = 1.0;
  std::string basis = "raw";
  bool no_intercept = false;
  bool standardize = false;
  bool quadrant_map = false;
  double a = kNominalQuadrantSlope;
  std::string b;
  double rcond = kDefaultRcond;
  std::string model_out;
};

int cmd_fit(const FitArgs& a) {
  const Dataset ds = load_csv(a.train, a.target, task_from_string(a.task));
  ModelSpec spec;
  spec.basis = parse_basis(a.basis, !a.no_intercept);
  spec.transform.standardize = a.standardize;
  spec.transform.quadrant_map = a.quadrant_map;
  spec.transform.a = a.a;
  if (!a.b.empty()) {
    const auto b = parse_real_list(a.b, "--b");
    spec.transform.b = b.size() == 1
                           ? Vector(Vector::Constant(ds.features.cols(), b[0]))
                           : Vector(Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size())));
  }
  spec.stretch.k = a.k;
  spec.stretch.reg = regularization_flag(a.c, a.exact);
  spec.stretch.rcond_threshold = a.rcond;
  spec.density = a.density;

  const FittedModel model = fit(ds.features, ds.targets, spec);
  save_model(model, a.model_out);

  const Vector& alpha = model.coefficients.alpha;
  const auto nonzero = (alpha.array().abs() >= 1e-8).count();
  std::cout << "solver_form: " << to_string(model.coefficients.form) << "\n"
            << "k: " << format_double(spec.stretch.k) << "\n"
            << "c: " << c_echo(spec.stretch.reg) << "\n"
            << "samples: " << ds.features.rows() << "\n"
            << "basis_columns: " << model.full_columns << "\n"
            << "retained_columns: " << model.selected_columns.size() << "\n"
            << "condition: " << format_double(model.coefficients.condition_report) << "\n"
            << "residual: " << format_double(model.residual) << "\n"
            << "nonzero_coefficients: " << nonzero << "\n"
            << "model: " << a.model_out << "\n";
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string input;
  std::string out;
  std::string target;
  bool classify = false;
};

int cmd_predict(const PredictArgs& a) {
  const FittedModel model = load_model(a.model);
  const CsvTable table = read_csv_table(a.input);
  std::size_t drop = table.header.size();
  if (!a.target.empty()) {
    drop = table.find(a.target);
    if (drop == table.header.size()) throw MissingTarget(a.target);
  }
  const Matrix x = columns_except(table, drop);
  const Vector scores = predict(model, x);
  const Vector out = a.classify ? sign_labels(scores) : scores;
  std::string csv = a.classify ? "label\n" : "prediction\n";
  for (Index i = 0; i < out.size(); ++i) {
    csv += format_double(out(i)) + "\n";
  }
  write_text_file(a.out, csv);
  std::cout << "wrote " << out.size() << (a.classify ? " labels" : " predictions") << " to "
            << a.out << "\n";
  return 0;
}

struct BenchArgs {
  std::string manifest;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> folds;
};

int cmd_bench(const BenchArgs& a) {
  RunManifest manifest = load_manifest(a.manifest, a.seed.value_or(default_seed()));
  if (a.seed) {
    manifest.plan.seed = *a.seed;
  }
  if (a.trials) manifest.plan.trials = *a.trials;
  if (a.folds) manifest.plan.folds = *a.folds;
  manifest.validate();
  if (!a.output_dir.empty()) {
    manifest.output_dir = a.output_dir;
  }
  const BenchReport report = run_bench(manifest);
  write_bench_outputs(report, manifest.output_dir);
  std::cout << "datasets: " << manifest.datasets.size() << "\n"
            << "configurations: " << manifest.algorithms.size() << "\n"
            << "runs: " << report.rows.size() << "\n"
            << "failed: " << report.failures() << "\n"
            << "output: " << manifest.output_dir << "\n";
  return report.failures() == 0 ? 0 : 1;
}

struct AnalyzeArgs {
  long long rows = 6;
  long long cols = 30;
  std::optional<std::uint64_t> seed;
  std::string design;
  std::string target;
  std::string k_grid = "1.05,1.1,1.25,1.5,1.75,2,3,5,10";
  double k = 2.0;
  std::optional<double> c;
  bool exact = false;
  double sigma = 0.1;
  std::string regime = "auto";
  std::string out;
};

Matrix analysis_design(const AnalyzeArgs& a) {
  if (!a.design.empty()) {
    const CsvTable table = read_csv_table(a.design);
    std::size_t drop = table.header.size();
    if (!a.target.empty()) {
      drop = table.find(a.target);
      if (drop == table.header.size()) throw MissingTarget(a.target);
    }
    return columns_except(table, drop);
  }
  if (a.rows < 1 || a.cols < 1) {
    throw InvalidParameter("rows/cols", "must be positive");
  }
  return random_positive_matrix(a.rows, a.cols, a.seed.value_or(kDiagnosticSeed));
}

int cmd_condsweep(const AnalyzeArgs& a, const std::vector<double>& grid) {
  const Matrix p = analysis_design(a);
  const Vector k_grid = Eigen::Map<const Vector>(grid.data(), static_cast<Index>(grid.size()));
  const std::string csv = condition_sweep_csv(condition_sweep(p, k_grid));
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(a.out, csv);
    std::cout << "wrote " << grid.size() << " sweep points to " << a.out << "\n";
  }
  return 0;
}

int cmd_variance(const AnalyzeArgs& a) {
  const Matrix p = analysis_design(a);
  Regime regime = regime_for(p);
  if (a.regime == "under") {
    regime = Regime::under;
  } else if (a.regime == "over") {
    regime = Regime::over;
  } else if (a.regime != "auto") {
    throw InvalidParameter("regime", "expected auto, under or over");
  }
  const Regularization reg = regularization_flag(a.c, a.exact);
  Rng rng(Rng::derive(a.seed.value_or(kDiagnosticSeed), 1));
  const Vector alpha_true = random_normal_vector(p.cols(), rng);
  const Vector bias = bias_report(p, alpha_true, a.k, reg, regime);
  const Matrix cov = estimator_covariance(p, a.k, reg, Isotropic{a.sigma * a.sigma}, regime);
  const std::string prefix = a.out.empty() ? "variance" : a.out;
  write_text_file(prefix + "_bias.csv", vector_csv(bias, "bias"));
  write_text_file(prefix + "_covariance.csv", matrix_csv(cov));
  write_text_file(prefix + "_alpha_true.csv", vector_csv(alpha_true, "alpha"));
  std::cout << "regime: " << to_string(regime) << "\n"
            << "c: " << c_echo(reg) << "\n"
            << "bias_norm: " << format_double(bias.norm()) << "\n"
            << "covariance_trace: " << format_double(cov.trace()) << "\n"
            << "wrote " << prefix << "_bias.csv, " << prefix << "_covariance.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stretchy regression: closed-form sparse regression and benchmarks"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* sc_synth = app.add_subcommand("synth", "Generate a synthetic dataset as CSV");
  sc_synth->add_option("kind", synth.kind, "poly1d or twoclass2d")->required()
      ->check(CLI::IsMember({"poly1d", "twoclass2d"}));
  sc_synth->add_option("--n", synth.n, "Number of samples (poly1d: 5, twoclass2d: 20)");
  sc_synth->add_option("--sigma", synth.sigma, "Gaussian noise standard deviation")
      ->check(CLI::NonNegativeNumber);
  sc_synth->add_option("--seed", synth.seed, "Random seed (default: SR_SEED or 1)");
  sc_synth->add_option("--out", synth.out, "Output CSV path")->required();

  FitArgs fa;
  auto* sc_fit = app.add_subcommand("fit", "Fit a model and write its JSON document");
  sc_fit->add_option("--train", fa.train, "Training CSV")->required();
  sc_fit->add_option("--target", fa.target, "Target column name");
  sc_fit->add_option("--task", fa.task, "regression or classification")
      ->check(CLI::IsMember({"regression", "classification"}));
  sc_fit->add_option("--k", fa.k, "Stretch exponent, 1 < k < inf")->required();
  auto* c_opt = sc_fit->add_option("--c", fa.c, "Regularization c > 0; values >= 1e50 mean exact");
  sc_fit->add_flag("--exact", fa.exact, "Unregularized solution (c -> inf)")->excludes(c_opt);
  sc_fit->add_option("--density", fa.density, "Fraction of basis columns kept by the second pass");
  sc_fit->add_option("--basis", fa.basis, "raw, poly:N or poly2:N");
  sc_fit->add_flag("--no-intercept", fa.no_intercept, "Drop the constant column");
  sc_fit->add_flag("--standardize", fa.standardize, "z-score the features with training statistics");
  sc_fit->add_flag("--quadrant-map", fa.quadrant_map, "Map features through exp(a x + b)");
  sc_fit->add_option("--a", fa.a, "Quadrant map slope");
  sc_fit->add_option("--b", fa.b, "Quadrant map offsets: one value or one per feature");
  sc_fit->add_option("--rcond", fa.rcond, "Pivot-ratio threshold for singularity");
  sc_fit->add_option("--model-out", fa.model_out, "Model document path")->required();

  PredictArgs pa;
  auto* sc_predict = app.add_subcommand("predict", "Predict with a saved model");
  sc_predict->add_option("--model", pa.model, "Model document")->required();
  sc_predict->add_option("--input", pa.input, "Input CSV")->required();
  sc_predict->add_option("--out", pa.out, "Output CSV")->required();
  sc_predict->add_option("--target", pa.target, "Column to ignore (e.g. the training target)");
  sc_predict->add_flag("--classify", pa.classify, "Emit -1/+1 labels at zero threshold");

  BenchArgs ba;
  auto* sc_bench = app.add_subcommand("bench", "Run a benchmark manifest");
  sc_bench->add_option("--manifest", ba.manifest, "Run manifest (JSON)")->required();
  sc_bench->add_option("--output-dir", ba.output_dir, "Override the manifest output_dir");
  sc_bench->add_option("--seed", ba.seed, "Override the cross-validation seed");
  sc_bench->add_option("--trials", ba.trials, "Override the number of trials");
  sc_bench->add_option("--folds", ba.folds, "Override the number of folds");

  AnalyzeArgs aa;
  auto* sc_analyze = app.add_subcommand("analyze", "Variance and conditioning diagnostics");
  sc_analyze->require_subcommand(1);
  const auto add_design_flags = [&](CLI::App* sub) {
    sub->add_option("--rows", aa.rows, "Rows of the seeded positive design");
    sub->add_option("--cols", aa.cols, "Columns of the seeded positive design");
    sub->add_option("--seed", aa.seed, "Seed of the random design");
    sub->add_option("--design", aa.design, "Use this CSV as the design instead");
    sub->add_option("--target", aa.target, "Column of --design to ignore");
  };
  auto* sc_sweep = sc_analyze->add_subcommand("condsweep", "Condition number of P (P^T)^(1/(k-1)) vs k");
  add_design_flags(sc_sweep);
  sc_sweep->add_option("--k-grid", aa.k_grid, "Comma-separated k values");
  sc_sweep->add_option("--out", aa.out, "Output CSV (default: stdout)");
  auto* sc_var = sc_analyze->add_subcommand("variance", "Bias vector and covariance matrix");
  aa.rows = 6;
  add_design_flags(sc_var);
  sc_var->add_option("--k", aa.k, "Stretch exponent");
  auto* var_c = sc_var->add_option("--c", aa.c, "Regularization c");
  sc_var->add_flag("--exact", aa.exact, "c -> inf")->excludes(var_c);
  sc_var->add_option("--sigma", aa.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  sc_var->add_option("--regime", aa.regime, "auto, under or over");
  sc_var->add_option("--out-prefix", aa.out, "Prefix of the output CSV files");

  std::vector<double> k_grid;
  try {
    app.parse(argc, argv);
    if (sc_sweep->parsed()) {
      k_grid = parse_real_list(aa.k_grid, "--k-grid");
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sc_synth->parsed()) return cmd_synth(synth);
    if (sc_fit->parsed()) return cmd_fit(fa);
    if (sc_predict->parsed()) return cmd_predict(pa);
    if (sc_bench->parsed()) return cmd_bench(ba);
    if (sc_sweep->parsed()) return cmd_condsweep(aa, k_grid);
    if (sc_var->parsed()) return cmd_variance(aa);
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return 0;
}
