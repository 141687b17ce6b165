#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "stretchy/data_io.hpp"
#include "temp_dir.hpp"

using namespace stretchy;
using testing_support::TempDir;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult sr(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" SR_BINARY "\" " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

double field(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + ": ");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(out.substr(pos + key.size() + 2));
}

std::string q(const std::string& path) { return "\"" + path + "\""; }

}  // namespace

TEST(Cli, SynthIsByteIdentical) {
  TempDir dir;
  ASSERT_EQ(sr("synth twoclass2d --out " + q(dir.file("a.csv"))).status, 0);
  ASSERT_EQ(sr("synth twoclass2d --out " + q(dir.file("b.csv"))).status, 0);
  EXPECT_EQ(read_text_file(dir.file("a.csv")), read_text_file(dir.file("b.csv")));
  ASSERT_EQ(sr("synth poly1d --n 40 --sigma 0.1 --seed 9 --out " + q(dir.file("c.csv"))).status, 0);
  ASSERT_EQ(sr("synth poly1d --n 40 --sigma 0.1 --seed 9 --out " + q(dir.file("d.csv"))).status, 0);
  EXPECT_EQ(read_text_file(dir.file("c.csv")), read_text_file(dir.file("d.csv")));
  EXPECT_EQ(read_csv_table(dir.file("c.csv")).values.rows(), 40);
}

TEST(Cli, SeedFromEnvironment) {
  TempDir dir;
  ASSERT_EQ(sr("synth poly1d --n 10 --sigma 0.1 --out " + q(dir.file("env.csv")), "SR_SEED=33").status, 0);
  ASSERT_EQ(sr("synth poly1d --n 10 --sigma 0.1 --seed 33 --out " + q(dir.file("flag.csv"))).status, 0);
  ASSERT_EQ(sr("synth poly1d --n 10 --sigma 0.1 --seed 34 --out " + q(dir.file("other.csv"))).status, 0);
  EXPECT_EQ(read_text_file(dir.file("env.csv")), read_text_file(dir.file("flag.csv")));
  EXPECT_NE(read_text_file(dir.file("env.csv")), read_text_file(dir.file("other.csv")));
}

TEST(Cli, FitAndPredictRoundTrip) {
  TempDir dir;
  ASSERT_EQ(sr("synth poly1d --out " + q(dir.file("p.csv"))).status, 0);
  const auto fit = sr("fit --train " + q(dir.file("p.csv")) +
                      " --k 1.2 --exact --basis poly:10 --model-out " + q(dir.file("m.json")));
  ASSERT_EQ(fit.status, 0) << fit.out;
  EXPECT_NE(fit.out.find("solver_form: dual_exact"), std::string::npos);
  EXPECT_NE(fit.out.find("c: exact"), std::string::npos);
  EXPECT_EQ(field(fit.out, "basis_columns"), 11.0);
  EXPECT_LE(field(fit.out, "residual"), 1e-6);
  const auto pred = sr("predict --model " + q(dir.file("m.json")) + " --input " + q(dir.file("p.csv")) +
                       " --target y --out " + q(dir.file("o.csv")));
  ASSERT_EQ(pred.status, 0) << pred.out;
  const CsvTable truth = read_csv_table(dir.file("p.csv"));
  const CsvTable out = read_csv_table(dir.file("o.csv"));
  ASSERT_EQ(out.header, std::vector<std::string>{"prediction"});
  ASSERT_EQ(out.values.rows(), 5);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(out.values(i, 0), truth.values(i, 1), 1e-6);
}

TEST(Cli, NegativeFeaturesNeedQuadrantMap) {
  TempDir dir;
  ASSERT_EQ(sr("synth twoclass2d --out " + q(dir.file("t.csv"))).status, 0);
  const std::string base = "fit --train " + q(dir.file("t.csv")) +
                           " --task classification --k 1.5 --c 100 --basis poly2:28 --model-out " +
                           q(dir.file("m.json"));
  const auto bad = sr(base);
  EXPECT_NE(bad.status, 0);
  EXPECT_NE(bad.out.find("quadrant-map"), std::string::npos) << bad.out;
  const auto good = sr(base + " --standardize --quadrant-map --density 0.1");
  ASSERT_EQ(good.status, 0) << good.out;
  EXPECT_EQ(field(good.out, "basis_columns"), 435.0);
  EXPECT_EQ(field(good.out, "retained_columns"), 44.0);
  const auto labels = sr("predict --classify --model " + q(dir.file("m.json")) + " --input " +
                         q(dir.file("t.csv")) + " --target y --out " + q(dir.file("l.csv")));
  ASSERT_EQ(labels.status, 0) << labels.out;
  const CsvTable l = read_csv_table(dir.file("l.csv"));
  EXPECT_EQ(l.header, std::vector<std::string>{"label"});
  EXPECT_TRUE((l.values.array().abs() == 1.0).all());
}

TEST(Cli, MissingModelIsAnIoError) {
  TempDir dir;
  ASSERT_EQ(sr("synth poly1d --out " + q(dir.file("p.csv"))).status, 0);
  const auto r = sr("predict --model " + q(dir.file("absent.json")) + " --input " + q(dir.file("p.csv")) +
                    " --out " + q(dir.file("o.csv")));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("error:"), std::string::npos);
  EXPECT_NE(r.out.find("hint:"), std::string::npos);
}

TEST(Cli, ConditionSweep) {
  const auto r = sr("analyze condsweep --k-grid 1.05,2,10");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("k,cond\n1.05,", 0), 0u) << r.out;
  EXPECT_NE(sr("analyze condsweep --k-grid 1.5,abc").status, 0);
  EXPECT_NE(sr("analyze condsweep --k-grid 1.5,0.5").status, 0);
}

TEST(Cli, VarianceClassicalLimit) {
  TempDir dir;
  const auto r = sr("analyze variance --rows 30 --cols 4 --k 2 --c 1e15 --regime over --out-prefix " +
                    q(dir.file("v")));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("regime: over"), std::string::npos);
  EXPECT_LT(field(r.out, "bias_norm"), 1e-8);
  EXPECT_EQ(read_csv_table(dir.file("v_covariance.csv")).values.rows(), 16);
  EXPECT_EQ(read_csv_table(dir.file("v_bias.csv")).values.rows(), 4);
}

TEST(Cli, BenchWritesReports) {
  TempDir dir;
  write_text_file(dir.file("m.json"), R"({
  "datasets": [{"name": "poly", "synth": {"kind": "poly1d", "n": 12, "sigma": 0.05, "seed": 2}}],
  "algorithms": [{"name": "SR", "basis": "poly:3", "k": 1.5, "c": [10, "exact"]}],
  "plan": {"trials": 2, "folds": 2}
})");
  const auto r = sr("bench --manifest " + q(dir.file("m.json")) + " --output-dir " + q(dir.file("out")));
  ASSERT_EQ(r.status, 0) << r.out;
  const std::string summary = read_text_file(dir.file("out/summary.csv"));
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 3);
  EXPECT_NE(summary.find("SR1_k1.5_cexact"), std::string::npos) << summary;
  EXPECT_NE(sr("bench --manifest " + q(dir.file("nothing.json"))).status, 0);
}
