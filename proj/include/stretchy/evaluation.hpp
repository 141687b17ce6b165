#pragma once

// Error metrics, repeated k-fold cross-validation, fit timing and the Friedman / Nemenyi
// rank statistics used to compare algorithms across datasets.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "stretchy/data_io.hpp"
#include "stretchy/errors.hpp"
#include "stretchy/estimator.hpp"
#include "stretchy/numeric.hpp"

namespace stretchy {

inline double mse(const Vector& pred, const Vector& target) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw DimensionMismatch("mse needs two non-empty vectors of equal length");
  }
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

inline double rmse(const Vector& pred, const Vector& target) { return std::sqrt(mse(pred, target)); }

/// Balanced error rate: mean of the error rates on the +1 and the -1 targets.
inline double ber(const Vector& pred_labels, const Vector& target_labels) {
  if (pred_labels.size() != target_labels.size()) {
    throw DimensionMismatch("ber needs label vectors of equal length");
  }
  double pos = 0.0, neg = 0.0, pos_err = 0.0, neg_err = 0.0;
  for (Index i = 0; i < target_labels.size(); ++i) {
    const bool wrong = pred_labels(i) != target_labels(i);
    if (target_labels(i) > 0.0) {
      pos += 1.0;
      pos_err += wrong ? 1.0 : 0.0;
    } else {
      neg += 1.0;
      neg_err += wrong ? 1.0 : 0.0;
    }
  }
  if (pos == 0.0 || neg == 0.0) {
    throw SingleClassTarget();
  }
  return 0.5 * (pos_err / pos + neg_err / neg);
}

struct Metrics {
  double mse = 0.0;
  double rmse = 0.0;
  std::optional<double> ber;
  double train_seconds = 0.0;
};

struct CvPlan {
  std::size_t trials = 10;
  std::size_t folds = 2;
  std::uint64_t seed = 1;

  void validate() const {
    if (folds < 2) throw InvalidParameter("folds", "need at least 2 folds");
    if (trials < 1) throw InvalidParameter("trials", "need at least 1 trial");
  }
};

/// Wall-clock seconds spent in `fn`, monotonic clock, rounded to milliseconds.
template <typename Fn>
double time_fit(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  std::forward<Fn>(fn)();
  const auto stop = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(stop - start).count();
  return std::round(seconds * 1000.0) / 1000.0;
}

/// Fold id in [0, folds) for every sample. Classification is stratified: each class is
/// shuffled separately and dealt round-robin, continuing across classes.
inline std::vector<std::size_t> fold_assignments(const Vector& targets, Task task,
                                                 std::size_t folds, Rng& rng) {
  const auto n = static_cast<std::size_t>(targets.size());
  std::vector<std::size_t> fold(n, 0);
  std::vector<std::vector<std::size_t>> groups;
  if (task == Task::classification) {
    groups.resize(2);
    for (std::size_t i = 0; i < n; ++i) {
      groups[targets(static_cast<Index>(i)) > 0.0 ? 1 : 0].push_back(i);
    }
    for (const auto& g : groups) {
      if (g.size() < folds) {
        throw InsufficientSamples("every class needs at least " + std::to_string(folds) +
                                  " samples for " + std::to_string(folds) + "-fold splits");
      }
    }
  } else {
    if (n < folds) {
      throw InsufficientSamples("need at least " + std::to_string(folds) + " samples");
    }
    groups.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) groups[0][i] = i;
  }
  std::size_t slot = 0;
  for (auto& g : groups) {
    rng.shuffle(g);
    for (std::size_t idx : g) {
      fold[idx] = slot++ % folds;
    }
  }
  return fold;
}

inline Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.name = ds.name;
  out.task = ds.task;
  out.feature_names = ds.feature_names;
  out.target_name = ds.target_name;
  out.features.resize(static_cast<Index>(rows.size()), ds.features.cols());
  out.targets.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = ds.features.row(static_cast<Index>(rows[i]));
    out.targets(static_cast<Index>(i)) = ds.targets(static_cast<Index>(rows[i]));
  }
  return out;
}

/// Fits on the training folds and scores the held-out fold.
inline Metrics evaluate_split(const Dataset& train, const Dataset& test, const ModelSpec& spec) {
  Metrics m;
  FittedModel model;
  m.train_seconds = time_fit([&] { model = fit(train.features, train.targets, spec); });
  const Vector pred = predict(model, test.features);
  m.mse = mse(pred, test.targets);
  m.rmse = std::sqrt(m.mse);
  if (test.task == Task::classification) {
    m.ber = ber(sign_labels(pred), test.targets);
  }
  return m;
}

/// Train/test row lists for (trial, fold), reproducible from the plan seed.
struct Split {
  std::size_t trial = 0;
  std::size_t fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline std::vector<Split> cv_splits(const Dataset& ds, const CvPlan& plan) {
  plan.validate();
  std::vector<Split> splits;
  for (std::size_t t = 0; t < plan.trials; ++t) {
    Rng rng(Rng::derive(plan.seed, t));
    const std::vector<std::size_t> fold = fold_assignments(ds.targets, ds.task, plan.folds, rng);
    for (std::size_t f = 0; f < plan.folds; ++f) {
      Split s;
      s.trial = t;
      s.fold = f;
      for (std::size_t i = 0; i < fold.size(); ++i) {
        (fold[i] == f ? s.test : s.train).push_back(i);
      }
      splits.push_back(std::move(s));
    }
  }
  return splits;
}

/// One Metrics entry per (trial, fold), trial-major.
inline std::vector<Metrics> cross_validate(const Dataset& ds, const ModelSpec& spec,
                                           const CvPlan& plan) {
  ds.validate();
  std::vector<Metrics> out;
  for (const Split& s : cv_splits(ds, plan)) {
    out.push_back(evaluate_split(subset(ds, s.train), subset(ds, s.test), spec));
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Rank statistics

/// scores(i, j): score of algorithm j on dataset i, lower is better.
struct RankTable {
  Matrix scores;

  Index datasets() const { return scores.rows(); }
  Index algorithms() const { return scores.cols(); }
};

/// Ranks within each row (1 = lowest score), ties share their average rank.
inline Matrix rank_rows(const Matrix& scores) {
  Matrix ranks(scores.rows(), scores.cols());
  std::vector<Index> order(static_cast<std::size_t>(scores.cols()));
  for (Index i = 0; i < scores.rows(); ++i) {
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<Index>(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return scores(i, a) < scores(i, b); });
    std::size_t pos = 0;
    while (pos < order.size()) {
      std::size_t end = pos + 1;
      while (end < order.size() && scores(i, order[end]) == scores(i, order[pos])) ++end;
      const double avg = 0.5 * static_cast<double>(pos + 1 + end);
      for (std::size_t q = pos; q < end; ++q) ranks(i, order[q]) = avg;
      pos = end;
    }
  }
  return ranks;
}

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Vector average_ranks;
};

/// chi2_F = 12N / (k(k+1)) [sum_j R_j^2 - k(k+1)^2 / 4], p from chi-square with k-1 dof.
inline FriedmanResult friedman_test(const RankTable& table) {
  const Index n = table.datasets();
  const Index k = table.algorithms();
  if (n < 2 || k < 2) {
    throw DegenerateTable("Friedman test needs at least 2 datasets and 2 algorithms");
  }
  if (table.scores.array().isNaN().any()) {
    throw DegenerateTable("rank table has missing (NaN) entries");
  }
  FriedmanResult r;
  r.average_ranks = rank_rows(table.scores).colwise().mean().transpose();
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double stat = 12.0 * nd / (kd * (kd + 1.0)) *
                      (r.average_ranks.squaredNorm() - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  r.statistic = std::max(0.0, stat);
  if (r.statistic <= 1e-12) {
    r.statistic = 0.0;
    r.p_value = 1.0;
  } else {
    const boost::math::chi_squared dist(kd - 1.0);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

/// Two-tailed Nemenyi critical values q_alpha for k = 2..10 (studentized range / sqrt 2).
inline constexpr std::array<double, 9> kNemenyiQ05 = {1.960, 2.343, 2.569, 2.728, 2.850,
                                                      2.949, 3.031, 3.102, 3.164};
inline constexpr std::array<double, 9> kNemenyiQ10 = {1.645, 2.052, 2.291, 2.459, 2.589,
                                                      2.693, 2.780, 2.855, 2.920};

/// Critical difference q_alpha sqrt(k(k+1) / (6N)) for alpha in {0.05, 0.10}.
inline double nemenyi_cd(std::size_t k_alg, std::size_t n_datasets, double alpha_level) {
  if (k_alg < 2 || k_alg > 10) {
    throw UnsupportedK(k_alg);
  }
  if (n_datasets < 1) {
    throw InvalidParameter("n_datasets", "must be at least 1");
  }
  const std::array<double, 9>* table = nullptr;
  if (std::abs(alpha_level - 0.05) < 1e-12) {
    table = &kNemenyiQ05;
  } else if (std::abs(alpha_level - 0.10) < 1e-12) {
    table = &kNemenyiQ10;
  } else {
    throw InvalidParameter("alpha", "Nemenyi critical values exist for 0.05 and 0.10 only");
  }
  const double q = (*table)[k_alg - 2];
  const double kd = static_cast<double>(k_alg);
  return q * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n_datasets)));
}

}  // namespace stretchy
