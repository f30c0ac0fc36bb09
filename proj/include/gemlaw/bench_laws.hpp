#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gemlaw/records.hpp"

namespace gemlaw {

/// Benchmark error as a function of validation loss:
/// Err(L) = eps_b - k * exp(-gamma * L).
struct ErrLaw {
  double eps_b = 0.0;  // asymptotic error
  double k = 0.0;
  double gamma = 0.0;
  double objective = 0.0;  // final sum of squared residuals
};

/// Benchmark accuracy as a sigmoid of task loss:
/// Acc(L) = a_amp / (1 + exp(-k_rate * (L - l0))) + b_floor.
/// k_rate is fitted positive; a decreasing accuracy-vs-loss relation shows
/// up as a negative amplitude.
struct AccLaw {
  double a_amp = 0.0;
  double b_floor = 0.0;
  double k_rate = 0.0;
  double l0 = 0.0;
  double objective = 0.0;
};

struct LossSample {
  double loss = 0.0;
  double value = 0.0;  // error or accuracy
};

/// Least-squares multi-start fit of the error law. Needs >= 4 samples with
/// distinct losses.
ErrLaw fit_err_law(std::span<const LossSample> samples);
double predict_err(const ErrLaw& law, double loss);

/// Least-squares multi-start fit of the accuracy sigmoid. Needs >= 5
/// samples with distinct losses.
AccLaw fit_acc_law(std::span<const LossSample> samples);
double predict_acc(const AccLaw& law, double loss);

/// Joins run validation losses to benchmark scores on (run_id, tokens).
/// When multiple matching score rows exist (e.g. one per benchmark set)
/// their values are averaged. `benchmark_sets` restricts which sets join;
/// empty means all.
std::vector<LossSample> join_runs_to_scores(std::span<const RunRecord> runs,
                                            std::span<const BenchRecord> scores,
                                            BenchMetric metric,
                                            const std::set<std::string>& benchmark_sets = {});

/// Joins two benchmark metrics (e.g. task_loss to avg_accuracy) on
/// (run_id, tokens); values averaged per key within each metric first.
std::vector<LossSample> join_scores_to_scores(std::span<const BenchRecord> scores,
                                              BenchMetric x_metric, BenchMetric y_metric,
                                              const std::set<std::string>& benchmark_sets = {});

}  // namespace gemlaw
