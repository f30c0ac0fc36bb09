#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "gemlaw/arch.hpp"

namespace gemlaw {

enum class LrVariant { main, half_lr };
enum class Schedule { hot, cooldown };

/// One logged observation from a training run.
struct RunRecord {
  std::string run_id;
  ModelShape shape;
  std::int64_t tokens = 0;  // tokens seen at this checkpoint
  double val_loss = 0.0;    // log perplexity on the held-out sample
  std::optional<double> step_time_seconds;  // mean optimizer step time
  std::optional<std::int64_t> gpu_count;
  LrVariant lr_variant = LrVariant::main;
  Schedule schedule = Schedule::hot;
  std::string eval_dataset = "dolma";
};

enum class BenchMetric { avg_top1_error, avg_accuracy, task_loss };

/// One aggregated benchmark measurement for a checkpoint.
struct BenchRecord {
  std::string run_id;
  std::int64_t tokens = 0;
  BenchMetric metric = BenchMetric::avg_top1_error;
  double value = 0.0;  // in [0,1] for error/accuracy, > 0 for task loss
  std::string benchmark_set;
};

std::string_view to_string(LrVariant v);
std::string_view to_string(Schedule s);
std::string_view to_string(BenchMetric m);
std::optional<LrVariant> parse_lr_variant(std::string_view s);
std::optional<Schedule> parse_schedule(std::string_view s);
std::optional<BenchMetric> parse_bench_metric(std::string_view s);

}  // namespace gemlaw
