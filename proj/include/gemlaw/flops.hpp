#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gemlaw/arch.hpp"
#include "gemlaw/records.hpp"

namespace gemlaw {

/// Per-token FLOP contributions for the whole model (all layers summed).
/// Components are forward-pass costs; `backward` aggregates the backward
/// pass. Totals are kept in double: budgets overflow 64-bit integers and
/// the coefficients are fractional anyway.
struct FlopBreakdown {
  double embeddings = 0.0;  // 0: sparse lookup
  double attention_projections = 0.0;
  double rope = 0.0;
  double kq_logits = 0.0;
  double softmax = 0.0;
  double softmax_value_reduction = 0.0;
  double attention_output = 0.0;
  double mlp = 0.0;
  double norms = 0.0;
  double lm_head = 0.0;
  double backward = 0.0;
  double total = 0.0;  // sum of the components above
};

struct FlopOptions {
  // Attention-score terms are halved by default: the causal mask leaves a
  // triangular score matrix. Toggle exists so tests can pin the factor.
  bool causal_mask_halving = true;
};

/// Exact FLOPs per trained token for a GQA/GEGLU transformer.
FlopBreakdown flops_per_token(ModelShape shape, const ArchConfig& arch,
                              FlopOptions options = {});

/// flops_per_token total divided by 6 * parameter count.
double six_n_ratio(ModelShape shape, const ArchConfig& arch, bool include_embeddings);

/// flops_per_token total times the token count.
double total_flops(ModelShape shape, const ArchConfig& arch, double tokens);

struct GpuHoursOptions {
  double tokens_per_step = 4194304.0;  // 2048 sequences x 2048 context
};

struct GpuHoursResult {
  /// One entry per input record; nullopt for records skipped because step
  /// time or GPU count is missing.
  std::vector<std::optional<double>> hours;
  std::vector<std::string> warnings;
};

/// GPU hours per record: (tokens / tokens_per_step) * step_time * gpu_count / 3600.
GpuHoursResult gpu_hours(std::span<const RunRecord> records, GpuHoursOptions options = {});

}  // namespace gemlaw
