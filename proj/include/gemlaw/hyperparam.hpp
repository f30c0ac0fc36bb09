#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gemlaw/arch.hpp"

namespace gemlaw {

struct LrRule {
  double lr_base = 5.0;
};

enum class ParamKind { general, attention_projection, mlp_projection };

/// Effective depth after the extreme-aspect-ratio patch: shapes with
/// width/depth strictly greater than 256 behave as if depth were
/// ceil(width/100); everything else is unchanged.
std::int64_t patched_depth(ModelShape shape);

/// lr_base / (width * sqrt(depth)), using the patched depth when requested.
double effective_lr(ModelShape shape, LrRule rule = {}, bool apply_patch = false);

/// Truncated-normal std-dev by parameter kind. layer_index is 0-based; the
/// projection rules divide by (layer_index + 1).
double init_sigma(ParamKind kind, std::int64_t width, std::int64_t layer_index,
                  const ArchConfig& arch = {});

/// One row of the per-tensor initialization/LR table emitted by the CLI.
/// Truncation is symmetric at +-3 sigma.
struct InitTableRow {
  std::string tensor;
  ParamKind kind = ParamKind::general;
  std::int64_t layer_index = -1;  // -1 for non-block tensors
  double sigma = 0.0;
  double trunc_lo = 0.0;
  double trunc_hi = 0.0;
  double lr = 0.0;
};

std::vector<InitTableRow> init_table(ModelShape shape, const ArchConfig& arch = {},
                                     LrRule rule = {}, bool apply_patch = false);

}  // namespace gemlaw
