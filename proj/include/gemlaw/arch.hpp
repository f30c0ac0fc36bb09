#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "gemlaw/errors.hpp"

namespace gemlaw {

/// Frozen architecture constants shared by every model in the family.
/// Defaults match the Gemma-style training setup: GQA with a 2:1
/// query-to-KV ratio, GEGLU MLP at 4x width, untied embeddings, and the
/// Pythia tokenizer vocabulary.
struct ArchConfig {
  std::int64_t vocab_size = 50304;
  std::int64_t head_size = 128;
  double expand_factor = 4.0;          // MLP intermediate size as a multiple of width
  std::int64_t queries_per_group = 2;  // query heads per KV group
  std::int64_t seq_len = 2048;
  bool tie_embeddings = false;
};

/// A transformer shape: embedding dimension (width) and block count (depth).
struct ModelShape {
  std::int64_t width = 0;
  std::int64_t depth = 0;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
  friend auto operator<=>(const ModelShape&, const ModelShape&) = default;
};

struct ParamCount {
  std::int64_t with_embeddings = 0;
  std::int64_t without_embeddings = 0;
};

/// Throws ConstraintError naming the first violated constraint:
/// width divisible by head_size, even head count, depth >= 1.
void validate_shape(ModelShape shape, const ArchConfig& arch);

/// Throws ConstraintError if the architecture constants are inconsistent.
void validate_arch(const ArchConfig& arch);

/// Exact parameter count for a shape. Linear layers carry no bias; RMSNorm
/// contributes `width` parameters per norm, two per block plus one final.
/// The untied LM head doubles the embedding table.
ParamCount count_params(ModelShape shape, const ArchConfig& arch);

struct EnumerationLimits {
  std::int64_t max_width = 8192;
  std::int64_t max_depth = 512;
};

/// All valid shapes whose with-embeddings parameter count lies within
/// [target*(1-tolerance), target*(1+tolerance)], sorted by (width, depth).
/// An empty result is a valid outcome. tolerance may be zero (point
/// interval) but must be < 1.
std::vector<ModelShape> enumerate_feasible_shapes(std::int64_t target_params,
                                                  double tolerance,
                                                  const ArchConfig& arch,
                                                  EnumerationLimits limits = {});

/// Width divided by depth.
double aspect_ratio(ModelShape shape);

}  // namespace gemlaw
