#include "gemlaw/arch.hpp"

#include <cmath>
#include <string>

namespace gemlaw {

void validate_arch(const ArchConfig& arch) {
  if (arch.vocab_size <= 0) throw ConstraintError("arch: vocab_size must be > 0");
  if (arch.head_size <= 0) throw ConstraintError("arch: head_size must be > 0");
  if (arch.seq_len <= 0) throw ConstraintError("arch: seq_len must be > 0");
  if (!(arch.expand_factor >= 1.0)) throw ConstraintError("arch: expand_factor must be >= 1");
  if (arch.queries_per_group < 1)
    throw ConstraintError("arch: queries_per_group must be >= 1");
}

void validate_shape(ModelShape shape, const ArchConfig& arch) {
  validate_arch(arch);
  if (shape.depth < 1)
    throw ConstraintError("shape " + std::to_string(shape.width) + "x" +
                          std::to_string(shape.depth) + ": depth must be >= 1");
  if (shape.width <= 0 || shape.width % arch.head_size != 0)
    throw ConstraintError("shape " + std::to_string(shape.width) + "x" +
                          std::to_string(shape.depth) + ": width must be divisible by " +
                          std::to_string(arch.head_size));
  const std::int64_t heads = shape.width / arch.head_size;
  if (heads % 2 != 0)
    throw ConstraintError("shape " + std::to_string(shape.width) + "x" +
                          std::to_string(shape.depth) + ": head count must be even, got " +
                          std::to_string(heads));
  if ((2 * heads) % arch.queries_per_group != 0)
    throw ConstraintError("shape " + std::to_string(shape.width) + "x" +
                          std::to_string(shape.depth) +
                          ": head count incompatible with queries_per_group");
}

ParamCount count_params(ModelShape shape, const ArchConfig& arch) {
  validate_shape(shape, arch);
  const std::int64_t w = shape.width;
  const std::int64_t heads = w / arch.head_size;
  const std::int64_t kv_heads = 2 * heads / arch.queries_per_group;  // K and V combined
  const std::int64_t ffw = static_cast<std::int64_t>(std::llround(arch.expand_factor * w));

  const std::int64_t attention = w * w               // Q projection
                                 + kv_heads * arch.head_size * w  // K and V projections
                                 + w * w;            // output projection
  const std::int64_t mlp = 3 * ffw * w;              // GEGLU: gate, up, down
  const std::int64_t norms_per_block = 2 * w;        // pre-attention and pre-MLP RMSNorm
  const std::int64_t block = attention + mlp + norms_per_block;

  ParamCount out;
  out.without_embeddings = shape.depth * block + w;  // final RMSNorm
  const std::int64_t table = arch.vocab_size * w;
  out.with_embeddings = out.without_embeddings + (arch.tie_embeddings ? table : 2 * table);
  return out;
}

std::vector<ModelShape> enumerate_feasible_shapes(std::int64_t target_params,
                                                  double tolerance,
                                                  const ArchConfig& arch,
                                                  EnumerationLimits limits) {
  validate_arch(arch);
  if (target_params <= 0) throw PreconditionError("target_params must be > 0");
  if (!(tolerance >= 0.0) || tolerance >= 1.0)
    throw PreconditionError("tolerance must be in [0, 1)");

  const double lo = static_cast<double>(target_params) * (1.0 - tolerance);
  const double hi = static_cast<double>(target_params) * (1.0 + tolerance);

  std::vector<ModelShape> out;
  // Valid widths are even multiples of head_size; params grow monotonically
  // with depth, so each width's depth scan can stop early.
  for (std::int64_t width = 2 * arch.head_size; width <= limits.max_width;
       width += 2 * arch.head_size) {
    for (std::int64_t depth = 1; depth <= limits.max_depth; ++depth) {
      const ParamCount pc = count_params({width, depth}, arch);
      const double n = static_cast<double>(pc.with_embeddings);
      if (n > hi) break;
      if (n >= lo) out.push_back({width, depth});
    }
  }
  return out;  // scan order is already (width, depth)-sorted
}

double aspect_ratio(ModelShape shape) {
  if (shape.depth <= 0) throw PreconditionError("aspect_ratio: depth must be > 0");
  return static_cast<double>(shape.width) / static_cast<double>(shape.depth);
}

}  // namespace gemlaw
