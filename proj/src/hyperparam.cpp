#include "gemlaw/hyperparam.hpp"

#include <cmath>

namespace gemlaw {

std::int64_t patched_depth(ModelShape shape) {
  if (shape.depth < 1) throw PreconditionError("patched_depth: depth must be >= 1");
  // Strict inequality: a 256 aspect ratio is left alone.
  if (static_cast<double>(shape.width) / static_cast<double>(shape.depth) > 256.0)
    return static_cast<std::int64_t>(
        std::ceil(static_cast<double>(shape.width) / 100.0));
  return shape.depth;
}

double effective_lr(ModelShape shape, LrRule rule, bool apply_patch) {
  if (shape.width < 1 || shape.depth < 1)
    throw PreconditionError("effective_lr: width and depth must be >= 1");
  if (!(rule.lr_base > 0)) throw PreconditionError("effective_lr: lr_base must be > 0");
  const std::int64_t depth = apply_patch ? patched_depth(shape) : shape.depth;
  return rule.lr_base /
         (static_cast<double>(shape.width) * std::sqrt(static_cast<double>(depth)));
}

double init_sigma(ParamKind kind, std::int64_t width, std::int64_t layer_index,
                  const ArchConfig& arch) {
  if (width < 1) throw PreconditionError("init_sigma: width must be >= 1");
  if (layer_index < 0) throw PreconditionError("init_sigma: layer_index must be >= 0");
  const double w = static_cast<double>(width);
  const double l1 = static_cast<double>(layer_index + 1);
  switch (kind) {
    case ParamKind::general: return 1.0 / std::sqrt(w);
    case ParamKind::attention_projection: return 1.0 / std::sqrt(2.0 * w * l1);
    case ParamKind::mlp_projection:
      return 1.0 / std::sqrt(2.0 * (arch.expand_factor * w) * l1);
  }
  return 1.0 / std::sqrt(w);
}

namespace {

InitTableRow make_row(std::string tensor, ParamKind kind, std::int64_t layer,
                      std::int64_t width, const ArchConfig& arch, double lr) {
  InitTableRow row;
  row.tensor = std::move(tensor);
  row.kind = kind;
  row.layer_index = layer;
  row.sigma = init_sigma(kind, width, layer < 0 ? 0 : layer, arch);
  row.trunc_lo = -3.0 * row.sigma;
  row.trunc_hi = 3.0 * row.sigma;
  row.lr = lr;
  return row;
}

}  // namespace

std::vector<InitTableRow> init_table(ModelShape shape, const ArchConfig& arch, LrRule rule,
                                     bool apply_patch) {
  validate_shape(shape, arch);
  const double lr = effective_lr(shape, rule, apply_patch);
  std::vector<InitTableRow> rows;
  rows.push_back(make_row("embedding", ParamKind::general, -1, shape.width, arch, lr));
  for (std::int64_t l = 0; l < shape.depth; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    rows.push_back(make_row(p + "attn_qkv", ParamKind::general, l, shape.width, arch, lr));
    rows.push_back(
        make_row(p + "attn_out", ParamKind::attention_projection, l, shape.width, arch, lr));
    rows.push_back(make_row(p + "mlp_gate_up", ParamKind::general, l, shape.width, arch, lr));
    rows.push_back(
        make_row(p + "mlp_down", ParamKind::mlp_projection, l, shape.width, arch, lr));
  }
  rows.push_back(make_row("lm_head", ParamKind::general, -1, shape.width, arch, lr));
  return rows;
}

}  // namespace gemlaw
