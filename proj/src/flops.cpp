#include "gemlaw/flops.hpp"

#include <cmath>

namespace gemlaw {

FlopBreakdown flops_per_token(ModelShape shape, const ArchConfig& arch, FlopOptions options) {
  validate_shape(shape, arch);

  const double seq = static_cast<double>(arch.seq_len);
  const double width = static_cast<double>(shape.width);
  const double depth = static_cast<double>(shape.depth);
  const double head = static_cast<double>(arch.head_size);
  const double vocab = static_cast<double>(arch.vocab_size);
  const double num_qheads = width / head;
  const double num_kvheads = 2.0 * num_qheads / static_cast<double>(arch.queries_per_group);
  // Score terms (everything quadratic in seq) are halved under the causal
  // mask; the unhalved variants double them.
  const double score = options.causal_mask_halving ? 1.0 : 2.0;

  // Per-layer, per-sequence costs.
  const double projections = 2.0 * seq * (num_qheads + num_kvheads) * width * head;
  const double rope = 3.5 * seq * (num_qheads + num_kvheads / 2.0) * head;  // GPT-NeoX style
  const double kq_logits = score * 1.0 * seq * seq * head * num_qheads;
  const double softmax = score * 3.0 * seq * seq * num_qheads;
  const double softmax_v = score * 2.0 * seq * seq * head * num_qheads;
  const double attn_out = 2.0 * seq * width * head * num_qheads;

  const double ffw = arch.expand_factor * width;
  double dense_block = 6.0 * seq * width * ffw;  // three matmuls: GEGLU
  dense_block += 10.0 * seq * ffw;               // gate nonlinearity and elementwise ops
  dense_block += 2.0 * width * seq;              // both residual additions
  const double rmsnorm = 2.0 * 7.0 * width * seq;
  const double final_rms_norm = 7.0 * width * seq;
  const double final_logits = 2.0 * seq * width * vocab;

  // Backward: flash attention recomputes scores, so score terms cost 2.5x;
  // plain matmuls cost 2x.
  const double attn_bwd = (2.0 * (projections + rope) +
                           2.5 * (kq_logits + softmax + softmax_v) + 2.0 * attn_out) *
                          depth;
  const double nonattn_bwd =
      2.0 * (depth * (dense_block + rmsnorm) + final_rms_norm + final_logits);

  FlopBreakdown out;
  out.embeddings = 0.0;
  out.attention_projections = depth * projections / seq;
  out.rope = depth * rope / seq;
  out.kq_logits = depth * kq_logits / seq;
  out.softmax = depth * softmax / seq;
  out.softmax_value_reduction = depth * softmax_v / seq;
  out.attention_output = depth * attn_out / seq;
  out.mlp = depth * dense_block / seq;
  out.norms = (depth * rmsnorm + final_rms_norm) / seq;
  out.lm_head = final_logits / seq;
  out.backward = (attn_bwd + nonattn_bwd) / seq;
  out.total = out.embeddings + out.attention_projections + out.rope + out.kq_logits +
              out.softmax + out.softmax_value_reduction + out.attention_output + out.mlp +
              out.norms + out.lm_head + out.backward;
  return out;
}

double six_n_ratio(ModelShape shape, const ArchConfig& arch, bool include_embeddings) {
  const ParamCount pc = count_params(shape, arch);
  const std::int64_t n = include_embeddings ? pc.with_embeddings : pc.without_embeddings;
  return flops_per_token(shape, arch).total / (6.0 * static_cast<double>(n));
}

double total_flops(ModelShape shape, const ArchConfig& arch, double tokens) {
  if (tokens < 0) throw PreconditionError("total_flops: tokens must be >= 0");
  return flops_per_token(shape, arch).total * tokens;
}

GpuHoursResult gpu_hours(std::span<const RunRecord> records, GpuHoursOptions options) {
  if (!(options.tokens_per_step > 0))
    throw PreconditionError("gpu_hours: tokens_per_step must be > 0");
  GpuHoursResult out;
  out.hours.reserve(records.size());
  for (const RunRecord& r : records) {
    if (!r.step_time_seconds.has_value()) {
      out.hours.push_back(std::nullopt);
      out.warnings.push_back("run " + r.run_id + ": missing step_time_seconds, skipped");
      continue;
    }
    if (!r.gpu_count.has_value()) {
      out.hours.push_back(std::nullopt);
      out.warnings.push_back("run " + r.run_id + ": missing gpu_count, skipped");
      continue;
    }
    const double steps = static_cast<double>(r.tokens) / options.tokens_per_step;
    out.hours.push_back(steps * (*r.step_time_seconds) *
                        static_cast<double>(*r.gpu_count) / 3600.0);
  }
  return out;
}

}  // namespace gemlaw
