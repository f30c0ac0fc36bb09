// Independent test oracles. These deliberately do NOT share code with the
// library: the FLOP oracle is a line-by-line transcription of the reference
// counting routine, and the hull oracles use different algorithm families
// (gift wrapping, pairwise dominance) than the monotone chain under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracles {

// Literal transcription of the reference flops-per-token routine for the
// GQA/GEGLU architecture (head size 128, 4x GEGLU, halved causal scores).
inline double flops_per_token_gqa_transcription(double width, double depth,
                                                double vocab_size = 50304,
                                                double queries_per_group = 2,
                                                double seq_len = 2048) {
  const double HEAD_SIZE = 128;
  const double EXPAND_FACTOR = 4.0;
  const double num_qheads = width / HEAD_SIZE;
  const double num_kvheads = 2 * num_qheads / queries_per_group;

  const double embeddings = 0;  // sparse lookup

  double attention = 2.0 * seq_len * (num_qheads + num_kvheads) * width * HEAD_SIZE;
  attention += 3.5 * seq_len * (num_qheads + num_kvheads / 2) * HEAD_SIZE;  // RoPE
  // score FLOPs halved: causal => triangular mask
  const double kq_logits = 1.0 * seq_len * seq_len * HEAD_SIZE * num_qheads;
  const double softmax = 3.0 * seq_len * seq_len * num_qheads;
  const double softmax_q_red = 2.0 * seq_len * seq_len * HEAD_SIZE * num_qheads;
  const double final_linear = 2.0 * seq_len * width * HEAD_SIZE * num_qheads;
  const double attn_bwd =
      (2.0 * attention + 2.5 * (kq_logits + softmax + softmax_q_red) + 2.0 * final_linear) *
      depth;
  attention += kq_logits + softmax + softmax_q_red + final_linear;

  const double ffw_size = EXPAND_FACTOR * width;
  double dense_block = 6.0 * seq_len * width * ffw_size;  // three matmuls (GEGLU)
  dense_block += 10 * seq_len * ffw_size;
  dense_block += 2.0 * width * seq_len;  // both residual additions
  const double rmsnorm = 2 * 7.0 * width * seq_len;

  const double final_rms_norm = 7.0 * width * seq_len;
  const double final_logits = 2.0 * seq_len * width * vocab_size;
  const double nonattn_bwd =
      2.0 * (embeddings + depth * (dense_block + rmsnorm) + final_rms_norm + final_logits);
  const double forward_pass =
      embeddings + depth * (attention + dense_block + rmsnorm) + final_rms_norm + final_logits;
  const double backward_pass = attn_bwd + nonattn_bwd;

  return (forward_pass + backward_pass) / seq_len;
}

struct Pt {
  double x, y;
};

// Gift-wrapping lower hull: from the leftmost point, repeatedly take the
// successor with the smallest slope, preferring the farthest point on ties
// so collinear interior points are skipped. Assumes one point per x.
inline std::vector<std::size_t> lower_hull_gift_wrap(const std::vector<Pt>& pts) {
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });

  std::vector<std::size_t> hull;
  std::size_t cur = order.front();
  hull.push_back(cur);
  const std::size_t last = order.back();
  while (cur != last) {
    std::size_t best = cur;
    double best_slope = std::numeric_limits<double>::infinity();
    for (const std::size_t cand : order) {
      if (pts[cand].x <= pts[cur].x) continue;
      const double slope = (pts[cand].y - pts[cur].y) / (pts[cand].x - pts[cur].x);
      if (slope < best_slope ||
          (slope == best_slope && best != cur && pts[cand].x > pts[best].x)) {
        best = cand;
        best_slope = slope;
      }
    }
    cur = best;
    hull.push_back(cur);
  }
  return hull;
}

// Pairwise dominance: p is a lower-hull vertex iff no segment between two
// other points passes at-or-below p at p.x. O(n^3) overall.
inline bool is_lower_hull_vertex_bruteforce(const std::vector<Pt>& pts, std::size_t p) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == p) continue;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (j == p) continue;
      const Pt a = pts[i].x <= pts[j].x ? pts[i] : pts[j];
      const Pt b = pts[i].x <= pts[j].x ? pts[j] : pts[i];
      if (!(a.x <= pts[p].x && pts[p].x <= b.x) || a.x == b.x) continue;
      const double t = (pts[p].x - a.x) / (b.x - a.x);
      const double y_on_segment = a.y + t * (b.y - a.y);
      if (y_on_segment <= pts[p].y) return false;
    }
  }
  return true;
}

}  // namespace oracles
