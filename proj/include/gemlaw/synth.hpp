#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gemlaw/hull.hpp"
#include "gemlaw/parametric.hpp"
#include "gemlaw/records.hpp"

namespace gemlaw {

/// Generator settings for synthetic run logs. Noise is multiplicative
/// lognormal on the loss: val_loss = L(p, T) * exp(noise_sigma * z), which
/// matches the log-loss residuals the fit minimizes. Step times follow a
/// linear model in FLOPs per token so GPU-hour paths are exercisable.
struct RunGenConfig {
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double step_time_base = 0.5;       // seconds per optimizer step
  double step_time_per_flop = 1e-10;  // seconds per (FLOP/token)
  std::int64_t gpu_count = 8;
  std::string eval_dataset = "synthetic";
  LrVariant lr_variant = LrVariant::main;
  Schedule schedule = Schedule::hot;
};

/// One record per (shape, token count), losses drawn from the given law.
/// Deterministic per seed; each grid cell uses an independent derived
/// stream, so output does not depend on generation order.
std::vector<RunRecord> generate_runs(const ParametricLaw& law,
                                     std::span<const ModelShape> shapes,
                                     std::span<const std::int64_t> token_grid,
                                     const RunGenConfig& config, const ArchConfig& arch = {});

/// Synthetic frontier: `points` samples on a strictly convex (in log-log)
/// loss envelope with params proportional to x^exponent, plus `distractors`
/// points strictly above the envelope. `noise` scales how far above the
/// envelope distractors sit (log10 units); the envelope itself is exact.
struct FrontierGenConfig {
  double exponent = 0.5;
  int points = 32;
  int distractors = 0;
  double noise = 0.25;
  std::uint64_t seed = 0;
  double x_lo = 1e17;
  double x_hi = 1e22;
  double curvature = 0.01;   // log-log second derivative of the envelope
  double loss_slope = 0.1;   // negative log-log slope at the midpoint
  double mid_loss = 3.0;
  double mid_params = 1e8;
};

std::vector<FrontierPoint> generate_frontier(const FrontierGenConfig& config);

}  // namespace gemlaw
