#include "gemlaw/synth.hpp"

#include <cmath>
#include <string>

#include "gemlaw/errors.hpp"
#include "gemlaw/flops.hpp"
#include "gemlaw/rng.hpp"

namespace gemlaw {

std::vector<RunRecord> generate_runs(const ParametricLaw& law,
                                     std::span<const ModelShape> shapes,
                                     std::span<const std::int64_t> token_grid,
                                     const RunGenConfig& config, const ArchConfig& arch) {
  if (!(config.noise_sigma >= 0))
    throw PreconditionError("generate_runs: noise_sigma must be >= 0");
  std::vector<RunRecord> out;
  out.reserve(shapes.size() * token_grid.size());
  for (std::size_t si = 0; si < shapes.size(); ++si) {
    const ModelShape shape = shapes[si];
    const auto pc = count_params(shape, arch);
    const double params = static_cast<double>(pc.with_embeddings);
    const double step_time =
        config.step_time_base + config.step_time_per_flop * flops_per_token(shape, arch).total;
    for (std::size_t ti = 0; ti < token_grid.size(); ++ti) {
      const std::int64_t tokens = token_grid[ti];
      if (tokens <= 0) throw PreconditionError("generate_runs: token counts must be > 0");
      double loss = predicted_loss(law, params, static_cast<double>(tokens));
      if (config.noise_sigma > 0) {
        Rng rng(derive_seed(config.seed, si, ti));
        loss *= std::exp(config.noise_sigma * rng.normal());
      }
      RunRecord r;
      r.run_id = std::to_string(shape.width) + "x" + std::to_string(shape.depth);
      r.shape = shape;
      r.tokens = tokens;
      r.val_loss = loss;
      r.step_time_seconds = step_time;
      r.gpu_count = config.gpu_count;
      r.lr_variant = config.lr_variant;
      r.schedule = config.schedule;
      r.eval_dataset = config.eval_dataset;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<FrontierPoint> generate_frontier(const FrontierGenConfig& config) {
  if (config.points < 2) throw PreconditionError("generate_frontier: points must be >= 2");
  if (config.distractors < 0)
    throw PreconditionError("generate_frontier: distractors must be >= 0");
  if (!(config.x_lo > 0) || !(config.x_hi > config.x_lo))
    throw PreconditionError("generate_frontier: need 0 < x_lo < x_hi");
  if (!(config.curvature >= 0) || !(config.noise >= 0))
    throw PreconditionError("generate_frontier: curvature and noise must be >= 0");

  const double lo = std::log10(config.x_lo);
  const double hi = std::log10(config.x_hi);
  const double mid = 0.5 * (lo + hi);
  const auto envelope_log_loss = [&](double u) {
    const double du = u - mid;
    return std::log10(config.mid_loss) - config.loss_slope * du +
           config.curvature * du * du;
  };
  const auto make_point = [&](double u, double log_loss, const std::string& id) {
    FrontierPoint p;
    p.x = std::pow(10.0, u);
    p.loss = std::pow(10.0, log_loss);
    p.params = std::pow(10.0, std::log10(config.mid_params) + config.exponent * (u - mid));
    const double t = p.x / (6.0 * p.params);
    p.tokens = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(t)));
    p.run_id = id;
    p.shape = {0, 0};  // synthetic, no concrete architecture
    return p;
  };

  std::vector<FrontierPoint> out;
  out.reserve(static_cast<std::size_t>(config.points + config.distractors));
  for (int i = 0; i < config.points; ++i) {
    const double u =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(config.points - 1);
    out.push_back(make_point(u, envelope_log_loss(u), "env_" + std::to_string(i)));
  }

  Rng rng(derive_seed(config.seed, 0x5eed));
  for (int j = 0; j < config.distractors; ++j) {
    // Interior x so hull endpoints cannot move; strictly above the
    // envelope by at least 0.02 log10 units.
    const double u = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    const double lift = 0.02 + config.noise * rng.uniform01();
    out.push_back(make_point(u, envelope_log_loss(u) + lift, "dis_" + std::to_string(j)));
  }
  return out;
}

}  // namespace gemlaw
