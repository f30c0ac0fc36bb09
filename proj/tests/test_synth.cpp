#include <doctest.h>

#include <cmath>

#include "gemlaw/synth.hpp"

using namespace gemlaw;

namespace {

ParametricLaw gen_law() {
  ParametricLaw law;
  law.A = 482;
  law.B = 2085;
  law.alpha = 0.35;
  law.beta = 0.37;
  law.eps = 1.8;
  return law;
}

const std::vector<ModelShape> kShapes = {{512, 12}, {768, 24}, {1280, 15}, {2560, 8}};
const std::vector<std::int64_t> kTokens = {2000000000,  8000000000,  30000000000,
                                           90000000000, 200000000000, 350000000000};

}  // namespace

TEST_CASE("noiseless generation reproduces the law exactly") {
  const ArchConfig arch;
  const auto runs = generate_runs(gen_law(), kShapes, kTokens, {});
  REQUIRE(runs.size() == kShapes.size() * kTokens.size());
  for (const auto& r : runs) {
    const double p = static_cast<double>(count_params(r.shape, arch).with_embeddings);
    CHECK(r.val_loss == predicted_loss(gen_law(), p, static_cast<double>(r.tokens)));
    CHECK(r.step_time_seconds.has_value());
    CHECK(r.gpu_count.has_value());
  }
}

TEST_CASE("same seed, same output; different seed, different noise") {
  RunGenConfig cfg;
  cfg.noise_sigma = 0.01;
  cfg.seed = 42;
  const auto a = generate_runs(gen_law(), kShapes, kTokens, cfg);
  const auto b = generate_runs(gen_law(), kShapes, kTokens, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].val_loss == b[i].val_loss);

  cfg.seed = 43;
  const auto c = generate_runs(gen_law(), kShapes, kTokens, cfg);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a[i].val_loss != c[i].val_loss;
  CHECK(any_diff);
}

TEST_CASE("noise sigma controls the spread of log-loss residuals") {
  const ArchConfig arch;
  RunGenConfig cfg;
  cfg.noise_sigma = 0.05;
  cfg.seed = 7;
  const auto runs = generate_runs(gen_law(), kShapes, kTokens, cfg);
  double sq = 0.0;
  for (const auto& r : runs) {
    const double p = static_cast<double>(count_params(r.shape, arch).with_embeddings);
    const double clean = predicted_loss(gen_law(), p, static_cast<double>(r.tokens));
    const double z = std::log(r.val_loss / clean) / cfg.noise_sigma;
    sq += z * z;
  }
  const double rms = std::sqrt(sq / static_cast<double>(runs.size()));
  CHECK(rms > 0.5);
  CHECK(rms < 1.8);
}

TEST_CASE("frontier generator basics") {
  SUBCASE("two points give the exact two-point slope") {
    FrontierGenConfig cfg;
    cfg.exponent = 0.37;
    cfg.points = 2;
    const auto pts = generate_frontier(cfg);
    REQUIRE(pts.size() == 2);
    const double slope = (std::log10(pts[1].params) - std::log10(pts[0].params)) /
                         (std::log10(pts[1].x) - std::log10(pts[0].x));
    CHECK(slope == doctest::Approx(0.37).epsilon(1e-9));
  }
  SUBCASE("distractors sit strictly above the envelope") {
    FrontierGenConfig cfg;
    cfg.points = 16;
    cfg.distractors = 64;
    cfg.seed = 3;
    const auto pts = generate_frontier(cfg);
    const double lo = std::log10(cfg.x_lo), hi = std::log10(cfg.x_hi);
    const double mid = 0.5 * (lo + hi);
    const auto envelope = [&](double u) {
      const double du = u - mid;
      return std::log10(cfg.mid_loss) - cfg.loss_slope * du + cfg.curvature * du * du;
    };
    int n_distract = 0;
    for (const auto& p : pts) {
      if (p.run_id.rfind("dis_", 0) != 0) continue;
      ++n_distract;
      CHECK(std::log10(p.loss) > envelope(std::log10(p.x)) + 0.019);
    }
    CHECK(n_distract == 64);
  }
  SUBCASE("point count precondition") {
    FrontierGenConfig cfg;
    cfg.points = 1;
    CHECK_THROWS_AS(generate_frontier(cfg), PreconditionError);
  }
}
