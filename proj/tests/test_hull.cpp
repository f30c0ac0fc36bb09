#include <doctest.h>

#include <cmath>

#include "gemlaw/hull.hpp"
#include "gemlaw/rng.hpp"
#include "gemlaw/synth.hpp"
#include "oracles.hpp"

using namespace gemlaw;

namespace {

FrontierPoint fp(double x, double loss, std::string id = "p", std::int64_t tokens = 1000,
                 double params = 1e8) {
  FrontierPoint p;
  p.x = x;
  p.loss = loss;
  p.run_id = std::move(id);
  p.tokens = tokens;
  p.params = params;
  return p;
}

// Piecewise-linear interpolation of hull vertices in (x, y) pairs.
double interp(const std::vector<Eigen::Vector2d>& hull, double x) {
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    if (x >= hull[i].x() && x <= hull[i + 1].x()) {
      const double t = (x - hull[i].x()) / (hull[i + 1].x() - hull[i].x());
      return hull[i].y() + t * (hull[i + 1].y() - hull[i].y());
    }
  }
  return hull.back().y();
}

}  // namespace

TEST_CASE("hand-checked hull in fit space") {
  const std::vector<Eigen::Vector2d> pts = {{1, 3}, {2, 1}, {3, 2}, {4, 0.5}};
  const auto hull = lower_hull_2d(pts);
  REQUIRE(hull.size() == 3);
  CHECK(hull[0].x() == 1.0);
  CHECK(hull[0].y() == 3.0);
  CHECK(hull[1].x() == 2.0);
  CHECK(hull[1].y() == 1.0);
  CHECK(hull[2].x() == 4.0);
  CHECK(hull[2].y() == 0.5);
}

TEST_CASE("collinear points keep endpoints only") {
  // Exact integer coordinates in fit space: interior points on a hull edge
  // are not vertices.
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 6; ++i) pts.push_back({double(i), double(10 - i)});
  const auto hull = lower_hull_2d(pts);
  REQUIRE(hull.size() == 2);
  CHECK(hull.front().x() == 0.0);
  CHECK(hull.back().x() == 5.0);
}

TEST_CASE("a single monotone loss curve hulls to a subset of itself") {
  std::vector<FrontierPoint> pts;
  for (int i = 0; i < 12; ++i)
    pts.push_back(fp(1e18 * std::pow(2.0, i), 4.0 * std::pow(0.93, i), "m" + std::to_string(i)));
  const auto hull = lower_convex_hull(pts);
  CHECK(hull.size() >= 2);
  CHECK(hull.size() <= pts.size());
  for (const auto& v : hull) CHECK(v.run_id.rfind("m", 0) == 0);
}

TEST_CASE("equal x keeps the minimum loss") {
  const std::vector<FrontierPoint> pts = {fp(10, 5, "hi"), fp(10, 2, "lo"), fp(100, 1, "b"),
                                          fp(1000, 0.9, "c")};
  const auto hull = lower_convex_hull(pts);
  for (const auto& v : hull) CHECK(v.run_id != "hi");
}

TEST_CASE("degenerate inputs raise") {
  CHECK_THROWS_AS(lower_convex_hull(std::vector<FrontierPoint>{fp(10, 5), fp(10, 4)}),
                  DegenerateInputError);
  CHECK_THROWS_AS(lower_convex_hull(std::vector<FrontierPoint>{fp(10, 5)}),
                  DegenerateInputError);
}

TEST_CASE("random hulls match gift wrapping, dominate inputs, and are idempotent") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 120);
    std::vector<FrontierPoint> pts;
    std::vector<oracles::Pt> raw;
    for (int i = 0; i < n; ++i) {
      const double x = std::pow(10.0, rng.uniform(0.0, 6.0));
      const double loss = std::pow(10.0, rng.uniform(-1.0, 1.0));
      pts.push_back(fp(x, loss, "r" + std::to_string(i)));
      raw.push_back({std::log10(x), std::log10(loss)});
    }
    const auto hull = lower_convex_hull(pts);

    // Oracle: gift wrapping over log-log coordinates.
    const auto wrap = oracles::lower_hull_gift_wrap(raw);
    REQUIRE(hull.size() == wrap.size());
    for (std::size_t i = 0; i < wrap.size(); ++i)
      CHECK(hull[i].run_id == pts[wrap[i]].run_id);

    // Dominance: every input sits on or above the hull interpolation.
    std::vector<Eigen::Vector2d> hull_xy;
    for (const auto& v : hull) hull_xy.push_back({std::log10(v.x), std::log10(v.loss)});
    for (const auto& p : raw) CHECK(interp(hull_xy, p.x) <= p.y + 1e-12);

    // Idempotence.
    const auto again = lower_convex_hull(hull);
    REQUIRE(again.size() == hull.size());
    for (std::size_t i = 0; i < hull.size(); ++i) CHECK(again[i].run_id == hull[i].run_id);
  }
}

TEST_CASE("adding strictly-above points changes neither vertices nor lines") {
  FrontierGenConfig cfg;
  cfg.exponent = 0.46;
  cfg.points = 24;
  cfg.distractors = 0;
  cfg.seed = 5;
  const auto clean = generate_frontier(cfg);
  cfg.distractors = 150;
  const auto noisy = generate_frontier(cfg);

  const auto hull_clean = lower_convex_hull(clean);
  const auto hull_noisy = lower_convex_hull(noisy);
  REQUIRE(hull_clean.size() == hull_noisy.size());
  for (std::size_t i = 0; i < hull_clean.size(); ++i) {
    CHECK(hull_clean[i].run_id == hull_noisy[i].run_id);
    CHECK(hull_clean[i].x == hull_noisy[i].x);
  }
  const LineFit a = fit_frontier_line(hull_clean, FrontierQuantity::params);
  const LineFit b = fit_frontier_line(hull_noisy, FrontierQuantity::params);
  CHECK(a.slope == b.slope);  // bitwise: same vertices, same accumulation
  CHECK(a.intercept == b.intercept);
}

TEST_CASE("binning minimizers") {
  SUBCASE("hand-partitioned decades") {
    const std::vector<FrontierPoint> pts = {fp(1, 3, "a"), fp(5, 2, "b"), fp(20, 2.5, "c"),
                                            fp(50, 1, "d")};
    const auto mins = binning_minimizers(pts, 1);
    REQUIRE(mins.size() == 2);
    CHECK(mins[0].run_id == "b");
    CHECK(mins[1].run_id == "d");
  }
  SUBCASE("single point maps to itself") {
    const auto mins = binning_minimizers(std::vector<FrontierPoint>{fp(7, 2, "only")});
    REQUIRE(mins.size() == 1);
    CHECK(mins[0].run_id == "only");
  }
  SUBCASE("count never exceeds points") {
    Rng rng(9);
    std::vector<FrontierPoint> pts;
    for (int i = 0; i < 40; ++i)
      pts.push_back(fp(std::pow(10.0, rng.uniform(0, 3)), rng.uniform(1, 2)));
    const auto mins = binning_minimizers(pts, 250);
    CHECK(mins.size() <= pts.size());
  }
}

TEST_CASE("frontier line fits") {
  SUBCASE("two points solve exactly") {
    const std::vector<FrontierPoint> pts = {fp(1e18, 3, "a", 1000, 1e8),
                                            fp(1e20, 2, "b", 1000, 1e9)};
    const LineFit fit = fit_frontier_line(pts, FrontierQuantity::params);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(-1.0).epsilon(1e-9));
  }
  SUBCASE("tokens-per-param slope is the difference of slopes") {
    std::vector<FrontierPoint> pts;
    Rng rng(2);
    for (int i = 0; i < 12; ++i) {
      const double x = std::pow(10.0, 17.0 + 0.5 * i);
      pts.push_back(fp(x, 3.0 - 0.1 * i, "p" + std::to_string(i),
                       static_cast<std::int64_t>(1e9 * std::pow(10.0, 0.3 * i)),
                       1e7 * std::pow(10.0, 0.2 * i) * rng.uniform(0.9, 1.1)));
    }
    const double diff = fit_frontier_line(pts, FrontierQuantity::tokens).slope -
                        fit_frontier_line(pts, FrontierQuantity::params).slope;
    const double direct = fit_frontier_line(pts, FrontierQuantity::tokens_per_param).slope;
    CHECK(direct == doctest::Approx(diff).epsilon(1e-9));
  }
  SUBCASE("noiseless exponent recovery") {
    FrontierGenConfig cfg;
    cfg.exponent = 0.46;
    cfg.points = 40;
    const auto pts = generate_frontier(cfg);
    const LineFit fit = fit_frontier_line(pts, FrontierQuantity::params);
    CHECK(std::abs(fit.slope - 0.46) < 1e-6);
  }
  SUBCASE("all x equal is rank deficient") {
    CHECK_THROWS_AS(
        fit_frontier_line(std::vector<FrontierPoint>{fp(10, 1), fp(10, 2)},
                          FrontierQuantity::params),
        DegenerateInputError);
  }
}

TEST_CASE("approach1_fit end to end") {
  // Synthetic runs: three shapes with power-law-ish loss curves.
  const ArchConfig arch;
  std::vector<RunRecord> runs;
  for (const ModelShape s : {ModelShape{512, 12}, ModelShape{1280, 15}, ModelShape{2560, 8}}) {
    const double n = static_cast<double>(count_params(s, arch).with_embeddings);
    for (int i = 0; i < 30; ++i) {
      RunRecord r;
      r.run_id = std::to_string(s.width) + "x" + std::to_string(s.depth);
      r.shape = s;
      r.tokens = static_cast<std::int64_t>(2e9 * std::pow(1.18, i));
      r.val_loss = 2.0 + 400.0 / std::pow(n, 0.33) +
                   3000.0 / std::pow(static_cast<double>(r.tokens), 0.35);
      r.step_time_seconds = 1.0 + n / 1e9;
      r.gpu_count = 64;
      runs.push_back(std::move(r));
    }
  }

  Approach1Options opts;
  SUBCASE("hull uses no more points than binning") {
    const HullFit hull = approach1_fit(runs, opts);
    opts.frontier = FrontierMethod::binning;
    const HullFit binned = approach1_fit(runs, opts);
    CHECK(hull.vertices.size() <= binned.vertices.size());
    CHECK(hull.vertices.size() >= 2);
  }
  SUBCASE("embedding toggle moves the params line only") {
    const HullFit with = approach1_fit(runs, opts);
    opts.include_embeddings = false;
    const HullFit without = approach1_fit(runs, opts);
    CHECK(with.line_tokens.slope == without.line_tokens.slope);
    CHECK(with.line_params.slope != without.line_params.slope);
  }
  SUBCASE("tokens-per-param identity is exact") {
    const HullFit fit = approach1_fit(runs, opts);
    CHECK(fit.line_tokens_per_param.slope ==
          fit.line_tokens.slope - fit.line_params.slope);
    CHECK(fit.line_tokens_per_param.intercept ==
          fit.line_tokens.intercept - fit.line_params.intercept);
  }
  SUBCASE("gpu_hours axis works when step times exist") {
    opts.axis = BudgetAxis::gpu_hours;
    const HullFit fit = approach1_fit(runs, opts);
    CHECK(fit.vertices.size() >= 2);
  }
  SUBCASE("gpu_hours axis names the offender when step times are missing") {
    runs[0].step_time_seconds.reset();
    opts.axis = BudgetAxis::gpu_hours;
    CHECK_THROWS_WITH_AS(approach1_fit(runs, opts), doctest::Contains("gpu_hours"),
                         PreconditionError);
  }
  SUBCASE("order invariance") {
    const HullFit fit1 = approach1_fit(runs, opts);
    std::vector<RunRecord> shuffled(runs.rbegin(), runs.rend());
    const HullFit fit2 = approach1_fit(shuffled, opts);
    CHECK(fit1.line_params.slope == fit2.line_params.slope);
    CHECK(fit1.vertices.size() == fit2.vertices.size());
  }
}
