#include <doctest.h>

#include <algorithm>

#include "gemlaw/arch.hpp"

using namespace gemlaw;

TEST_CASE("parameter count matches the hand-derived closed form") {
  const ArchConfig arch;
  const ParamCount pc = count_params({2560, 8}, arch);
  CHECK(pc.with_embeddings == 1044032000);
  CHECK(pc.without_embeddings == 786475520);
  CHECK(pc.with_embeddings - pc.without_embeddings == 2 * 50304 * 2560);
  // Lands inside the 1B +-5% group.
  CHECK(pc.with_embeddings >= 0.95e9);
  CHECK(pc.with_embeddings <= 1.05e9);
}

TEST_CASE("tying embeddings halves the table") {
  ArchConfig arch;
  arch.tie_embeddings = true;
  for (const ModelShape shape : {ModelShape{512, 12}, ModelShape{1792, 18}}) {
    const ParamCount pc = count_params(shape, arch);
    CHECK(pc.with_embeddings - pc.without_embeddings == arch.vocab_size * shape.width);
  }
}

TEST_CASE("invalid shapes name the violated constraint") {
  const ArchConfig arch;
  CHECK_THROWS_WITH_AS(count_params({100, 8}, arch),
                       doctest::Contains("divisible by 128"), ConstraintError);
  CHECK_THROWS_WITH_AS(count_params({128, 8}, arch),
                       doctest::Contains("head count must be even"), ConstraintError);
  CHECK_THROWS_WITH_AS(count_params({512, 0}, arch), doctest::Contains("depth"),
                       ConstraintError);
}

TEST_CASE("feasible-shape enumeration around 100M") {
  const ArchConfig arch;
  const auto shapes = enumerate_feasible_shapes(100'000'000, 0.05, arch);
  const auto has = [&](std::int64_t w, std::int64_t d) {
    return std::find(shapes.begin(), shapes.end(), ModelShape{w, d}) != shapes.end();
  };
  CHECK(has(512, 12));
  CHECK(has(512, 13));
  CHECK_FALSE(has(512, 11));
  CHECK_FALSE(has(512, 14));
  CHECK(std::is_sorted(shapes.begin(), shapes.end()));
}

TEST_CASE("zero tolerance is a point interval") {
  const ArchConfig arch;
  const auto target = count_params({512, 12}, arch).with_embeddings;
  const auto shapes = enumerate_feasible_shapes(target, 0.0, arch);
  REQUIRE(shapes.size() == 1);
  CHECK(shapes[0] == ModelShape{512, 12});
}

TEST_CASE("enumeration equals the naive double loop") {
  const ArchConfig arch;
  const EnumerationLimits limits{2048, 64};
  const std::int64_t target = 200'000'000;
  const double tol = 0.10;
  const auto fast = enumerate_feasible_shapes(target, tol, arch, limits);

  std::vector<ModelShape> naive;
  for (std::int64_t w = 256; w <= limits.max_width; w += 256) {
    for (std::int64_t d = 1; d <= limits.max_depth; ++d) {
      const auto n = static_cast<double>(count_params({w, d}, arch).with_embeddings);
      if (n >= target * (1.0 - tol) && n <= target * (1.0 + tol)) naive.push_back({w, d});
    }
  }
  CHECK(fast == naive);
}

TEST_CASE("parameter count is strictly monotone in width and depth") {
  const ArchConfig arch;
  for (std::int64_t w = 256; w <= 3072; w += 256) {
    CHECK(count_params({w, 8}, arch).with_embeddings <
          count_params({w + 256, 8}, arch).with_embeddings);
    CHECK(count_params({w, 8}, arch).with_embeddings <
          count_params({w, 9}, arch).with_embeddings);
  }
}

TEST_CASE("named suite shapes land in their parameter groups") {
  const ArchConfig arch;
  const auto within = [&](ModelShape s, double target, double tol) {
    const auto n = static_cast<double>(count_params(s, arch).with_embeddings);
    return n >= target * (1.0 - tol) && n <= target * (1.0 + tol);
  };
  // 1B trio and the 2B wide model.
  CHECK(within({1280, 36}, 1e9, 0.05));
  CHECK(within({2560, 8}, 1e9, 0.05));
  CHECK(within({1792, 18}, 1e9, 0.05));
  CHECK(within({3072, 12}, 2e9, 0.05));
  // 500M group.
  CHECK(within({768, 45}, 5e8, 0.05));
  CHECK(within({1280, 15}, 5e8, 0.05));
  CHECK(within({1792, 7}, 5e8, 0.05));
  // 1024x28 computes to ~543M: outside every 5% band, inside 10% of 500M.
  CHECK_FALSE(within({1024, 28}, 5e8, 0.05));
  CHECK(within({1024, 28}, 5e8, 0.10));
  // Width-512 family: 12/13 in the 100M band, 11/14 deliberately outside.
  CHECK(within({512, 12}, 1e8, 0.05));
  CHECK(within({512, 13}, 1e8, 0.05));
  CHECK_FALSE(within({512, 11}, 1e8, 0.05));
  CHECK_FALSE(within({512, 14}, 1e8, 0.05));
}

TEST_CASE("aspect ratio") {
  CHECK(aspect_ratio({3072, 12}) == 256.0);
  CHECK(aspect_ratio({2560, 8}) == 320.0);
  CHECK(aspect_ratio({512, 512}) == 1.0);
  CHECK_THROWS_AS(aspect_ratio({512, 0}), PreconditionError);
}
