#include <doctest.h>

#include <cmath>

#include "gemlaw/hyperparam.hpp"

using namespace gemlaw;

TEST_CASE("effective learning rate") {
  CHECK(effective_lr({512, 12}) == doctest::Approx(2.819093111e-3).epsilon(1e-9));
  CHECK(effective_lr({2560, 8}) == doctest::Approx(6.905339660e-4).epsilon(1e-9));
  CHECK(effective_lr({2560, 8}, {}, true) == doctest::Approx(3.830393264e-4).epsilon(1e-9));

  // Halving the base halves the rate everywhere.
  for (const ModelShape s : {ModelShape{512, 12}, ModelShape{3072, 12}, ModelShape{768, 45}})
    CHECK(effective_lr(s, {2.5}) == doctest::Approx(0.5 * effective_lr(s, {5.0})).epsilon(1e-15));
}

TEST_CASE("patched depth") {
  CHECK(patched_depth({3072, 12}) == 12);  // ratio exactly 256: no patch
  CHECK(patched_depth({2560, 8}) == 26);   // ceil(2560/100)
  CHECK(patched_depth({512, 512}) == 512);
  // Activates iff width/depth > 256; when active, depends on width only.
  for (std::int64_t w = 256; w <= 3072; w += 256) {
    for (std::int64_t d = 1; d <= 40; ++d) {
      const std::int64_t out = patched_depth({w, d});
      if (static_cast<double>(w) / d > 256.0)
        CHECK(out == static_cast<std::int64_t>(std::ceil(w / 100.0)));
      else
        CHECK(out == d);
    }
  }
}

TEST_CASE("effective lr decreases in width and effective depth") {
  for (std::int64_t w = 256; w < 3072; w += 256)
    CHECK(effective_lr({w + 256, 12}) < effective_lr({w, 12}));
  for (std::int64_t d = 1; d < 40; ++d)
    CHECK(effective_lr({512, d + 1}) < effective_lr({512, d}));
}

TEST_CASE("init sigma rules") {
  CHECK(init_sigma(ParamKind::general, 1024, 0) == 0.03125);
  CHECK(init_sigma(ParamKind::attention_projection, 1024, 0) ==
        doctest::Approx(0.022097086912).epsilon(1e-9));
  // MLP projection is attention projection over sqrt(expand_factor).
  for (const std::int64_t l : {0, 3, 9})
    CHECK(init_sigma(ParamKind::mlp_projection, 1024, l) ==
          doctest::Approx(init_sigma(ParamKind::attention_projection, 1024, l) / 2.0));

  // Strictly decreasing in layer index for projections, constant otherwise.
  for (std::int64_t l = 0; l < 20; ++l) {
    CHECK(init_sigma(ParamKind::attention_projection, 768, l + 1) <
          init_sigma(ParamKind::attention_projection, 768, l));
    CHECK(init_sigma(ParamKind::mlp_projection, 768, l + 1) <
          init_sigma(ParamKind::mlp_projection, 768, l));
    CHECK(init_sigma(ParamKind::general, 768, l + 1) == init_sigma(ParamKind::general, 768, l));
  }
}

TEST_CASE("init table covers every block with symmetric truncation") {
  const auto rows = init_table({512, 12});
  // embedding + head + 4 tensors per block.
  CHECK(rows.size() == 2 + 4 * 12);
  for (const auto& row : rows) {
    CHECK(row.trunc_lo == -3.0 * row.sigma);
    CHECK(row.trunc_hi == 3.0 * row.sigma);
    CHECK(row.sigma > 0);
    CHECK(row.lr == doctest::Approx(effective_lr({512, 12})));
  }
}
