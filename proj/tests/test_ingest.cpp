#include <doctest.h>

#include <sstream>

#include "gemlaw/ingest.hpp"
#include "gemlaw/rng.hpp"

using namespace gemlaw;

namespace {

const char* kHeader =
    "run_id,width,depth,tokens,val_loss,step_time_seconds,gpu_count,lr_variant,schedule,"
    "eval_dataset\n";

RunRecord make_run(std::string id, std::int64_t w, std::int64_t d, std::int64_t tokens,
                   double loss) {
  RunRecord r;
  r.run_id = std::move(id);
  r.shape = {w, d};
  r.tokens = tokens;
  r.val_loss = loss;
  return r;
}

}  // namespace

TEST_CASE("empty file with a valid header loads to an empty list") {
  std::istringstream in(kHeader);
  const auto result = load_runs(in, LogFormat::csv);
  CHECK(result.records.empty());
  CHECK(result.issues.empty());
}

TEST_CASE("missing required column is a hard error") {
  std::istringstream in("run_id,width,depth,tokens\n");
  CHECK_THROWS_AS(load_runs(in, LogFormat::csv), ParseError);
}

TEST_CASE("bad rows are collected with line numbers") {
  std::istringstream in(std::string(kHeader) +
                        "a,512,12,1000,2.5,,,main,hot,dolma\n"
                        "b,512,12,1000,-1,,,main,hot,dolma\n"
                        "c,512,12,0,2.5,,,main,hot,dolma\n"
                        "a,512,12,1000,2.6,,,main,hot,dolma\n"
                        "d,512,12,1000,2.5,,,weird,hot,dolma\n");
  const auto result = load_runs(in, LogFormat::csv);
  CHECK(result.records.size() == 1);
  REQUIRE(result.issues.size() == 4);
  CHECK(result.issues[0].line == 3);
  CHECK(result.issues[0].message.find("val_loss must be positive") != std::string::npos);
  CHECK(result.issues[1].message.find("tokens must be positive") != std::string::npos);
  CHECK(result.issues[2].message.find("duplicate") != std::string::npos);
  CHECK(result.issues[3].message.find("lr_variant") != std::string::npos);
}

TEST_CASE("unknown columns warn but do not reject") {
  std::istringstream in(
      "run_id,width,depth,tokens,val_loss,wandb_url\n"
      "a,512,12,1000,2.5,http://x\n");
  const auto result = load_runs(in, LogFormat::csv);
  CHECK(result.records.size() == 1);
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].message.find("wandb_url") != std::string::npos);
}

TEST_CASE("write-then-load round trip is exact in both formats") {
  std::vector<RunRecord> runs;
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    RunRecord r = make_run("run" + std::to_string(i % 7), 512 + 128 * (i % 4), 3 + i,
                           1 + static_cast<std::int64_t>(rng.uniform01() * 1e12),
                           0.1 + 5.0 * rng.uniform01());
    if (i % 3 == 0) r.step_time_seconds = rng.uniform(0.1, 9.0);
    if (i % 4 == 0) r.gpu_count = 8 * (1 + i % 5);
    if (i % 2 == 0) r.lr_variant = LrVariant::half_lr;
    if (i % 5 == 0) r.schedule = Schedule::cooldown;
    r.eval_dataset = i % 2 ? "dolma" : "fineweb_edu";
    runs.push_back(std::move(r));
  }
  for (const LogFormat format : {LogFormat::csv, LogFormat::jsonl}) {
    std::ostringstream out;
    write_runs(out, runs, format);
    std::istringstream in(out.str());
    const auto loaded = load_runs(in, format);
    CHECK(loaded.issues.empty());
    REQUIRE(loaded.records.size() == runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& a = runs[i];
      const auto& b = loaded.records[i];
      CHECK(a.run_id == b.run_id);
      CHECK(a.shape == b.shape);
      CHECK(a.tokens == b.tokens);
      CHECK(a.val_loss == b.val_loss);  // bitwise: %.17g round-trips
      CHECK(a.step_time_seconds == b.step_time_seconds);
      CHECK(a.gpu_count == b.gpu_count);
      CHECK(a.lr_variant == b.lr_variant);
      CHECK(a.schedule == b.schedule);
      CHECK(a.eval_dataset == b.eval_dataset);
    }
  }
}

TEST_CASE("benchmark records validate metric ranges") {
  std::istringstream in(
      "run_id,tokens,metric,value,benchmark_set\n"
      "a,1000,avg_top1_error,0.4,all8\n"
      "a,1000,avg_accuracy,1.2,all8\n"
      "a,2000,task_loss,0.0,arc\n"
      "a,2000,task_loss,1.5,arc\n");
  const auto result = load_bench(in, LogFormat::csv);
  CHECK(result.records.size() == 2);
  REQUIRE(result.issues.size() == 2);
  CHECK(result.issues[0].message.find("[0,1]") != std::string::npos);
  CHECK(result.issues[1].message.find("positive") != std::string::npos);
}

TEST_CASE("token-range filters reproduce the resampling rows") {
  std::vector<RunRecord> runs = {make_run("a", 512, 12, 50'000'000'000, 3.0),
                                 make_run("b", 512, 12, 150'000'000'000, 2.5)};
  FilterSpec le100;
  le100.tokens = TokenRange{.lo = std::nullopt, .hi = 100'000'000'000};
  const auto low = filter_runs(runs, le100);
  REQUIRE(low.size() == 1);
  CHECK(low[0].run_id == "a");

  FilterSpec gt120;
  gt120.tokens = TokenRange{.lo = 120'000'000'000, .hi = std::nullopt, .lo_exclusive = true};
  const auto high = filter_runs(runs, gt120);
  REQUIRE(high.size() == 1);
  CHECK(high[0].run_id == "b");

  // Complementarity outside the (100b, 120b] gap.
  runs.push_back(make_run("gap", 512, 12, 110'000'000'000, 2.7));
  CHECK(filter_runs(runs, le100).size() + filter_runs(runs, gt120).size() + 1 == runs.size());

  // Exclusive bound is strict.
  runs.push_back(make_run("edge", 512, 12, 120'000'000'000, 2.6));
  for (const auto& r : filter_runs(runs, gt120)) CHECK(r.tokens > 120'000'000'000);
}

TEST_CASE("trivial filter is the identity and clauses conjoin") {
  std::vector<RunRecord> runs;
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    RunRecord r = make_run("r" + std::to_string(i), 256 * (1 + i % 5), 3 + i % 9,
                           1 + static_cast<std::int64_t>(rng.uniform01() * 4e11), 2.0);
    r.lr_variant = i % 2 ? LrVariant::half_lr : LrVariant::main;
    r.schedule = i % 3 ? Schedule::hot : Schedule::cooldown;
    r.eval_dataset = i % 4 ? "dolma" : "dclm";
    runs.push_back(std::move(r));
  }
  CHECK(filter_runs(runs, FilterSpec{}).size() == runs.size());

  FilterSpec a;
  a.tokens = TokenRange{.lo = std::nullopt, .hi = 200'000'000'000};
  FilterSpec b;
  b.lr_variant = LrVariant::main;
  b.schedule = Schedule::hot;
  FilterSpec both = a;
  both.lr_variant = b.lr_variant;
  both.schedule = b.schedule;

  const auto chained = filter_runs(filter_runs(runs, a), b);
  const auto joint = filter_runs(runs, both);
  REQUIRE(chained.size() == joint.size());
  for (std::size_t i = 0; i < chained.size(); ++i)
    CHECK(chained[i].run_id == joint[i].run_id);
}

TEST_CASE("reduced sampling picks nearest shapes and token counts") {
  const ArchConfig arch;
  std::vector<RunRecord> runs;
  for (const ModelShape s : {ModelShape{512, 12}, ModelShape{1280, 15}, ModelShape{2560, 8}}) {
    for (const std::int64_t t : {int64_t{10'000'000'000}, int64_t{50'000'000'000},
                                 int64_t{100'000'000'000}, int64_t{300'000'000'000}}) {
      runs.push_back(make_run(std::to_string(s.width) + "x" + std::to_string(s.depth),
                              s.width, s.depth, t, 3.0));
    }
  }

  SUBCASE("exact reference reproduces its own run") {
    const auto pc = count_params({1280, 15}, arch);
    ReducedSamplingReference ref{static_cast<double>(pc.with_embeddings),
                                 aspect_ratio({1280, 15}),
                                 {50'000'000'000}};
    const auto result = chinchilla_reduced_sampling(runs, std::vector{ref}, arch);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].shape == ModelShape{1280, 15});
    CHECK(result.records[0].tokens == 50'000'000'000);
  }

  SUBCASE("five references with four token counts cap at twenty records") {
    std::vector<ReducedSamplingReference> refs;
    for (int i = 0; i < 5; ++i) {
      refs.push_back({1e8 * std::pow(10.0, i * 0.35), 40.0 + 30.0 * i,
                      {10'000'000'000, 50'000'000'000, 100'000'000'000, 300'000'000'000}});
    }
    const auto result = chinchilla_reduced_sampling(runs, refs, arch);
    CHECK(result.records.size() <= 20);
  }

  SUBCASE("two references near one shape dedupe to distinct (shape, tokens)") {
    const auto pc = count_params({512, 12}, arch);
    ReducedSamplingReference ref1{static_cast<double>(pc.with_embeddings), 42.0,
                                  {10'000'000'000}};
    ReducedSamplingReference ref2 = ref1;
    ref2.params *= 1.01;
    const auto result = chinchilla_reduced_sampling(runs, std::vector{ref1, ref2}, arch);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].shape == ModelShape{512, 12});
  }

  SUBCASE("nearest-shape choice matches a brute-force scan") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      ReducedSamplingReference ref{std::pow(10.0, rng.uniform(7.5, 9.5)),
                                   std::pow(10.0, rng.uniform(1.0, 2.6)),
                                   {50'000'000'000}};
      const auto result = chinchilla_reduced_sampling(runs, std::vector{ref}, arch);
      REQUIRE(result.records.size() == 1);

      // Brute force over the distinct shapes present in `runs`.
      double best = 1e300;
      ModelShape best_shape{};
      for (const ModelShape s :
           {ModelShape{512, 12}, ModelShape{1280, 15}, ModelShape{2560, 8}}) {
        const auto pc = count_params(s, arch);
        const double dx =
            std::log10(static_cast<double>(pc.with_embeddings)) - std::log10(ref.params);
        const double dy = std::log10(aspect_ratio(s)) - std::log10(ref.aspect_ratio);
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          best_shape = s;
        }
      }
      CHECK(result.records[0].shape == best_shape);
    }
  }

  SUBCASE("deterministic and a subset of the input") {
    std::vector<ReducedSamplingReference> refs{{5e8, 85.0, {20'000'000'000, 90'000'000'000}}};
    const auto r1 = chinchilla_reduced_sampling(runs, refs, arch);
    const auto r2 = chinchilla_reduced_sampling(runs, refs, arch);
    REQUIRE(r1.records.size() == r2.records.size());
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
      CHECK(r1.records[i].run_id == r2.records[i].run_id);
      CHECK(r1.records[i].tokens == r2.records[i].tokens);
      bool found = false;
      for (const auto& r : runs)
        found = found || (r.run_id == r1.records[i].run_id && r.tokens == r1.records[i].tokens);
      CHECK(found);
    }
  }

  SUBCASE("no runs yields a warning, not an error") {
    const auto result = chinchilla_reduced_sampling(
        std::vector<RunRecord>{}, std::vector<ReducedSamplingReference>{{1e8, 40.0, {1000}}},
        arch);
    CHECK(result.records.empty());
    CHECK(result.warnings.size() == 1);
  }
}
