#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gemlaw/records.hpp"

namespace gemlaw {

enum class LogFormat { csv, jsonl };

struct LoadIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct RunLoadResult {
  std::vector<RunRecord> records;
  std::vector<LoadIssue> issues;  // rejected rows and ignored columns
};

struct BenchLoadResult {
  std::vector<BenchRecord> records;
  std::vector<LoadIssue> issues;
};

/// Loads run records. Individual bad rows (parse failures, invariant
/// violations, duplicate (run_id, tokens, eval_dataset) keys) are collected
/// into `issues`; a stream that cannot be interpreted at all (missing
/// required columns, unreadable) throws ParseError.
///
/// CSV header: run_id,width,depth,tokens,val_loss,step_time_seconds,
/// gpu_count,lr_variant,schedule,eval_dataset. Unknown columns are ignored
/// with a warning. JSONL carries the same keys, one object per line.
RunLoadResult load_runs(std::istream& in, LogFormat format);
RunLoadResult load_runs_file(const std::filesystem::path& path);

/// Benchmark scores: run_id,tokens,metric,value,benchmark_set.
BenchLoadResult load_bench(std::istream& in, LogFormat format);
BenchLoadResult load_bench_file(const std::filesystem::path& path);

void write_runs(std::ostream& out, std::span<const RunRecord> records, LogFormat format);
void write_runs_file(const std::filesystem::path& path, std::span<const RunRecord> records);
void write_bench(std::ostream& out, std::span<const BenchRecord> records, LogFormat format);
void write_bench_file(const std::filesystem::path& path, std::span<const BenchRecord> records);

/// Token-count interval; bounds are inclusive unless flagged exclusive.
struct TokenRange {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;
  bool lo_exclusive = false;
  bool hi_exclusive = false;

  bool contains(std::int64_t tokens) const {
    if (lo && (lo_exclusive ? tokens <= *lo : tokens < *lo)) return false;
    if (hi && (hi_exclusive ? tokens >= *hi : tokens > *hi)) return false;
    return true;
  }
};

/// Conjunction of clauses; absent clauses match everything.
struct FilterSpec {
  std::optional<TokenRange> tokens;
  std::optional<LrVariant> lr_variant;
  std::optional<Schedule> schedule;
  std::optional<std::string> eval_dataset;
  std::vector<ModelShape> shapes_allow;  // empty = no restriction
  std::vector<ModelShape> shapes_deny;

  bool matches(const RunRecord& r) const;
};

/// Records satisfying every clause, input order preserved.
std::vector<RunRecord> filter_runs(std::span<const RunRecord> runs, const FilterSpec& spec);

/// A model from another study to match against: its parameter count,
/// aspect ratio, and the token counts it was fitted at.
struct ReducedSamplingReference {
  double params = 0.0;
  double aspect_ratio = 0.0;
  std::vector<std::int64_t> token_counts;
};

struct ReducedSamplingResult {
  std::vector<RunRecord> records;
  std::vector<std::string> warnings;
};

/// For each reference, picks the run shape nearest in
/// (log10 params_with_embeddings, log10 aspect_ratio), then for each
/// reference token count the record of that shape nearest in log10 tokens.
/// Ties break toward smaller width, then depth, then tokens. Duplicate
/// selections are dropped.
ReducedSamplingResult chinchilla_reduced_sampling(
    std::span<const RunRecord> runs, std::span<const ReducedSamplingReference> references,
    const ArchConfig& arch);

}  // namespace gemlaw
