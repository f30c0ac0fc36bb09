#include "gemlaw/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "gemlaw/errors.hpp"

namespace gemlaw {

namespace {

using Json = nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal CSV field splitter with double-quote support.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

bool parse_double_strict(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

// Accepts plain and scientific notation but rejects fractional values.
bool parse_int_strict(const std::string& s, std::int64_t& out) {
  double v;
  if (!parse_double_strict(s, v)) return false;
  if (std::abs(v) > 9.0e18) return false;
  const double rounded = std::nearbyint(v);
  if (std::abs(v - rounded) > 1e-6 * std::max(1.0, std::abs(v))) return false;
  out = static_cast<std::int64_t>(rounded);
  return true;
}

// Validates shared RunRecord invariants; returns an error message or empty.
std::string validate_run(const RunRecord& r) {
  if (r.run_id.empty()) return "run_id must be non-empty";
  if (r.shape.width < 1) return "width must be >= 1";
  if (r.shape.depth < 1) return "depth must be >= 1";
  if (r.tokens <= 0) return "tokens must be positive";
  if (!(r.val_loss > 0)) return "val_loss must be positive";
  if (r.step_time_seconds && !(*r.step_time_seconds > 0))
    return "step_time_seconds must be positive when present";
  if (r.gpu_count && *r.gpu_count < 1) return "gpu_count must be >= 1 when present";
  return {};
}

std::string validate_bench(const BenchRecord& r) {
  if (r.run_id.empty()) return "run_id must be non-empty";
  if (r.tokens <= 0) return "tokens must be positive";
  switch (r.metric) {
    case BenchMetric::avg_top1_error:
    case BenchMetric::avg_accuracy:
      if (r.value < 0.0 || r.value > 1.0) return "value must be in [0,1] for error/accuracy";
      break;
    case BenchMetric::task_loss:
      if (!(r.value > 0.0)) return "task_loss value must be positive";
      break;
  }
  return {};
}

const std::vector<std::string> kRunColumns = {
    "run_id",    "width",          "depth",      "tokens",  "val_loss",
    "step_time_seconds", "gpu_count", "lr_variant", "schedule", "eval_dataset"};

const std::vector<std::string> kBenchColumns = {"run_id", "tokens", "metric", "value",
                                                "benchmark_set"};

using ColumnMap = std::unordered_map<std::string, std::size_t>;

ColumnMap read_header(const std::string& line, const std::vector<std::string>& known,
                      std::vector<LoadIssue>& issues) {
  ColumnMap map;
  const auto fields = split_csv(line);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (std::find(known.begin(), known.end(), fields[i]) == known.end()) {
      issues.push_back({1, "unknown column '" + fields[i] + "' ignored"});
      continue;
    }
    map[fields[i]] = i;
  }
  return map;
}

std::optional<std::string> get_field(const ColumnMap& cols,
                                     const std::vector<std::string>& fields,
                                     const std::string& name) {
  const auto it = cols.find(name);
  if (it == cols.end() || it->second >= fields.size()) return std::nullopt;
  if (fields[it->second].empty()) return std::nullopt;
  return fields[it->second];
}

// Parses one run row given either CSV fields or a JSON object.
template <typename Get>
std::optional<RunRecord> parse_run_row(Get&& get, std::string& error) {
  RunRecord r;
  const auto need = [&](const char* name) -> std::optional<std::string> {
    auto v = get(name);
    if (!v) error = std::string("missing field '") + name + "'";
    return v;
  };
  auto run_id = need("run_id");
  if (!run_id) return std::nullopt;
  r.run_id = *run_id;
  const auto parse_ints = [&](const char* name, std::int64_t& out) {
    auto v = need(name);
    if (!v) return false;
    if (!parse_int_strict(*v, out)) {
      error = std::string("field '") + name + "' is not an integer: " + *v;
      return false;
    }
    return true;
  };
  if (!parse_ints("width", r.shape.width)) return std::nullopt;
  if (!parse_ints("depth", r.shape.depth)) return std::nullopt;
  if (!parse_ints("tokens", r.tokens)) return std::nullopt;
  auto loss = need("val_loss");
  if (!loss) return std::nullopt;
  if (!parse_double_strict(*loss, r.val_loss)) {
    error = "field 'val_loss' is not a number: " + *loss;
    return std::nullopt;
  }
  if (auto v = get("step_time_seconds")) {
    double st;
    if (!parse_double_strict(*v, st)) {
      error = "field 'step_time_seconds' is not a number: " + *v;
      return std::nullopt;
    }
    r.step_time_seconds = st;
  }
  if (auto v = get("gpu_count")) {
    std::int64_t gc;
    if (!parse_int_strict(*v, gc)) {
      error = "field 'gpu_count' is not an integer: " + *v;
      return std::nullopt;
    }
    r.gpu_count = gc;
  }
  if (auto v = get("lr_variant")) {
    auto parsed = parse_lr_variant(*v);
    if (!parsed) {
      error = "field 'lr_variant' must be 'main' or 'half_lr', got: " + *v;
      return std::nullopt;
    }
    r.lr_variant = *parsed;
  }
  if (auto v = get("schedule")) {
    auto parsed = parse_schedule(*v);
    if (!parsed) {
      error = "field 'schedule' must be 'hot' or 'cooldown', got: " + *v;
      return std::nullopt;
    }
    r.schedule = *parsed;
  }
  if (auto v = get("eval_dataset")) r.eval_dataset = *v;
  error = validate_run(r);
  if (!error.empty()) return std::nullopt;
  return r;
}

template <typename Get>
std::optional<BenchRecord> parse_bench_row(Get&& get, std::string& error) {
  BenchRecord r;
  auto run_id = get("run_id");
  if (!run_id) {
    error = "missing field 'run_id'";
    return std::nullopt;
  }
  r.run_id = *run_id;
  auto tokens = get("tokens");
  if (!tokens || !parse_int_strict(*tokens, r.tokens)) {
    error = "field 'tokens' missing or not an integer";
    return std::nullopt;
  }
  auto metric = get("metric");
  if (!metric) {
    error = "missing field 'metric'";
    return std::nullopt;
  }
  auto parsed = parse_bench_metric(*metric);
  if (!parsed) {
    error = "field 'metric' must be avg_top1_error|avg_accuracy|task_loss, got: " + *metric;
    return std::nullopt;
  }
  r.metric = *parsed;
  auto value = get("value");
  if (!value || !parse_double_strict(*value, r.value)) {
    error = "field 'value' missing or not a number";
    return std::nullopt;
  }
  if (auto v = get("benchmark_set")) r.benchmark_set = *v;
  error = validate_bench(r);
  if (!error.empty()) return std::nullopt;
  return r;
}

std::optional<std::string> json_field(const Json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  if (it->is_number()) return format_double(it->get<double>());
  if (it->is_boolean()) return std::string(it->get<bool>() ? "true" : "false");
  return it->dump();
}

}  // namespace

std::string_view to_string(LrVariant v) {
  return v == LrVariant::main ? "main" : "half_lr";
}
std::string_view to_string(Schedule s) {
  return s == Schedule::hot ? "hot" : "cooldown";
}
std::string_view to_string(BenchMetric m) {
  switch (m) {
    case BenchMetric::avg_top1_error: return "avg_top1_error";
    case BenchMetric::avg_accuracy: return "avg_accuracy";
    case BenchMetric::task_loss: return "task_loss";
  }
  return "avg_top1_error";
}

std::optional<LrVariant> parse_lr_variant(std::string_view s) {
  if (s == "main") return LrVariant::main;
  if (s == "half_lr") return LrVariant::half_lr;
  return std::nullopt;
}
std::optional<Schedule> parse_schedule(std::string_view s) {
  if (s == "hot") return Schedule::hot;
  if (s == "cooldown") return Schedule::cooldown;
  return std::nullopt;
}
std::optional<BenchMetric> parse_bench_metric(std::string_view s) {
  if (s == "avg_top1_error") return BenchMetric::avg_top1_error;
  if (s == "avg_accuracy") return BenchMetric::avg_accuracy;
  if (s == "task_loss") return BenchMetric::task_loss;
  return std::nullopt;
}

RunLoadResult load_runs(std::istream& in, LogFormat format) {
  RunLoadResult out;
  std::set<std::tuple<std::string, std::int64_t, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;

  const auto accept = [&](std::optional<RunRecord> rec, const std::string& error) {
    if (!rec) {
      out.issues.push_back({line_no, error});
      return;
    }
    const auto key = std::make_tuple(rec->run_id, rec->tokens, rec->eval_dataset);
    if (!seen.insert(key).second) {
      out.issues.push_back(
          {line_no, "duplicate (run_id, tokens, eval_dataset): " + rec->run_id + ", " +
                        std::to_string(rec->tokens) + ", " + rec->eval_dataset});
      return;
    }
    out.records.push_back(std::move(*rec));
  };

  if (format == LogFormat::csv) {
    if (!std::getline(in, line)) throw ParseError("empty input: missing CSV header");
    ++line_no;
    const ColumnMap cols = read_header(line, kRunColumns, out.issues);
    for (const char* required : {"run_id", "width", "depth", "tokens", "val_loss"}) {
      if (!cols.count(required))
        throw ParseError(std::string("CSV header missing required column '") + required + "'");
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto fields = split_csv(line);
      std::string error;
      accept(parse_run_row(
                 [&](const char* name) { return get_field(cols, fields, name); }, error),
             error);
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      Json obj = Json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) {
        out.issues.push_back({line_no, "line is not a JSON object"});
        continue;
      }
      std::string error;
      accept(parse_run_row([&](const char* name) { return json_field(obj, name); }, error),
             error);
    }
  }
  return out;
}

BenchLoadResult load_bench(std::istream& in, LogFormat format) {
  BenchLoadResult out;
  std::string line;
  std::size_t line_no = 0;
  if (format == LogFormat::csv) {
    if (!std::getline(in, line)) throw ParseError("empty input: missing CSV header");
    ++line_no;
    const ColumnMap cols = read_header(line, kBenchColumns, out.issues);
    for (const char* required : {"run_id", "tokens", "metric", "value"}) {
      if (!cols.count(required))
        throw ParseError(std::string("CSV header missing required column '") + required + "'");
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto fields = split_csv(line);
      std::string error;
      auto rec = parse_bench_row(
          [&](const char* name) { return get_field(cols, fields, name); }, error);
      if (rec)
        out.records.push_back(std::move(*rec));
      else
        out.issues.push_back({line_no, error});
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      Json obj = Json::parse(line, nullptr, false);
      if (obj.is_discarded() || !obj.is_object()) {
        out.issues.push_back({line_no, "line is not a JSON object"});
        continue;
      }
      std::string error;
      auto rec =
          parse_bench_row([&](const char* name) { return json_field(obj, name); }, error);
      if (rec)
        out.records.push_back(std::move(*rec));
      else
        out.issues.push_back({line_no, error});
    }
  }
  return out;
}

namespace {

LogFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return LogFormat::jsonl;
  return LogFormat::csv;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path.string());
  return out;
}

}  // namespace

RunLoadResult load_runs_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_runs(in, format_from_extension(path));
}

BenchLoadResult load_bench_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_bench(in, format_from_extension(path));
}

void write_runs(std::ostream& out, std::span<const RunRecord> records, LogFormat format) {
  if (format == LogFormat::csv) {
    out << "run_id,width,depth,tokens,val_loss,step_time_seconds,gpu_count,lr_variant,"
           "schedule,eval_dataset\n";
    for (const RunRecord& r : records) {
      out << r.run_id << ',' << r.shape.width << ',' << r.shape.depth << ',' << r.tokens
          << ',' << format_double(r.val_loss) << ',';
      if (r.step_time_seconds) out << format_double(*r.step_time_seconds);
      out << ',';
      if (r.gpu_count) out << *r.gpu_count;
      out << ',' << to_string(r.lr_variant) << ',' << to_string(r.schedule) << ','
          << r.eval_dataset << '\n';
    }
    return;
  }
  for (const RunRecord& r : records) {
    Json obj;
    obj["run_id"] = r.run_id;
    obj["width"] = r.shape.width;
    obj["depth"] = r.shape.depth;
    obj["tokens"] = r.tokens;
    obj["val_loss"] = r.val_loss;
    if (r.step_time_seconds) obj["step_time_seconds"] = *r.step_time_seconds;
    if (r.gpu_count) obj["gpu_count"] = *r.gpu_count;
    obj["lr_variant"] = std::string(to_string(r.lr_variant));
    obj["schedule"] = std::string(to_string(r.schedule));
    obj["eval_dataset"] = r.eval_dataset;
    out << obj.dump() << '\n';
  }
}

void write_runs_file(const std::filesystem::path& path, std::span<const RunRecord> records) {
  auto out = open_output(path);
  write_runs(out, records, format_from_extension(path));
}

void write_bench(std::ostream& out, std::span<const BenchRecord> records, LogFormat format) {
  if (format == LogFormat::csv) {
    out << "run_id,tokens,metric,value,benchmark_set\n";
    for (const BenchRecord& r : records) {
      out << r.run_id << ',' << r.tokens << ',' << to_string(r.metric) << ','
          << format_double(r.value) << ',' << r.benchmark_set << '\n';
    }
    return;
  }
  for (const BenchRecord& r : records) {
    Json obj;
    obj["run_id"] = r.run_id;
    obj["tokens"] = r.tokens;
    obj["metric"] = std::string(to_string(r.metric));
    obj["value"] = r.value;
    obj["benchmark_set"] = r.benchmark_set;
    out << obj.dump() << '\n';
  }
}

void write_bench_file(const std::filesystem::path& path, std::span<const BenchRecord> records) {
  auto out = open_output(path);
  write_bench(out, records, format_from_extension(path));
}

bool FilterSpec::matches(const RunRecord& r) const {
  if (tokens && !tokens->contains(r.tokens)) return false;
  if (lr_variant && r.lr_variant != *lr_variant) return false;
  if (schedule && r.schedule != *schedule) return false;
  if (eval_dataset && r.eval_dataset != *eval_dataset) return false;
  if (!shapes_allow.empty() &&
      std::find(shapes_allow.begin(), shapes_allow.end(), r.shape) == shapes_allow.end())
    return false;
  if (std::find(shapes_deny.begin(), shapes_deny.end(), r.shape) != shapes_deny.end())
    return false;
  return true;
}

std::vector<RunRecord> filter_runs(std::span<const RunRecord> runs, const FilterSpec& spec) {
  std::vector<RunRecord> out;
  for (const RunRecord& r : runs)
    if (spec.matches(r)) out.push_back(r);
  return out;
}

ReducedSamplingResult chinchilla_reduced_sampling(
    std::span<const RunRecord> runs, std::span<const ReducedSamplingReference> references,
    const ArchConfig& arch) {
  if (references.empty())
    throw PreconditionError("chinchilla_reduced_sampling: references must be non-empty");
  ReducedSamplingResult out;
  if (runs.empty()) {
    out.warnings.push_back("no runs available; returning empty selection");
    return out;
  }

  // Distinct shapes with their match coordinates.
  std::map<ModelShape, std::pair<double, double>> shape_coords;  // (log params, log aspect)
  for (const RunRecord& r : runs) {
    if (!shape_coords.count(r.shape)) {
      const auto pc = count_params(r.shape, arch);
      shape_coords[r.shape] = {std::log10(static_cast<double>(pc.with_embeddings)),
                               std::log10(aspect_ratio(r.shape))};
    }
  }

  std::vector<std::size_t> selected;  // indices into runs, selection order
  std::set<std::size_t> selected_set;
  for (const ReducedSamplingReference& ref : references) {
    if (!(ref.params > 0) || !(ref.aspect_ratio > 0))
      throw PreconditionError("reference params and aspect_ratio must be positive");
    const double lp = std::log10(ref.params);
    const double la = std::log10(ref.aspect_ratio);

    // Nearest shape in (log params, log aspect ratio); map order already
    // breaks ties by smaller width then depth.
    const ModelShape* best_shape = nullptr;
    double best_d2 = 0.0;
    for (const auto& [shape, coords] : shape_coords) {
      const double dx = coords.first - lp;
      const double dy = coords.second - la;
      const double d2 = dx * dx + dy * dy;
      if (!best_shape || d2 < best_d2) {
        best_shape = &shape;
        best_d2 = d2;
      }
    }

    for (const std::int64_t want : ref.token_counts) {
      const double lw = std::log10(static_cast<double>(want));
      std::size_t best_idx = runs.size();
      double best_dist = 0.0;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].shape != *best_shape) continue;
        const double dist = std::abs(std::log10(static_cast<double>(runs[i].tokens)) - lw);
        const bool better =
            best_idx == runs.size() || dist < best_dist ||
            (dist == best_dist && runs[i].tokens < runs[best_idx].tokens);
        if (better) {
          best_idx = i;
          best_dist = dist;
        }
      }
      if (best_idx == runs.size()) continue;  // shape has no records at all
      if (selected_set.insert(best_idx).second) selected.push_back(best_idx);
    }
  }

  out.records.reserve(selected.size());
  for (const std::size_t i : selected) out.records.push_back(runs[i]);
  return out;
}

}  // namespace gemlaw
