#include "gemlaw/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gemlaw/errors.hpp"
#include "gemlaw/sha256.hpp"
#include "gemlaw/version.hpp"

namespace gemlaw {

namespace {

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Json to_json(const ModelShape& shape) {
  return Json{{"width", shape.width}, {"depth", shape.depth}};
}

Json to_json(const ArchConfig& arch) {
  return Json{{"vocab_size", arch.vocab_size},
              {"head_size", arch.head_size},
              {"expand_factor", arch.expand_factor},
              {"queries_per_group", arch.queries_per_group},
              {"seq_len", arch.seq_len},
              {"tie_embeddings", arch.tie_embeddings}};
}

Json to_json(const FlopBreakdown& b) {
  return Json{{"embeddings", b.embeddings},
              {"attention_projections", b.attention_projections},
              {"rope", b.rope},
              {"kq_logits", b.kq_logits},
              {"softmax", b.softmax},
              {"softmax_value_reduction", b.softmax_value_reduction},
              {"attention_output", b.attention_output},
              {"mlp", b.mlp},
              {"norms", b.norms},
              {"lm_head", b.lm_head},
              {"backward", b.backward},
              {"total", b.total}};
}

Json to_json(const LineFit& fit) {
  return Json{{"slope", fit.slope}, {"intercept", fit.intercept}};
}

Json to_json(const FrontierPoint& p) {
  return Json{{"run_id", p.run_id}, {"x", p.x},           {"loss", p.loss},
              {"tokens", p.tokens}, {"params", p.params}, {"shape", to_json(p.shape)}};
}

Json to_json(const HullFit& fit) {
  Json vertices = Json::array();
  for (const auto& v : fit.vertices) vertices.push_back(to_json(v));
  return Json{{"axis", fit.axis == BudgetAxis::flops ? "flops" : "gpu_hours"},
              {"frontier", fit.method == FrontierMethod::hull ? "hull" : "binning"},
              {"vertices", vertices},
              {"line_params", to_json(fit.line_params)},
              {"line_tokens", to_json(fit.line_tokens)},
              {"line_tokens_per_param", to_json(fit.line_tokens_per_param)}};
}

Json to_json(const ParametricLaw& law) {
  return Json{{"A", law.A},     {"B", law.B},           {"alpha", law.alpha},
              {"beta", law.beta}, {"eps", law.eps},
              {"objective", law.objective}, {"init_used", law.init_used}};
}

Json to_json(const ParametricFitReport& report) {
  return Json{{"law", to_json(report.law)},
              {"starts_converged", report.starts_converged},
              {"starts_stalled", report.starts_stalled},
              {"starts_failed", report.starts_failed},
              {"n_starts", report.starts.size()}};
}

Json to_json(const CoeffGrid& grid) {
  return Json{{"ln_a", grid.ln_a},
              {"ln_b", grid.ln_b},
              {"ln_e", grid.ln_e},
              {"alpha", grid.alpha},
              {"beta", grid.beta}};
}

Json to_json(const FitConfig& config) {
  return Json{{"huber_delta", config.huber_delta},
              {"grid", to_json(config.grid)},
              {"max_iterations", config.max_iterations},
              {"convergence_tol", config.convergence_tol},
              {"include_embeddings", config.include_embeddings},
              {"arch", to_json(config.arch)}};
}

Json to_json(const Prescription& p) {
  return Json{{"G", p.G},
              {"a", p.a},
              {"b", p.b},
              {"compute", p.compute},
              {"n_opt", p.n_opt},
              {"d_opt", p.d_opt},
              {"tokens_per_param", p.tokens_per_param}};
}

Json to_json(const ErrLaw& law) {
  return Json{{"eps_b", law.eps_b},
              {"k", law.k},
              {"gamma", law.gamma},
              {"objective", law.objective}};
}

Json to_json(const AccLaw& law) {
  return Json{{"a_amp", law.a_amp},
              {"b_floor", law.b_floor},
              {"k_rate", law.k_rate},
              {"l0", law.l0},
              {"objective", law.objective}};
}

Json to_json(const FilterSpec& spec) {
  Json j = Json::object();
  if (spec.tokens) {
    Json t = Json::object();
    if (spec.tokens->lo) t["min"] = *spec.tokens->lo;
    if (spec.tokens->hi) t["max"] = *spec.tokens->hi;
    if (spec.tokens->lo_exclusive) t["min_exclusive"] = true;
    if (spec.tokens->hi_exclusive) t["max_exclusive"] = true;
    j["tokens"] = t;
  }
  if (spec.lr_variant) j["lr_variant"] = std::string(to_string(*spec.lr_variant));
  if (spec.schedule) j["schedule"] = std::string(to_string(*spec.schedule));
  if (spec.eval_dataset) j["eval_dataset"] = *spec.eval_dataset;
  if (!spec.shapes_allow.empty()) {
    Json arr = Json::array();
    for (const auto& s : spec.shapes_allow) arr.push_back(to_json(s));
    j["shapes_allow"] = arr;
  }
  if (!spec.shapes_deny.empty()) {
    Json arr = Json::array();
    for (const auto& s : spec.shapes_deny) arr.push_back(to_json(s));
    j["shapes_deny"] = arr;
  }
  return j;
}

Json to_json(const AblationTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json j{{"label", row.spec.label},
           {"fitter", row.spec.fitter == Fitter::approach1 ? "a1" : "a3"},
           {"include_embeddings", row.spec.include_embeddings},
           {"is_base", row.spec.is_base},
           {"filter", to_json(row.spec.filter)},
           {"ok", row.ok},
           {"n_runs", row.n_runs}};
    if (row.ok) {
      j["slope"] = row.slope;
      if (row.delta) j["delta"] = *row.delta;
    } else {
      j["error"] = row.error;
    }
    rows.push_back(j);
  }
  return Json{{"rows", rows}};
}

Json to_json(const LooResult& result) {
  const auto refit_json = [](const LooRefit& r) {
    Json j{{"held_out", to_json(r.held_out)}, {"ok", r.ok}};
    if (r.ok) {
      j["slope"] = r.slope;
      j["tokens_per_param"] = r.tokens_per_param;
    } else {
      j["error"] = r.error;
    }
    return j;
  };
  Json refits = Json::array();
  for (const auto& r : result.refits) refits.push_back(refit_json(r));
  return Json{{"compute_grid", result.compute_grid},
              {"full", refit_json(result.full)},
              {"refits", refits},
              {"band_min", result.band_min},
              {"band_max", result.band_max}};
}

Json to_json(const DeltaGridResult& result) {
  Json cells = Json::array();
  for (const auto& c : result.cells) {
    Json j{{"huber_delta", c.huber_delta}, {"grid_size", c.grid_size}, {"ok", c.ok}};
    if (c.ok) {
      j["token_exponent"] = c.token_exponent;
      j["converged"] = c.converged;
      j["objective"] = c.objective;
    } else {
      j["error"] = c.error;
    }
    cells.push_back(j);
  }
  return Json{{"deltas", result.deltas}, {"grid_sizes", result.grid_sizes}, {"cells", cells}};
}

Json to_json(std::span<const OvertrainingPoint> points) {
  Json arr = Json::array();
  for (const auto& p : points) {
    Json j{{"factor", p.factor}, {"representable", p.representable}};
    if (p.representable) {
      j["params"] = p.params;
      j["tokens"] = p.tokens;
      j["loss"] = p.loss;
    }
    arr.push_back(j);
  }
  return arr;
}

ModelShape shape_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2) return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
  return {j.at("width").get<std::int64_t>(), j.at("depth").get<std::int64_t>()};
}

FilterSpec filter_from_json(const Json& j) {
  FilterSpec spec;
  if (j.contains("tokens")) {
    const Json& t = j.at("tokens");
    TokenRange range;
    if (t.contains("min"))
      range.lo = static_cast<std::int64_t>(std::llround(t.at("min").get<double>()));
    if (t.contains("max"))
      range.hi = static_cast<std::int64_t>(std::llround(t.at("max").get<double>()));
    if (t.contains("min_exclusive")) range.lo_exclusive = t.at("min_exclusive").get<bool>();
    if (t.contains("max_exclusive")) range.hi_exclusive = t.at("max_exclusive").get<bool>();
    spec.tokens = range;
  }
  if (j.contains("lr_variant")) {
    const auto v = parse_lr_variant(j.at("lr_variant").get<std::string>());
    if (!v) throw ParseError("filter: bad lr_variant");
    spec.lr_variant = *v;
  }
  if (j.contains("schedule")) {
    const auto v = parse_schedule(j.at("schedule").get<std::string>());
    if (!v) throw ParseError("filter: bad schedule");
    spec.schedule = *v;
  }
  if (j.contains("eval_dataset")) spec.eval_dataset = j.at("eval_dataset").get<std::string>();
  if (j.contains("shapes_allow"))
    for (const Json& s : j.at("shapes_allow")) spec.shapes_allow.push_back(shape_from_json(s));
  if (j.contains("shapes_deny"))
    for (const Json& s : j.at("shapes_deny")) spec.shapes_deny.push_back(shape_from_json(s));
  return spec;
}

CoeffGrid grid_from_json(const Json& j) {
  CoeffGrid grid;
  grid.ln_a = j.at("ln_a").get<std::vector<double>>();
  grid.ln_b = j.at("ln_b").get<std::vector<double>>();
  grid.ln_e = j.at("ln_e").get<std::vector<double>>();
  grid.alpha = j.at("alpha").get<std::vector<double>>();
  grid.beta = j.at("beta").get<std::vector<double>>();
  return grid;
}

ParametricLaw law_from_json(const Json& j) {
  // Accepts both a bare law object and a full fit report.
  const Json& src = j.contains("law")
                        ? j.at("law")
                        : (j.contains("result") && j.at("result").contains("law")
                               ? j.at("result").at("law")
                               : j);
  ParametricLaw law;
  law.A = src.at("A").get<double>();
  law.B = src.at("B").get<double>();
  law.alpha = src.at("alpha").get<double>();
  law.beta = src.at("beta").get<double>();
  law.eps = src.at("eps").get<double>();
  if (src.contains("objective")) law.objective = src.at("objective").get<double>();
  if (src.contains("init_used")) law.init_used = src.at("init_used").get<int>();
  return law;
}

std::vector<AblationRowSpec> ablation_rows_from_json(const Json& j) {
  const Json& rows = j.is_array() ? j : j.at("rows");
  std::vector<AblationRowSpec> out;
  for (const Json& r : rows) {
    AblationRowSpec spec;
    spec.label = r.value("label", std::string("row") + std::to_string(out.size()));
    if (r.contains("filter")) spec.filter = filter_from_json(r.at("filter"));
    const std::string fitter = r.value("fitter", std::string("a3"));
    if (fitter == "a1" || fitter == "approach1")
      spec.fitter = Fitter::approach1;
    else if (fitter == "a3" || fitter == "approach3")
      spec.fitter = Fitter::approach3;
    else
      throw ParseError("ablation row: fitter must be a1 or a3");
    spec.include_embeddings = r.value("include_embeddings", true);
    spec.is_base = r.value("is_base", false);
    out.push_back(std::move(spec));
  }
  return out;
}

Json make_report(const std::string& kind, Json config,
                 const std::vector<std::filesystem::path>& inputs, Json result) {
  Json files = Json::object();
  for (const auto& path : inputs) files[path.string()] = Json{{"sha256", sha256_file(path)}};
  return Json{{"tool", Json{{"name", std::string(kToolName)},
                            {"version", std::string(kVersion)}}},
              {"kind", kind},
              {"config", std::move(config)},
              {"inputs", files},
              {"result", std::move(result)}};
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path.string());
  out << doc.dump(2) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError("invalid JSON: " + path.string());
  return doc;
}

std::string prescription_csv(const Prescription& p) {
  std::string out = "compute,n_opt,d_opt,tokens_per_param\n";
  for (std::size_t i = 0; i < p.compute.size(); ++i) {
    out += csv_double(p.compute[i]) + std::string(",") + csv_double(p.n_opt[i]) + "," +
           csv_double(p.d_opt[i]) + "," + csv_double(p.tokens_per_param[i]) + "\n";
  }
  return out;
}

}  // namespace gemlaw
