// Command-line interface: ingestion, frontier/parametric fitting,
// compute-optimal prescriptions, benchmark laws, hyperparameter tables and
// sensitivity analyses. Batch-only; every report embeds the tool version,
// resolved config and input digests so reruns are byte-identical.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gemlaw/bench_laws.hpp"
#include "gemlaw/errors.hpp"
#include "gemlaw/flops.hpp"
#include "gemlaw/hull.hpp"
#include "gemlaw/hyperparam.hpp"
#include "gemlaw/ingest.hpp"
#include "gemlaw/parametric.hpp"
#include "gemlaw/report.hpp"
#include "gemlaw/sensitivity.hpp"
#include "gemlaw/synth.hpp"
#include "gemlaw/version.hpp"

namespace {

using gemlaw::Json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// "lo:hi:count" -> count log-spaced values, inclusive of both ends.
std::vector<double> parse_log_grid(const std::string& spec) {
  double lo = 0, hi = 0;
  long count = 0;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &count, &extra) != 3 ||
      !(lo > 0) || !(hi >= lo) || count < 1)
    throw gemlaw::PreconditionError("bad grid spec '" + spec +
                                    "', expected lo:hi:count with 0 < lo <= hi");
  std::vector<double> out;
  if (count == 1 || hi == lo) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (long i = 0; i < count; ++i)
    out.push_back(std::pow(10.0, llo + (lhi - llo) * static_cast<double>(i) /
                                      static_cast<double>(count - 1)));
  return out;
}

std::vector<gemlaw::RunRecord> load_runs_or_die(const std::string& path) {
  const auto result = gemlaw::load_runs_file(path);
  for (const auto& issue : result.issues)
    std::cerr << "warning: " << path << ":" << issue.line << ": " << issue.message << '\n';
  if (result.records.empty())
    throw gemlaw::PreconditionError("no valid run records in " + path);
  return result.records;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw gemlaw::ParseError("cannot open file for writing: " + path);
  out << text;
}

struct CommonFitArgs {
  std::string runs_path;
  std::string embeddings = "include";
  std::string out_path;

  bool include_embeddings() const { return embeddings == "include"; }
};

gemlaw::FilterSpec filter_from_file(const std::string& path) {
  return path.empty() ? gemlaw::FilterSpec{}
                      : gemlaw::filter_from_json(gemlaw::read_json_file(path));
}

Json error_json(const std::string& type, const std::string& message) {
  return Json{{"error", Json{{"type", type}, {"message", message}}}};
}

int run(int argc, char** argv) {
  CLI::App app{"Scaling-law fitting toolkit for transformer training-run logs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gemlaw::kVersion));

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "Fit a scaling law to run records");
  fit->require_subcommand(1);

  auto* a1 = fit->add_subcommand("a1", "Frontier fit: lower convex hull or binning");
  CommonFitArgs a1_args;
  std::string a1_axis = "flops", a1_frontier = "hull", a1_filter_path;
  a1->add_option("--runs", a1_args.runs_path, "Run records (csv or jsonl)")->required();
  a1->add_option("--axis", a1_axis, "Budget axis: flops|gpu_hours")
      ->check(CLI::IsMember({"flops", "gpu_hours"}));
  a1->add_option("--frontier", a1_frontier, "Frontier method: hull|binning")
      ->check(CLI::IsMember({"hull", "binning"}));
  a1->add_option("--embeddings", a1_args.embeddings, "include|exclude")
      ->check(CLI::IsMember({"include", "exclude"}));
  a1->add_option("--filter", a1_filter_path, "Optional filter spec (json)");
  a1->add_option("--out", a1_args.out_path, "Report path (json)")->required();

  auto* a3 = fit->add_subcommand("a3", "Parametric fit with Huber loss");
  CommonFitArgs a3_args;
  double a3_delta = 1e-4;
  std::string a3_grid = "default", a3_filter_path;
  a3->add_option("--runs", a3_args.runs_path, "Run records (csv or jsonl)")->required();
  a3->add_option("--delta", a3_delta, "Huber delta");
  a3->add_option("--grid", a3_grid, "Init grid: 'default' or a json file");
  a3->add_option("--embeddings", a3_args.embeddings, "include|exclude")
      ->check(CLI::IsMember({"include", "exclude"}));
  a3->add_option("--filter", a3_filter_path, "Optional filter spec (json)");
  a3->add_option("--out", a3_args.out_path, "Report path (json)")->required();

  // ---- prescribe ----
  auto* prescribe_cmd = app.add_subcommand("prescribe", "Compute-optimal table from a law");
  std::string pre_law_path, pre_compute = "1e18:1e26:33", pre_out;
  prescribe_cmd->add_option("--law", pre_law_path, "Law report (json)")->required();
  prescribe_cmd->add_option("--compute", pre_compute, "Budget grid lo:hi:count");
  prescribe_cmd->add_option("--out", pre_out, "Output table (csv)")->required();

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Benchmark performance laws");
  bench->require_subcommand(1);
  auto* fit_err = bench->add_subcommand("fit-err", "Error law from validation loss");
  auto* fit_acc = bench->add_subcommand("fit-acc", "Accuracy sigmoid from task loss");
  std::string be_runs, be_scores, be_out, be_sets;
  for (auto* cmd : {fit_err, fit_acc}) {
    cmd->add_option("--runs", be_runs, "Run records (needed for fit-err)");
    cmd->add_option("--scores", be_scores, "Benchmark scores (csv or jsonl)")->required();
    cmd->add_option("--benchmark-sets", be_sets, "Comma-separated benchmark_set filter");
    cmd->add_option("--out", be_out, "Report path (json)")->required();
  }

  // ---- flops ----
  auto* flops_cmd = app.add_subcommand("flops", "FLOPs per token for a shape");
  std::int64_t f_width = 0, f_depth = 0;
  bool f_breakdown = false;
  std::int64_t f_seq_len = 2048;
  double f_tokens = 0.0;
  flops_cmd->add_option("--width", f_width)->required();
  flops_cmd->add_option("--depth", f_depth)->required();
  flops_cmd->add_flag("--breakdown", f_breakdown, "Print per-component table");
  flops_cmd->add_option("--seq-len", f_seq_len, "Context length");
  flops_cmd->add_option("--tokens", f_tokens, "Also print total FLOPs for this many tokens");

  // ---- hyper ----
  auto* hyper_cmd = app.add_subcommand("hyper", "LR and init-sigma table for a shape");
  std::int64_t h_width = 0, h_depth = 0;
  bool h_patch = false;
  double h_lr_base = 5.0;
  std::string h_out;
  hyper_cmd->add_option("--width", h_width)->required();
  hyper_cmd->add_option("--depth", h_depth)->required();
  hyper_cmd->add_flag("--patch", h_patch, "Apply the extreme-aspect-ratio patch");
  hyper_cmd->add_option("--lr-base", h_lr_base, "Base learning rate");
  hyper_cmd->add_option("--out", h_out, "Write the table as CSV instead of stdout");

  // ---- loo ----
  auto* loo_cmd = app.add_subcommand("loo", "Leave-one-shape-out refits");
  std::string loo_runs, loo_fitter = "a3", loo_out, loo_embeddings = "include";
  loo_cmd->add_option("--runs", loo_runs)->required();
  loo_cmd->add_option("--fitter", loo_fitter)->check(CLI::IsMember({"a1", "a3"}));
  loo_cmd->add_option("--embeddings", loo_embeddings)
      ->check(CLI::IsMember({"include", "exclude"}));
  loo_cmd->add_option("--out", loo_out, "Report path (json)")->required();

  // ---- ablate ----
  auto* ablate_cmd = app.add_subcommand("ablate", "Slope table over data resamplings");
  std::string ab_runs, ab_spec, ab_out, ab_csv;
  ablate_cmd->add_option("--runs", ab_runs)->required();
  ablate_cmd->add_option("--spec", ab_spec, "Row specs (json)")->required();
  ablate_cmd->add_option("--out", ab_out, "Report path (json)");
  ablate_cmd->add_option("--csv", ab_csv, "Also write the table as CSV");

  // ---- deltagrid ----
  auto* dg_cmd = app.add_subcommand("deltagrid", "Huber-delta / grid-size stability matrix");
  std::string dg_runs, dg_out, dg_deltas = "1e-5,1e-4,1e-3", dg_sizes = "1,2,3,4,5";
  dg_cmd->add_option("--runs", dg_runs)->required();
  dg_cmd->add_option("--deltas", dg_deltas, "Comma-separated Huber deltas");
  dg_cmd->add_option("--grid-sizes", dg_sizes, "Comma-separated per-axis grid sizes");
  dg_cmd->add_option("--out", dg_out, "Report path (json)")->required();

  // ---- overtrain ----
  auto* ot_cmd = app.add_subcommand("overtrain", "Loss along an overtraining sweep");
  std::string ot_law, ot_factors = "0.1:10:25", ot_out;
  double ot_compute = 0.0;
  ot_cmd->add_option("--law", ot_law, "Law report (json)")->required();
  ot_cmd->add_option("--compute", ot_compute, "FLOP budget")->required();
  ot_cmd->add_option("--factors", ot_factors, "Factor grid lo:hi:count");
  ot_cmd->add_option("--out", ot_out, "Output table (csv)");

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic data from known laws");
  synth_cmd->require_subcommand(1);
  auto* synth_runs = synth_cmd->add_subcommand("runs", "Run records from a loss law");
  std::string sr_shapes = "512x12,768x24,1024x28,1280x36,1792x18,2560x8";
  std::string sr_tokens = "2e9:350e9:12", sr_law, sr_out;
  double sr_noise = 0.0;
  std::uint64_t sr_seed = 0;
  synth_runs->add_option("--shapes", sr_shapes, "Comma-separated WIDTHxDEPTH list");
  synth_runs->add_option("--tokens", sr_tokens, "Token grid lo:hi:count");
  synth_runs->add_option("--law", sr_law, "A,B,alpha,beta,eps or a law report path")
      ->required();
  synth_runs->add_option("--noise", sr_noise, "Lognormal noise sigma");
  synth_runs->add_option("--seed", sr_seed);
  synth_runs->add_option("--out", sr_out, "Output records (csv or jsonl)")->required();

  auto* synth_frontier = synth_cmd->add_subcommand("frontier", "Frontier points on an exact envelope");
  gemlaw::FrontierGenConfig fr_cfg;
  std::string fr_out;
  synth_frontier->add_option("--exponent", fr_cfg.exponent);
  synth_frontier->add_option("--points", fr_cfg.points);
  synth_frontier->add_option("--distractors", fr_cfg.distractors);
  synth_frontier->add_option("--noise", fr_cfg.noise);
  synth_frontier->add_option("--seed", fr_cfg.seed);
  synth_frontier->add_option("--out", fr_out, "Output table (csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  // ---------------------------------------------------------------- fit a1
  if (a1->parsed()) {
    auto runs = load_runs_or_die(a1_args.runs_path);
    const gemlaw::FilterSpec filter = filter_from_file(a1_filter_path);
    runs = gemlaw::filter_runs(runs, filter);
    gemlaw::Approach1Options opts;
    opts.axis = a1_axis == "flops" ? gemlaw::BudgetAxis::flops : gemlaw::BudgetAxis::gpu_hours;
    opts.frontier = a1_frontier == "hull" ? gemlaw::FrontierMethod::hull
                                          : gemlaw::FrontierMethod::binning;
    opts.include_embeddings = a1_args.include_embeddings();
    const gemlaw::HullFit result = gemlaw::approach1_fit(runs, opts);
    Json config{{"runs", a1_args.runs_path},
                {"axis", a1_axis},
                {"frontier", a1_frontier},
                {"embeddings", a1_args.embeddings},
                {"filter", to_json(filter)},
                {"bins_per_decade", opts.bins_per_decade},
                {"arch", to_json(opts.arch)}};
    gemlaw::write_json_file(
        a1_args.out_path,
        gemlaw::make_report("fit_a1", config, {a1_args.runs_path}, to_json(result)));
    std::cout << "params slope " << fmt(result.line_params.slope) << " over "
              << result.vertices.size() << " frontier points\n";
    return 0;
  }

  // ---------------------------------------------------------------- fit a3
  if (a3->parsed()) {
    auto runs = load_runs_or_die(a3_args.runs_path);
    const gemlaw::FilterSpec filter = filter_from_file(a3_filter_path);
    runs = gemlaw::filter_runs(runs, filter);
    gemlaw::FitConfig cfg;
    cfg.huber_delta = a3_delta;
    cfg.include_embeddings = a3_args.include_embeddings();
    if (a3_grid != "default") cfg.grid = gemlaw::grid_from_json(gemlaw::read_json_file(a3_grid));
    const gemlaw::ParametricFitReport report = gemlaw::fit_parametric_detailed(runs, cfg);
    Json config{{"runs", a3_args.runs_path},
                {"embeddings", a3_args.embeddings},
                {"filter", to_json(filter)},
                {"fit", to_json(cfg)}};
    gemlaw::write_json_file(
        a3_args.out_path,
        gemlaw::make_report("fit_a3", config, {a3_args.runs_path}, to_json(report)));
    std::cout << "alpha " << fmt(report.law.alpha) << " beta " << fmt(report.law.beta)
              << " slope " << fmt(gemlaw::slope(report.law)) << '\n';
    return 0;
  }

  // ------------------------------------------------------------- prescribe
  if (prescribe_cmd->parsed()) {
    const gemlaw::ParametricLaw law =
        gemlaw::law_from_json(gemlaw::read_json_file(pre_law_path));
    const auto grid = parse_log_grid(pre_compute);
    const gemlaw::Prescription result = gemlaw::prescribe(law, grid);
    write_text_file(pre_out, gemlaw::prescription_csv(result));
    std::cout << "a " << fmt(result.a) << " b " << fmt(result.b) << " G " << fmt(result.G)
              << '\n';
    return 0;
  }

  // ----------------------------------------------------------------- bench
  if (fit_err->parsed() || fit_acc->parsed()) {
    std::set<std::string> sets;
    if (!be_sets.empty()) {
      std::stringstream ss(be_sets);
      std::string item;
      while (std::getline(ss, item, ',')) sets.insert(item);
    }
    const auto bench_result = gemlaw::load_bench_file(be_scores);
    for (const auto& issue : bench_result.issues)
      std::cerr << "warning: " << be_scores << ":" << issue.line << ": " << issue.message
                << '\n';
    std::vector<std::filesystem::path> inputs{be_scores};
    Json config{{"scores", be_scores}, {"benchmark_sets", be_sets}};
    if (fit_err->parsed()) {
      if (be_runs.empty())
        throw gemlaw::PreconditionError("bench fit-err requires --runs for validation losses");
      const auto runs = load_runs_or_die(be_runs);
      inputs.insert(inputs.begin(), be_runs);
      config["runs"] = be_runs;
      const auto samples = gemlaw::join_runs_to_scores(
          runs, bench_result.records, gemlaw::BenchMetric::avg_top1_error, sets);
      const gemlaw::ErrLaw law = gemlaw::fit_err_law(samples);
      Json result = to_json(law);
      result["n_samples"] = samples.size();
      gemlaw::write_json_file(be_out,
                              gemlaw::make_report("bench_err", config, inputs, result));
      std::cout << "eps_b " << fmt(law.eps_b) << " k " << fmt(law.k) << " gamma "
                << fmt(law.gamma) << '\n';
    } else {
      const auto samples = gemlaw::join_scores_to_scores(
          bench_result.records, gemlaw::BenchMetric::task_loss,
          gemlaw::BenchMetric::avg_accuracy, sets);
      const gemlaw::AccLaw law = gemlaw::fit_acc_law(samples);
      Json result = to_json(law);
      result["n_samples"] = samples.size();
      gemlaw::write_json_file(be_out,
                              gemlaw::make_report("bench_acc", config, inputs, result));
      std::cout << "a " << fmt(law.a_amp) << " b " << fmt(law.b_floor) << " k "
                << fmt(law.k_rate) << " l0 " << fmt(law.l0) << '\n';
    }
    return 0;
  }

  // ----------------------------------------------------------------- flops
  if (flops_cmd->parsed()) {
    gemlaw::ArchConfig arch;
    arch.seq_len = f_seq_len;
    const gemlaw::ModelShape shape{f_width, f_depth};
    const gemlaw::FlopBreakdown b = gemlaw::flops_per_token(shape, arch);
    const gemlaw::ParamCount pc = gemlaw::count_params(shape, arch);
    std::cout << "flops_per_token " << fmt(b.total) << '\n';
    std::cout << "params_with_embeddings " << pc.with_embeddings << '\n';
    std::cout << "params_without_embeddings " << pc.without_embeddings << '\n';
    std::cout << "six_n_ratio_with_embeddings "
              << fmt(gemlaw::six_n_ratio(shape, arch, true)) << '\n';
    if (f_breakdown) {
      const Json j = to_json(b);
      for (const auto& [key, value] : j.items())
        if (key != "total") std::cout << key << ' ' << fmt(value.get<double>()) << '\n';
    }
    if (f_tokens > 0)
      std::cout << "total_flops " << fmt(gemlaw::total_flops(shape, arch, f_tokens)) << '\n';
    return 0;
  }

  // ----------------------------------------------------------------- hyper
  if (hyper_cmd->parsed()) {
    const gemlaw::ModelShape shape{h_width, h_depth};
    const auto rows = gemlaw::init_table(shape, {}, {h_lr_base}, h_patch);
    std::ostringstream csv;
    csv << "tensor,kind,layer_index,sigma,trunc_lo,trunc_hi,lr\n";
    const auto kind_name = [](gemlaw::ParamKind k) {
      switch (k) {
        case gemlaw::ParamKind::general: return "general";
        case gemlaw::ParamKind::attention_projection: return "attention_projection";
        case gemlaw::ParamKind::mlp_projection: return "mlp_projection";
      }
      return "general";
    };
    for (const auto& row : rows) {
      csv << row.tensor << ',' << kind_name(row.kind) << ',' << row.layer_index << ','
          << fmt(row.sigma) << ',' << fmt(row.trunc_lo) << ',' << fmt(row.trunc_hi) << ','
          << fmt(row.lr) << '\n';
    }
    std::cout << "lr_eff " << fmt(gemlaw::effective_lr(shape, {h_lr_base}, h_patch)) << '\n';
    std::cout << "patched_depth " << gemlaw::patched_depth(shape) << '\n';
    if (h_out.empty())
      std::cout << csv.str();
    else
      write_text_file(h_out, csv.str());
    return 0;
  }

  // ------------------------------------------------------------------- loo
  if (loo_cmd->parsed()) {
    const auto runs = load_runs_or_die(loo_runs);
    gemlaw::SensitivityConfig cfg;
    cfg.fitter = loo_fitter == "a1" ? gemlaw::Fitter::approach1 : gemlaw::Fitter::approach3;
    cfg.a1.include_embeddings = loo_embeddings == "include";
    cfg.a3.include_embeddings = loo_embeddings == "include";
    const gemlaw::LooResult result = gemlaw::leave_one_out(runs, cfg);
    Json config{{"runs", loo_runs}, {"fitter", loo_fitter}, {"embeddings", loo_embeddings}};
    gemlaw::write_json_file(loo_out,
                            gemlaw::make_report("loo", config, {loo_runs}, to_json(result)));
    std::cout << result.refits.size() << " refits\n";
    return 0;
  }

  // ---------------------------------------------------------------- ablate
  if (ablate_cmd->parsed()) {
    const auto runs = load_runs_or_die(ab_runs);
    const auto rows = gemlaw::ablation_rows_from_json(gemlaw::read_json_file(ab_spec));
    const gemlaw::AblationTable table =
        gemlaw::ablation_table(runs, rows, gemlaw::SensitivityConfig{});
    if (!ab_out.empty()) {
      Json config{{"runs", ab_runs}, {"spec", ab_spec}};
      gemlaw::write_json_file(
          ab_out, gemlaw::make_report("ablate", config, {ab_runs, ab_spec}, to_json(table)));
    }
    if (!ab_csv.empty()) {
      std::ostringstream csv;
      csv << "label,fitter,include_embeddings,is_base,ok,slope,delta,n_runs\n";
      for (const auto& row : table.rows) {
        csv << row.spec.label << ','
            << (row.spec.fitter == gemlaw::Fitter::approach1 ? "a1" : "a3") << ','
            << (row.spec.include_embeddings ? "include" : "exclude") << ','
            << (row.spec.is_base ? 1 : 0) << ',' << (row.ok ? 1 : 0) << ',';
        if (row.ok) csv << fmt(row.slope);
        csv << ',';
        if (row.delta) csv << fmt(*row.delta);
        csv << ',' << row.n_runs << '\n';
      }
      write_text_file(ab_csv, csv.str());
    }
    std::cout << gemlaw::render_ablation_text(table);
    return 0;
  }

  // ------------------------------------------------------------- deltagrid
  if (dg_cmd->parsed()) {
    const auto runs = load_runs_or_die(dg_runs);
    std::vector<double> deltas;
    std::vector<int> sizes;
    {
      std::stringstream ss(dg_deltas);
      std::string item;
      while (std::getline(ss, item, ',')) deltas.push_back(std::stod(item));
      std::stringstream ss2(dg_sizes);
      while (std::getline(ss2, item, ',')) sizes.push_back(std::stoi(item));
    }
    const gemlaw::DeltaGridResult result =
        gemlaw::delta_grid_ablation(runs, deltas, sizes, gemlaw::FitConfig{});
    Json config{{"runs", dg_runs}, {"deltas", deltas}, {"grid_sizes", sizes}};
    gemlaw::write_json_file(
        dg_out, gemlaw::make_report("deltagrid", config, {dg_runs}, to_json(result)));
    std::cout << result.cells.size() << " cells\n";
    return 0;
  }

  // ------------------------------------------------------------- overtrain
  if (ot_cmd->parsed()) {
    const gemlaw::ParametricLaw law = gemlaw::law_from_json(gemlaw::read_json_file(ot_law));
    const auto factors = parse_log_grid(ot_factors);
    const auto points = gemlaw::overtraining_curve(law, ot_compute, factors);
    std::ostringstream csv;
    csv << "factor,params,tokens,loss,representable\n";
    for (const auto& p : points) {
      csv << fmt(p.factor) << ',';
      if (p.representable)
        csv << fmt(p.params) << ',' << fmt(p.tokens) << ',' << fmt(p.loss) << ",1\n";
      else
        csv << ",,,0\n";
    }
    if (ot_out.empty())
      std::cout << csv.str();
    else
      write_text_file(ot_out, csv.str());
    return 0;
  }

  // ------------------------------------------------------------ synth runs
  if (synth_runs->parsed()) {
    gemlaw::ParametricLaw law;
    if (sr_law.find(',') != std::string::npos) {
      double A, B, alpha, beta, eps;
      if (std::sscanf(sr_law.c_str(), "%lf,%lf,%lf,%lf,%lf", &A, &B, &alpha, &beta, &eps) != 5)
        throw gemlaw::PreconditionError("--law must be A,B,alpha,beta,eps or a report path");
      law.A = A;
      law.B = B;
      law.alpha = alpha;
      law.beta = beta;
      law.eps = eps;
    } else {
      law = gemlaw::law_from_json(gemlaw::read_json_file(sr_law));
    }
    std::vector<gemlaw::ModelShape> shapes;
    {
      std::stringstream ss(sr_shapes);
      std::string item;
      while (std::getline(ss, item, ',')) {
        long w = 0, d = 0;
        if (std::sscanf(item.c_str(), "%ldx%ld", &w, &d) != 2)
          throw gemlaw::PreconditionError("bad shape '" + item + "', expected WIDTHxDEPTH");
        shapes.push_back({w, d});
      }
    }
    std::vector<std::int64_t> tokens;
    for (const double t : parse_log_grid(sr_tokens))
      tokens.push_back(static_cast<std::int64_t>(std::llround(t)));
    gemlaw::RunGenConfig cfg;
    cfg.noise_sigma = sr_noise;
    cfg.seed = sr_seed;
    const auto records = gemlaw::generate_runs(law, shapes, tokens, cfg);
    gemlaw::write_runs_file(sr_out, records);
    std::cout << records.size() << " records\n";
    return 0;
  }

  // -------------------------------------------------------- synth frontier
  if (synth_frontier->parsed()) {
    const auto points = gemlaw::generate_frontier(fr_cfg);
    std::ostringstream csv;
    csv << "run_id,x,loss,tokens,params\n";
    for (const auto& p : points)
      csv << p.run_id << ',' << fmt(p.x) << ',' << fmt(p.loss) << ',' << p.tokens << ','
          << fmt(p.params) << '\n';
    write_text_file(fr_out, csv.str());
    std::cout << points.size() << " points\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gemlaw::ConstraintError& e) {
    std::cerr << error_json("constraint", e.what()).dump() << '\n';
    return 2;
  } catch (const gemlaw::PreconditionError& e) {
    std::cerr << error_json("precondition", e.what()).dump() << '\n';
    return 2;
  } catch (const gemlaw::DegenerateInputError& e) {
    std::cerr << error_json("degenerate_input", e.what()).dump() << '\n';
    return 2;
  } catch (const gemlaw::ParseError& e) {
    std::cerr << error_json("parse", e.what()).dump() << '\n';
    return 2;
  } catch (const gemlaw::FitFailureError& e) {
    std::cerr << error_json("fit_failure", e.what()).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << '\n';
    return 1;
  }
}
