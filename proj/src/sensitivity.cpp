#include "gemlaw/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "gemlaw/errors.hpp"

namespace gemlaw {

std::vector<double> default_compute_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 32; ++i) grid.push_back(std::pow(10.0, 17.0 + 8.0 * i / 32.0));
  return grid;
}

std::vector<double> tokens_per_param_curve(const HullFit& fit,
                                           std::span<const double> compute_grid) {
  std::vector<double> out;
  out.reserve(compute_grid.size());
  for (const double c : compute_grid)
    out.push_back(std::pow(10.0, fit.line_tokens_per_param.intercept +
                                     fit.line_tokens_per_param.slope * std::log10(c)));
  return out;
}

std::vector<double> tokens_per_param_curve(const ParametricLaw& law,
                                           std::span<const double> compute_grid) {
  const Prescription p = prescribe(law, compute_grid);
  return p.tokens_per_param;
}

namespace {

struct SingleFit {
  double slope = 0.0;
  std::vector<double> tokens_per_param;
  bool converged = true;
};

SingleFit run_fitter(std::span<const RunRecord> runs, const SensitivityConfig& config,
                     std::span<const double> compute_grid, bool include_embeddings_override,
                     bool has_override) {
  SingleFit out;
  if (config.fitter == Fitter::approach1) {
    Approach1Options opts = config.a1;
    if (has_override) opts.include_embeddings = include_embeddings_override;
    const HullFit fit = approach1_fit(runs, opts);
    out.slope = fit.line_params.slope;
    out.tokens_per_param = tokens_per_param_curve(fit, compute_grid);
  } else {
    FitConfig cfg = config.a3;
    if (has_override) cfg.include_embeddings = include_embeddings_override;
    const ParametricFitReport report = fit_parametric_detailed(runs, cfg);
    out.slope = slope(report.law);
    out.tokens_per_param = tokens_per_param_curve(report.law, compute_grid);
    out.converged = report.starts_converged > 0;
  }
  return out;
}

}  // namespace

LooResult leave_one_out(std::span<const RunRecord> runs, const SensitivityConfig& config) {
  std::set<ModelShape> shapes;
  for (const RunRecord& r : runs) shapes.insert(r.shape);
  if (shapes.size() < 3)
    throw PreconditionError("leave_one_out needs >= 3 distinct shapes, got " +
                            std::to_string(shapes.size()));

  LooResult result;
  result.compute_grid =
      config.compute_grid.empty() ? default_compute_grid() : config.compute_grid;

  const auto refit = [&](std::span<const RunRecord> subset, ModelShape held_out) {
    LooRefit r;
    r.held_out = held_out;
    try {
      const SingleFit fit = run_fitter(subset, config, result.compute_grid, false, false);
      r.ok = true;
      r.slope = fit.slope;
      r.tokens_per_param = fit.tokens_per_param;
    } catch (const Error& e) {
      r.ok = false;
      r.error = e.what();
    }
    return r;
  };

  std::vector<RunRecord> all(runs.begin(), runs.end());
  result.full = refit(all, ModelShape{0, 0});

  for (const ModelShape& held : shapes) {
    std::vector<RunRecord> subset;
    subset.reserve(all.size());
    for (const RunRecord& r : all)
      if (r.shape != held) subset.push_back(r);
    result.refits.push_back(refit(subset, held));
  }

  const std::size_t n = result.compute_grid.size();
  result.band_min.assign(n, std::numeric_limits<double>::infinity());
  result.band_max.assign(n, -std::numeric_limits<double>::infinity());
  bool any = false;
  for (const LooRefit& r : result.refits) {
    if (!r.ok) continue;
    any = true;
    for (std::size_t i = 0; i < n; ++i) {
      result.band_min[i] = std::min(result.band_min[i], r.tokens_per_param[i]);
      result.band_max[i] = std::max(result.band_max[i], r.tokens_per_param[i]);
    }
  }
  if (!any) {
    result.band_min.clear();
    result.band_max.clear();
  }
  return result;
}

AblationTable ablation_table(std::span<const RunRecord> runs,
                             std::span<const AblationRowSpec> rows,
                             const SensitivityConfig& config) {
  AblationTable table;
  table.rows.reserve(rows.size());
  for (const AblationRowSpec& spec : rows) {
    AblationRowResult row;
    row.spec = spec;
    const std::vector<RunRecord> filtered = filter_runs(runs, spec.filter);
    row.n_runs = filtered.size();
    SensitivityConfig row_config = config;
    row_config.fitter = spec.fitter;
    try {
      const SingleFit fit =
          run_fitter(filtered, row_config, config.compute_grid.empty()
                                               ? default_compute_grid()
                                               : config.compute_grid,
                     spec.include_embeddings, true);
      row.ok = true;
      row.slope = fit.slope;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }

  // Deltas against the designated base row of the same group.
  for (AblationRowResult& row : table.rows) {
    if (!row.ok) continue;
    for (const AblationRowResult& base : table.rows) {
      if (!base.spec.is_base || !base.ok) continue;
      if (base.spec.fitter != row.spec.fitter ||
          base.spec.include_embeddings != row.spec.include_embeddings)
        continue;
      row.delta = row.slope - base.slope;
      break;
    }
  }
  return table;
}

std::string render_ablation_text(const AblationTable& table) {
  std::ostringstream out;
  const auto group_name = [](const AblationRowSpec& s) {
    std::string name = s.fitter == Fitter::approach1 ? "Approach 1" : "Approach 3";
    name += s.include_embeddings ? " (w/ Embeds)" : " (no Embeds)";
    return name;
  };
  std::vector<std::string> seen;
  for (const AblationRowResult& row : table.rows) {
    const std::string group = group_name(row.spec);
    if (std::find(seen.begin(), seen.end(), group) == seen.end()) {
      seen.push_back(group);
      out << "== " << group << " ==\n";
    }
    out << "  " << row.spec.label;
    if (row.ok) {
      out << "  slope=" << row.slope;
      if (row.delta) out << "  delta=" << *row.delta;
      out << "  n=" << row.n_runs;
    } else {
      out << "  FAILED: " << row.error;
    }
    out << '\n';
  }
  return out.str();
}

CoeffGrid subsample_grid(const CoeffGrid& grid, int per_axis) {
  if (per_axis < 1) throw PreconditionError("subsample_grid: per_axis must be >= 1");
  const auto pick = [per_axis](std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(per_axis), n);
    if (k >= n) return values;
    std::vector<double> out;
    if (k == 1) {
      out.push_back(values[n / 2]);
      return out;
    }
    // Endpoints included, interior evenly spaced: widest spread first.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(
          std::llround(static_cast<double>(i) * static_cast<double>(n - 1) /
                       static_cast<double>(k - 1)));
      out.push_back(values[idx]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  CoeffGrid out;
  out.ln_a = pick(grid.ln_a);
  out.ln_b = pick(grid.ln_b);
  out.ln_e = pick(grid.ln_e);
  out.alpha = pick(grid.alpha);
  out.beta = pick(grid.beta);
  return out;
}

DeltaGridResult delta_grid_ablation(std::span<const RunRecord> runs,
                                    std::span<const double> deltas,
                                    std::span<const int> grid_sizes, const FitConfig& base) {
  if (deltas.empty() || grid_sizes.empty())
    throw PreconditionError("delta_grid_ablation: deltas and grid_sizes must be non-empty");
  DeltaGridResult result;
  result.deltas.assign(deltas.begin(), deltas.end());
  result.grid_sizes.assign(grid_sizes.begin(), grid_sizes.end());
  result.cells.reserve(deltas.size() * grid_sizes.size());
  for (const double delta : deltas) {
    for (const int gsize : grid_sizes) {
      DeltaGridCell cell;
      cell.huber_delta = delta;
      cell.grid_size = gsize;
      try {
        FitConfig cfg = base;
        cfg.huber_delta = delta;
        cfg.grid = subsample_grid(base.grid, gsize);
        const ParametricFitReport report = fit_parametric_detailed(runs, cfg);
        cell.ok = true;
        cell.token_exponent = report.law.alpha / (report.law.alpha + report.law.beta);
        cell.objective = report.law.objective;
        const auto& win = report.starts[static_cast<std::size_t>(report.law.init_used)];
        cell.converged = win.status == LbfgsStatus::converged;
      } catch (const Error& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace gemlaw
