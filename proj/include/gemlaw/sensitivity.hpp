#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gemlaw/hull.hpp"
#include "gemlaw/ingest.hpp"
#include "gemlaw/parametric.hpp"

namespace gemlaw {

enum class Fitter { approach1, approach3 };

/// Shared settings for refit-based analyses: which fitter, its options,
/// and the compute grid tokens-per-parameter curves are evaluated on.
struct SensitivityConfig {
  Fitter fitter = Fitter::approach3;
  Approach1Options a1{};
  FitConfig a3{};
  std::vector<double> compute_grid;  // empty = default_compute_grid()
};

/// 33 log-spaced budgets covering 1e17..1e25 FLOPs.
std::vector<double> default_compute_grid();

/// Tokens-per-parameter prescription of a fit evaluated on a compute grid.
std::vector<double> tokens_per_param_curve(const HullFit& fit,
                                           std::span<const double> compute_grid);
std::vector<double> tokens_per_param_curve(const ParametricLaw& law,
                                           std::span<const double> compute_grid);

struct LooRefit {
  ModelShape held_out;  // {0,0} for the full-data fit
  bool ok = false;
  std::string error;
  double slope = 0.0;
  std::vector<double> tokens_per_param;
};

struct LooResult {
  std::vector<double> compute_grid;
  LooRefit full;
  std::vector<LooRefit> refits;  // one per distinct held-out shape
  std::vector<double> band_min;  // pointwise over successful refits
  std::vector<double> band_max;
};

/// Refits with each distinct (width, depth) held out in turn. Failed refits
/// are recorded and excluded from the band. Needs >= 3 distinct shapes.
LooResult leave_one_out(std::span<const RunRecord> runs, const SensitivityConfig& config);

struct AblationRowSpec {
  std::string label;
  FilterSpec filter{};
  Fitter fitter = Fitter::approach3;
  bool include_embeddings = true;
  bool is_base = false;  // deltas are taken against the base row of the
                         // same (fitter, embeddings) group
};

struct AblationRowResult {
  AblationRowSpec spec;
  bool ok = false;
  std::string error;
  double slope = 0.0;
  std::optional<double> delta;
  std::size_t n_runs = 0;
};

struct AblationTable {
  std::vector<AblationRowResult> rows;
};

/// Slope per row spec; failing rows are marked, never dropped.
AblationTable ablation_table(std::span<const RunRecord> runs,
                             std::span<const AblationRowSpec> rows,
                             const SensitivityConfig& config);

/// Plain-text rendering grouped by (fitter, embeddings), one row per spec.
std::string render_ablation_text(const AblationTable& table);

struct DeltaGridCell {
  double huber_delta = 0.0;
  int grid_size = 0;
  bool ok = false;
  std::string error;
  double token_exponent = 0.0;  // alpha/(alpha+beta): D_opt(C) ~ C^b
  bool converged = false;       // winning start met the gradient tolerance
  double objective = 0.0;
};

struct DeltaGridResult {
  std::vector<double> deltas;
  std::vector<int> grid_sizes;
  std::vector<DeltaGridCell> cells;  // row-major: deltas x grid_sizes
};

/// Refits the parametric law for every (delta, per-axis grid size) pair.
DeltaGridResult delta_grid_ablation(std::span<const RunRecord> runs,
                                    std::span<const double> deltas,
                                    std::span<const int> grid_sizes, const FitConfig& base);

/// Per-axis subsample keeping the most spread-out values: endpoints first,
/// then evenly spaced interior values; size 1 keeps the middle.
CoeffGrid subsample_grid(const CoeffGrid& grid, int per_axis);

}  // namespace gemlaw
