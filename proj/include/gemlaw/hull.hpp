#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gemlaw/flops.hpp"
#include "gemlaw/records.hpp"

namespace gemlaw {

enum class BudgetAxis { flops, gpu_hours };
enum class FrontierMethod { hull, binning };

/// Coordinate space the lower hull is computed in. Power-law frontiers are
/// convex in log-log space, which is the default; the alternatives exist
/// for sensitivity checks.
enum class HullSpace { linear, log_x, log_log };

/// One observation on the (budget, loss) plane.
struct FrontierPoint {
  double x = 0.0;     // FLOPs or GPU hours
  double loss = 0.0;  // validation loss
  std::string run_id;
  std::int64_t tokens = 0;
  double params = 0.0;
  ModelShape shape;  // {0,0} for synthetic points with no real architecture
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Vertices of the lower convex hull of 2-D points, sorted by x. Points
/// sharing an x keep only the minimum y; interior collinear points are not
/// vertices. Throws DegenerateInputError with fewer than two distinct x.
std::vector<Eigen::Vector2d> lower_hull_2d(std::vector<Eigen::Vector2d> points);

/// Lower convex hull of frontier points, computed in `space` coordinates.
/// Every returned vertex is one of the input points.
std::vector<FrontierPoint> lower_convex_hull(std::span<const FrontierPoint> points,
                                             HullSpace space = HullSpace::log_log);

/// The minimum-loss point of each non-empty logarithmic x bin
/// (bins_per_decade bins per order of magnitude spanning [min x, max x]).
std::vector<FrontierPoint> binning_minimizers(std::span<const FrontierPoint> points,
                                              int bins_per_decade = 250);

enum class FrontierQuantity { params, tokens, tokens_per_param };

/// Ordinary least squares of log10(quantity) on log10(x) over frontier
/// points. The slope is the exponent in quantity = const * x^exponent.
LineFit fit_frontier_line(std::span<const FrontierPoint> frontier, FrontierQuantity quantity);

struct HullFit {
  BudgetAxis axis = BudgetAxis::flops;
  FrontierMethod method = FrontierMethod::hull;
  std::vector<FrontierPoint> vertices;
  LineFit line_params;
  LineFit line_tokens;
  LineFit line_tokens_per_param;  // exactly line_tokens - line_params
};

struct Approach1Options {
  BudgetAxis axis = BudgetAxis::flops;
  FrontierMethod frontier = FrontierMethod::hull;
  bool include_embeddings = true;
  int bins_per_decade = 250;
  HullSpace hull_space = HullSpace::log_log;
  ArchConfig arch{};
  GpuHoursOptions gpu{};
};

/// Builds frontier points from run records (budget per the chosen axis),
/// selects the frontier, and fits the three power-law lines.
HullFit approach1_fit(std::span<const RunRecord> runs, const Approach1Options& options);

/// Converts runs to frontier points without fitting; exposed for the
/// sensitivity module and plot emission.
std::vector<FrontierPoint> make_frontier_points(std::span<const RunRecord> runs,
                                                const Approach1Options& options);

}  // namespace gemlaw
