#include "gemlaw/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gemlaw/errors.hpp"

namespace gemlaw {

namespace {

// Cross product of (b - a) x (c - a); negative or zero means b is not a
// strict vertex of the lower hull when scanning left to right.
inline double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                    const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Monotone chain over indices; assumes points sorted by x with distinct x.
std::vector<std::size_t> lower_chain(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (hull.size() >= 2 &&
           cross(pts[hull[hull.size() - 2]], pts[hull[hull.size() - 1]], pts[i]) <= 0)
      hull.pop_back();
    hull.push_back(i);
  }
  return hull;
}

struct IndexedPoint {
  Eigen::Vector2d p;
  std::size_t source;
};

// Sort canonically and collapse equal x to the minimum y. Ties on (x, y)
// keep the earliest input, so output is permutation-invariant given the
// caller pre-sorts on a full key.
std::vector<IndexedPoint> dedup_min_y(std::vector<IndexedPoint> pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const IndexedPoint& a, const IndexedPoint& b) {
    if (a.p.x() != b.p.x()) return a.p.x() < b.p.x();
    return a.p.y() < b.p.y();
  });
  std::vector<IndexedPoint> out;
  for (const auto& ip : pts) {
    if (!out.empty() && out.back().p.x() == ip.p.x()) continue;  // keep min y
    out.push_back(ip);
  }
  return out;
}

}  // namespace

std::vector<Eigen::Vector2d> lower_hull_2d(std::vector<Eigen::Vector2d> points) {
  std::vector<IndexedPoint> ipts;
  ipts.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) ipts.push_back({points[i], i});
  auto dedup = dedup_min_y(std::move(ipts));
  if (dedup.size() < 2)
    throw DegenerateInputError("lower hull needs >= 2 points with distinct x");
  std::vector<Eigen::Vector2d> sorted;
  sorted.reserve(dedup.size());
  for (const auto& ip : dedup) sorted.push_back(ip.p);
  std::vector<Eigen::Vector2d> out;
  for (const std::size_t i : lower_chain(sorted)) out.push_back(sorted[i]);
  return out;
}

namespace {

Eigen::Vector2d to_space(const FrontierPoint& p, HullSpace space) {
  switch (space) {
    case HullSpace::linear: return {p.x, p.loss};
    case HullSpace::log_x: return {std::log10(p.x), p.loss};
    case HullSpace::log_log: return {std::log10(p.x), std::log10(p.loss)};
  }
  return {p.x, p.loss};
}

void validate_points(std::span<const FrontierPoint> points) {
  for (const FrontierPoint& p : points) {
    if (!(p.x > 0) || !std::isfinite(p.x))
      throw PreconditionError("frontier point x must be positive and finite (run " +
                              p.run_id + ")");
    if (!(p.loss > 0) || !std::isfinite(p.loss))
      throw PreconditionError("frontier point loss must be positive and finite (run " +
                              p.run_id + ")");
  }
}

// Canonical order so results do not depend on input permutation.
bool canonical_less(const FrontierPoint& a, const FrontierPoint& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.loss != b.loss) return a.loss < b.loss;
  if (a.run_id != b.run_id) return a.run_id < b.run_id;
  return a.tokens < b.tokens;
}

}  // namespace

std::vector<FrontierPoint> lower_convex_hull(std::span<const FrontierPoint> points,
                                             HullSpace space) {
  validate_points(points);
  std::vector<FrontierPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);

  std::vector<IndexedPoint> ipts;
  ipts.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) ipts.push_back({to_space(sorted[i], space), i});
  auto dedup = dedup_min_y(std::move(ipts));
  if (dedup.size() < 2)
    throw DegenerateInputError("lower hull needs >= 2 points with distinct x");

  std::vector<Eigen::Vector2d> coords;
  coords.reserve(dedup.size());
  for (const auto& ip : dedup) coords.push_back(ip.p);
  std::vector<FrontierPoint> out;
  for (const std::size_t i : lower_chain(coords)) out.push_back(sorted[dedup[i].source]);
  return out;
}

std::vector<FrontierPoint> binning_minimizers(std::span<const FrontierPoint> points,
                                              int bins_per_decade) {
  validate_points(points);
  if (points.empty()) throw PreconditionError("binning_minimizers: points must be non-empty");
  if (bins_per_decade < 1)
    throw PreconditionError("binning_minimizers: bins_per_decade must be >= 1");

  std::vector<FrontierPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);

  const double lo = std::log10(sorted.front().x);
  double hi = lo;
  for (const auto& p : sorted) hi = std::max(hi, std::log10(p.x));
  const double width = 1.0 / static_cast<double>(bins_per_decade);
  const std::int64_t nbins =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((hi - lo) / width)));

  std::map<std::int64_t, std::size_t> best;  // bin -> index of min-loss point
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::int64_t bin = static_cast<std::int64_t>((std::log10(sorted[i].x) - lo) / width);
    bin = std::clamp<std::int64_t>(bin, 0, nbins - 1);
    const auto it = best.find(bin);
    if (it == best.end() || sorted[i].loss < sorted[it->second].loss) best[bin] = i;
  }

  std::vector<FrontierPoint> out;
  out.reserve(best.size());
  for (const auto& [bin, idx] : best) out.push_back(sorted[idx]);
  return out;
}

LineFit fit_frontier_line(std::span<const FrontierPoint> frontier, FrontierQuantity quantity) {
  if (frontier.size() < 2)
    throw DegenerateInputError("line fit needs >= 2 frontier points");
  const auto value = [&](const FrontierPoint& p) {
    switch (quantity) {
      case FrontierQuantity::params: return std::log10(p.params);
      case FrontierQuantity::tokens: return std::log10(static_cast<double>(p.tokens));
      case FrontierQuantity::tokens_per_param:
        return std::log10(static_cast<double>(p.tokens) / p.params);
    }
    return 0.0;
  };

  const auto n = static_cast<double>(frontier.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& p : frontier) {
    mean_x += std::log10(p.x);
    mean_y += value(p);
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : frontier) {
    const double dx = std::log10(p.x) - mean_x;
    sxx += dx * dx;
    sxy += dx * (value(p) - mean_y);
  }
  if (sxx == 0.0) throw DegenerateInputError("line fit: all x values are equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

std::vector<FrontierPoint> make_frontier_points(std::span<const RunRecord> runs,
                                                const Approach1Options& options) {
  std::vector<FrontierPoint> points;
  points.reserve(runs.size());

  std::map<ModelShape, std::pair<double, double>> cache;  // shape -> (flops/token, params)
  const auto shape_info = [&](const ModelShape& s) {
    auto it = cache.find(s);
    if (it == cache.end()) {
      const auto pc = count_params(s, options.arch);
      const double n = static_cast<double>(options.include_embeddings ? pc.with_embeddings
                                                                      : pc.without_embeddings);
      it = cache.emplace(s, std::make_pair(flops_per_token(s, options.arch).total, n)).first;
    }
    return it->second;
  };

  GpuHoursResult gpu;
  if (options.axis == BudgetAxis::gpu_hours) {
    gpu = gpu_hours(runs, options.gpu);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!gpu.hours[i].has_value())
        throw PreconditionError("axis gpu_hours: run " + runs[i].run_id +
                                " lacks step time or GPU count");
    }
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunRecord& r = runs[i];
    const auto [fpt, params] = shape_info(r.shape);
    FrontierPoint p;
    p.run_id = r.run_id;
    p.tokens = r.tokens;
    p.loss = r.val_loss;
    p.params = params;
    p.shape = r.shape;
    p.x = options.axis == BudgetAxis::flops ? fpt * static_cast<double>(r.tokens)
                                            : *gpu.hours[i];
    points.push_back(std::move(p));
  }
  return points;
}

HullFit approach1_fit(std::span<const RunRecord> runs, const Approach1Options& options) {
  if (runs.empty()) throw PreconditionError("approach1_fit: runs must be non-empty");
  const auto points = make_frontier_points(runs, options);

  HullFit fit;
  fit.axis = options.axis;
  fit.method = options.frontier;
  try {
    fit.vertices = options.frontier == FrontierMethod::hull
                       ? lower_convex_hull(points, options.hull_space)
                       : binning_minimizers(points, options.bins_per_decade);
    fit.line_params = fit_frontier_line(fit.vertices, FrontierQuantity::params);
    fit.line_tokens = fit_frontier_line(fit.vertices, FrontierQuantity::tokens);
  } catch (const DegenerateInputError& e) {
    const char* axis = options.axis == BudgetAxis::flops ? "flops" : "gpu_hours";
    throw DegenerateInputError(std::string("axis ") + axis + ": " + e.what());
  }
  // Identity in log space: fitting log(tokens/params) equals the difference
  // of the two fits, so compute it that way and keep the identity exact.
  fit.line_tokens_per_param.slope = fit.line_tokens.slope - fit.line_params.slope;
  fit.line_tokens_per_param.intercept = fit.line_tokens.intercept - fit.line_params.intercept;
  return fit;
}

}  // namespace gemlaw
