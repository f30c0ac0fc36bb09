#include "gemlaw/bench_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "gemlaw/errors.hpp"
#include "gemlaw/lbfgs.hpp"
#include "gemlaw/parallel.hpp"

namespace gemlaw {

namespace {

// Numerically stable logistic.
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

std::vector<LossSample> canonical_samples(std::span<const LossSample> samples,
                                          std::size_t min_count, const char* what) {
  std::vector<LossSample> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end(), [](const LossSample& a, const LossSample& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.value < b.value;
  });
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i == 0 || s[i].loss != s[i - 1].loss) ++distinct;
  if (s.size() < min_count || distinct < min_count)
    throw PreconditionError(std::string(what) + ": needs >= " + std::to_string(min_count) +
                            " samples with distinct losses");
  for (const LossSample& x : s)
    if (!std::isfinite(x.loss) || !std::isfinite(x.value))
      throw PreconditionError(std::string(what) + ": samples must be finite");
  return s;
}

// Multi-start local minimization; winner by (objective, start index).
template <typename FG>
std::pair<Eigen::VectorXd, double> best_start(const std::vector<Eigen::VectorXd>& inits,
                                              FG&& fg) {
  LbfgsOptions opt;
  opt.max_iterations = 2000;
  opt.grad_tolerance = 1e-12;
  std::vector<double> values(inits.size(), std::numeric_limits<double>::infinity());
  std::vector<Eigen::VectorXd> points(inits.size());
  parallel_for(inits.size(), [&](std::size_t i) {
    LbfgsResult r = lbfgs_minimize(fg, inits[i], opt);
    if (std::isfinite(r.value) && r.x.allFinite()) {
      values[i] = r.value;
      points[i] = std::move(r.x);
    }
  });
  int best = -1;
  for (std::size_t i = 0; i < inits.size(); ++i)
    if (std::isfinite(values[i]) &&
        (best < 0 || values[i] < values[static_cast<std::size_t>(best)]))
      best = static_cast<int>(i);
  if (best < 0) throw FitFailureError("benchmark law fit: every start failed");
  const auto bi = static_cast<std::size_t>(best);
  return {points[bi], values[bi]};
}

std::vector<double> loss_quantiles(const std::vector<LossSample>& s) {
  std::vector<double> qs;
  for (const double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double pos = q * static_cast<double>(s.size() - 1);
    qs.push_back(s[static_cast<std::size_t>(std::llround(pos))].loss);
  }
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

}  // namespace

double predict_err(const ErrLaw& law, double loss) {
  return law.eps_b - law.k * std::exp(-law.gamma * loss);
}

ErrLaw fit_err_law(std::span<const LossSample> samples) {
  const auto s = canonical_samples(samples, 4, "fit_err_law");
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  Eigen::ArrayXd L(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    L[i] = s[static_cast<std::size_t>(i)].loss;
    y[i] = s[static_cast<std::size_t>(i)].value;
  }
  double mean_y = y.mean();

  // theta = (eps_b, ln k, ln gamma)
  const auto fg = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const double eps_b = theta[0];
    const double k = std::exp(theta[1]);
    const double gamma = std::exp(theta[2]);
    const Eigen::ArrayXd decay = (-gamma * L).exp();
    const Eigen::ArrayXd r = eps_b - k * decay - y;
    grad.resize(3);
    grad[0] = 2.0 * r.sum();
    grad[1] = 2.0 * (r * (-k * decay)).sum();
    grad[2] = 2.0 * (r * (k * gamma * L * decay)).sum();
    return (r * r).sum();
  };

  std::vector<Eigen::VectorXd> inits;
  for (const double eps_b : {0.25, 0.5, 0.75, mean_y}) {
    for (const double gamma : {0.5, 1.0, 2.0, 4.0}) {
      // Closed-form least-squares k given (eps_b, gamma).
      const Eigen::ArrayXd decay = (-gamma * L).exp();
      const double denom = (decay * decay).sum();
      double k = denom > 0 ? ((eps_b - y) * decay).sum() / denom : 1.0;
      if (!(k > 0) || !std::isfinite(k)) k = 1e-8;
      Eigen::VectorXd t(3);
      t << eps_b, std::log(k), std::log(gamma);
      inits.push_back(t);
    }
  }
  {
    // Constant-predictor start: guarantees the fit never ends up worse
    // than the best constant.
    Eigen::VectorXd t(3);
    t << mean_y, std::log(1e-30), 0.0;
    inits.push_back(t);
  }

  const auto [theta, value] = best_start(inits, fg);
  ErrLaw law;
  law.eps_b = theta[0];
  law.k = std::exp(theta[1]);
  law.gamma = std::exp(theta[2]);
  law.objective = value;
  return law;
}

double predict_acc(const AccLaw& law, double loss) {
  return law.a_amp * sigmoid(law.k_rate * (loss - law.l0)) + law.b_floor;
}

AccLaw fit_acc_law(std::span<const LossSample> samples) {
  const auto s = canonical_samples(samples, 5, "fit_acc_law");
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  Eigen::ArrayXd L(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    L[i] = s[static_cast<std::size_t>(i)].loss;
    y[i] = s[static_cast<std::size_t>(i)].value;
  }
  const double mean_y = y.mean();
  const double span = y.maxCoeff() - y.minCoeff();

  // theta = (a_amp, b_floor, ln k, l0)
  const auto fg = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const double a = theta[0];
    const double b = theta[1];
    const double k = std::exp(theta[2]);
    const double l0 = theta[3];
    grad.setZero(4);
    double value = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sig = sigmoid(k * (L[i] - l0));
      const double r = a * sig + b - y[i];
      value += r * r;
      const double dsig = sig * (1.0 - sig);
      grad[0] += 2.0 * r * sig;
      grad[1] += 2.0 * r;
      grad[2] += 2.0 * r * a * dsig * (L[i] - l0) * k;
      grad[3] += 2.0 * r * a * dsig * (-k);
    }
    return value;
  };

  std::vector<Eigen::VectorXd> inits;
  const double amp = span > 0 ? span : 0.1;
  for (const double b : {0.25, 0.5, 0.75}) {
    for (const double k : {0.5, 1.0, 2.0, 4.0}) {
      for (const double l0 : loss_quantiles(s)) {
        for (const double a : {amp, -amp}) {
          Eigen::VectorXd t(4);
          t << a, b, std::log(k), l0;
          inits.push_back(t);
        }
      }
    }
  }
  {
    Eigen::VectorXd t(4);
    t << 0.0, mean_y, 0.0, s[static_cast<std::size_t>(n / 2)].loss;
    inits.push_back(t);
  }

  const auto [theta, value] = best_start(inits, fg);
  AccLaw law;
  law.a_amp = theta[0];
  law.b_floor = theta[1];
  law.k_rate = std::exp(theta[2]);
  law.l0 = theta[3];
  law.objective = value;
  return law;
}

namespace {

std::map<std::pair<std::string, std::int64_t>, std::pair<double, int>> aggregate(
    std::span<const BenchRecord> scores, BenchMetric metric,
    const std::set<std::string>& benchmark_sets) {
  std::map<std::pair<std::string, std::int64_t>, std::pair<double, int>> acc;
  for (const BenchRecord& b : scores) {
    if (b.metric != metric) continue;
    if (!benchmark_sets.empty() && !benchmark_sets.count(b.benchmark_set)) continue;
    auto& slot = acc[{b.run_id, b.tokens}];
    slot.first += b.value;
    slot.second += 1;
  }
  return acc;
}

}  // namespace

std::vector<LossSample> join_runs_to_scores(std::span<const RunRecord> runs,
                                            std::span<const BenchRecord> scores,
                                            BenchMetric metric,
                                            const std::set<std::string>& benchmark_sets) {
  const auto agg = aggregate(scores, metric, benchmark_sets);
  std::vector<LossSample> out;
  for (const RunRecord& r : runs) {
    const auto it = agg.find({r.run_id, r.tokens});
    if (it == agg.end()) continue;
    out.push_back({r.val_loss, it->second.first / it->second.second});
  }
  std::sort(out.begin(), out.end(), [](const LossSample& a, const LossSample& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.value < b.value;
  });
  return out;
}

std::vector<LossSample> join_scores_to_scores(std::span<const BenchRecord> scores,
                                              BenchMetric x_metric, BenchMetric y_metric,
                                              const std::set<std::string>& benchmark_sets) {
  const auto xs = aggregate(scores, x_metric, benchmark_sets);
  const auto ys = aggregate(scores, y_metric, benchmark_sets);
  std::vector<LossSample> out;
  for (const auto& [key, x] : xs) {
    const auto it = ys.find(key);
    if (it == ys.end()) continue;
    out.push_back({x.first / x.second, it->second.first / it->second.second});
  }
  return out;  // map iteration is already (run_id, tokens)-sorted
}

}  // namespace gemlaw
