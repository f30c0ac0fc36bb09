#include "gemlaw/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "gemlaw/errors.hpp"
#include "gemlaw/flops.hpp"
#include "gemlaw/parallel.hpp"

namespace gemlaw {

std::size_t CoeffGrid::size() const {
  return ln_a.size() * ln_b.size() * ln_e.size() * alpha.size() * beta.size();
}

Eigen::VectorXd CoeffGrid::at(std::size_t index) const {
  // Flat index decodes with beta fastest, ln_a slowest.
  const std::size_t nb = beta.size();
  const std::size_t na = alpha.size();
  const std::size_t ne = ln_e.size();
  const std::size_t nB = ln_b.size();
  Eigen::VectorXd theta(5);
  theta[4] = beta[index % nb];
  index /= nb;
  theta[3] = alpha[index % na];
  index /= na;
  theta[2] = ln_e[index % ne];
  index /= ne;
  theta[1] = ln_b[index % nB];
  index /= nB;
  theta[0] = ln_a[index];
  return theta;
}

double predicted_loss(const ParametricLaw& law, double params, double tokens) {
  if (!(params > 0) || !(tokens > 0))
    throw PreconditionError("predicted_loss: params and tokens must be positive");
  return law.A / std::pow(params, law.alpha) + law.B / std::pow(tokens, law.beta) + law.eps;
}

HuberLossObjective::HuberLossObjective(Eigen::ArrayXd ln_params, Eigen::ArrayXd ln_tokens,
                                       Eigen::ArrayXd ln_loss, double delta)
    : ln_params_(std::move(ln_params)),
      ln_tokens_(std::move(ln_tokens)),
      ln_loss_(std::move(ln_loss)),
      delta_(delta) {
  if (!(delta_ > 0)) throw PreconditionError("huber delta must be > 0");
}

double HuberLossObjective::value(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd unused(kDim);
  return value_and_gradient(theta, unused);
}

double HuberLossObjective::value_and_gradient(const Eigen::VectorXd& theta,
                                              Eigen::VectorXd& grad) const {
  const double a = theta[0], b = theta[1], e = theta[2];
  const double alpha = theta[3], beta = theta[4];

  const Eigen::ArrayXd u1 = a - alpha * ln_params_;
  const Eigen::ArrayXd u2 = b - beta * ln_tokens_;
  // Shifted log-sum-exp of (u1, u2, e) per sample.
  const Eigen::ArrayXd m = u1.max(u2).max(e);
  const Eigen::ArrayXd w1 = (u1 - m).exp();
  const Eigen::ArrayXd w2 = (u2 - m).exp();
  const Eigen::ArrayXd w3 = (e - m).exp();
  const Eigen::ArrayXd total = w1 + w2 + w3;
  const Eigen::ArrayXd residual = m + total.log() - ln_loss_;

  double value = 0.0;
  grad.setZero(kDim);
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    const double r = residual[i];
    const double ar = std::abs(r);
    double dpenalty;
    if (ar <= delta_) {
      value += 0.5 * r * r;
      dpenalty = r;
    } else {
      value += delta_ * (ar - 0.5 * delta_);
      dpenalty = r > 0 ? delta_ : -delta_;
    }
    const double s1 = w1[i] / total[i];
    const double s2 = w2[i] / total[i];
    const double s3 = w3[i] / total[i];
    grad[0] += dpenalty * s1;
    grad[1] += dpenalty * s2;
    grad[2] += dpenalty * s3;
    grad[3] -= dpenalty * s1 * ln_params_[i];
    grad[4] -= dpenalty * s2 * ln_tokens_[i];
  }
  return value;
}

HuberLossObjective make_objective(std::span<const RunRecord> runs, const FitConfig& config) {
  struct Obs {
    double ln_p, ln_t, ln_l;
    bool operator<(const Obs& o) const {
      if (ln_p != o.ln_p) return ln_p < o.ln_p;
      if (ln_t != o.ln_t) return ln_t < o.ln_t;
      return ln_l < o.ln_l;
    }
  };
  std::vector<Obs> obs;
  obs.reserve(runs.size());
  std::map<ModelShape, double> params_cache;
  for (const RunRecord& r : runs) {
    auto it = params_cache.find(r.shape);
    if (it == params_cache.end()) {
      const auto pc = count_params(r.shape, config.arch);
      it = params_cache
               .emplace(r.shape, static_cast<double>(config.include_embeddings
                                                         ? pc.with_embeddings
                                                         : pc.without_embeddings))
               .first;
    }
    if (!(r.val_loss > 0)) throw PreconditionError("run " + r.run_id + ": val_loss <= 0");
    obs.push_back({std::log(it->second), std::log(static_cast<double>(r.tokens)),
                   std::log(r.val_loss)});
  }
  // Canonical order: the objective sums floating point terms, so fitting is
  // bitwise invariant to input permutation only if we fix the order here.
  std::sort(obs.begin(), obs.end());

  Eigen::ArrayXd lp(obs.size()), lt(obs.size()), ll(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    lp[static_cast<Eigen::Index>(i)] = obs[i].ln_p;
    lt[static_cast<Eigen::Index>(i)] = obs[i].ln_t;
    ll[static_cast<Eigen::Index>(i)] = obs[i].ln_l;
  }
  return HuberLossObjective(std::move(lp), std::move(lt), std::move(ll), config.huber_delta);
}

namespace {

void check_fit_preconditions(std::span<const RunRecord> runs) {
  if (runs.size() < 5)
    throw PreconditionError("parametric fit needs >= 5 runs, got " +
                            std::to_string(runs.size()));
  std::set<ModelShape> shapes;
  std::set<std::int64_t> tokens;
  for (const RunRecord& r : runs) {
    shapes.insert(r.shape);
    tokens.insert(r.tokens);
  }
  if (shapes.size() < 2) throw PreconditionError("parametric fit needs >= 2 distinct shapes");
  if (tokens.size() < 2)
    throw PreconditionError("parametric fit needs >= 2 distinct token counts");
}

}  // namespace

ParametricFitReport fit_parametric_detailed(std::span<const RunRecord> runs,
                                            const FitConfig& config) {
  check_fit_preconditions(runs);
  if (config.grid.ln_a.empty() || config.grid.ln_b.empty() || config.grid.ln_e.empty() ||
      config.grid.alpha.empty() || config.grid.beta.empty())
    throw PreconditionError("init grid must be non-empty for every coefficient");

  const HuberLossObjective objective = make_objective(runs, config);
  LbfgsOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.grad_tolerance = config.convergence_tol;

  const std::size_t n_starts = config.grid.size();
  std::vector<FitStartResult> starts(n_starts);
  std::vector<Eigen::VectorXd> thetas(n_starts);

  parallel_for(n_starts, [&](std::size_t i) {
    const auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      return objective.value_and_gradient(x, g);
    };
    LbfgsResult r = lbfgs_minimize(fg, config.grid.at(i), opt);
    starts[i] = {static_cast<int>(i), r.value, r.grad_norm, r.iterations, r.status};
    thetas[i] = std::move(r.x);
  });

  ParametricFitReport report;
  report.starts = starts;
  int best = -1;
  for (std::size_t i = 0; i < n_starts; ++i) {
    const auto& s = starts[i];
    const bool usable = std::isfinite(s.objective) && thetas[i].allFinite() &&
                        s.status != LbfgsStatus::non_finite_input;
    if (s.status == LbfgsStatus::converged)
      ++report.starts_converged;
    else if (usable)
      ++report.starts_stalled;
    else
      ++report.starts_failed;
    if (!usable) continue;
    if (best < 0 || s.objective < starts[static_cast<std::size_t>(best)].objective)
      best = static_cast<int>(i);
  }

  if (best < 0) {
    std::ostringstream msg;
    msg << "parametric fit failed: all " << n_starts << " starts diverged;";
    for (std::size_t i = 0; i < std::min<std::size_t>(n_starts, 8); ++i)
      msg << " [init " << i << ": objective=" << starts[i].objective
          << " iters=" << starts[i].iterations << "]";
    throw FitFailureError(msg.str());
  }

  const Eigen::VectorXd& theta = thetas[static_cast<std::size_t>(best)];
  report.law.A = std::exp(theta[0]);
  report.law.B = std::exp(theta[1]);
  report.law.eps = std::exp(theta[2]);
  report.law.alpha = theta[3];
  report.law.beta = theta[4];
  report.law.objective = starts[static_cast<std::size_t>(best)].objective;
  report.law.init_used = best;
  return report;
}

ParametricLaw fit_parametric(std::span<const RunRecord> runs, const FitConfig& config) {
  return fit_parametric_detailed(runs, config).law;
}

double slope(const ParametricLaw& law) { return law.beta / (law.alpha + law.beta); }

Prescription prescribe(const ParametricLaw& law, std::span<const double> compute_grid) {
  if (!(law.alpha > 0) || !(law.beta > 0) || !(law.A > 0) || !(law.B > 0))
    throw PreconditionError("prescribe: law coefficients must be positive");
  Prescription out;
  out.a = law.beta / (law.alpha + law.beta);
  out.b = 1.0 - out.a;  // keeps a + b == 1 exactly
  out.G = std::pow(law.alpha * law.A / (law.beta * law.B), 1.0 / (law.alpha + law.beta));
  out.compute.assign(compute_grid.begin(), compute_grid.end());
  out.n_opt.reserve(out.compute.size());
  out.d_opt.reserve(out.compute.size());
  out.tokens_per_param.reserve(out.compute.size());
  for (const double c : out.compute) {
    if (!(c > 0)) throw PreconditionError("prescribe: compute values must be positive");
    const double n = out.G * std::pow(c / 6.0, out.a);
    const double d = std::pow(c / 6.0, out.b) / out.G;
    out.n_opt.push_back(n);
    out.d_opt.push_back(d);
    out.tokens_per_param.push_back(d / n);
  }
  return out;
}

std::vector<OvertrainingPoint> overtraining_curve(const ParametricLaw& law, double compute,
                                                  std::span<const double> factors) {
  if (!(compute > 0)) throw PreconditionError("overtraining_curve: compute must be > 0");
  const double grid[1] = {compute};
  const Prescription base = prescribe(law, grid);
  const double n_opt = base.n_opt[0];
  const double d_opt = base.d_opt[0];

  std::vector<OvertrainingPoint> out;
  out.reserve(factors.size());
  for (const double f : factors) {
    OvertrainingPoint pt;
    pt.factor = f;
    if (!(f > 0) || !std::isfinite(f)) {
      pt.representable = false;
      out.push_back(pt);
      continue;
    }
    // Inverting N_opt in closed form: holding 6 p T = C with T = f * T_opt(p)
    // gives p = N_opt(C) f^-a and T = D_opt(C) f^a.
    pt.params = n_opt * std::pow(f, -base.a);
    pt.tokens = d_opt * std::pow(f, base.a);
    if (!std::isfinite(pt.params) || !std::isfinite(pt.tokens) || !(pt.params > 0) ||
        !(pt.tokens > 0)) {
      pt.representable = false;
      out.push_back(pt);
      continue;
    }
    pt.loss = predicted_loss(law, pt.params, pt.tokens);
    out.push_back(pt);
  }
  return out;
}

std::vector<OvertrainingPoint> overtraining_curve_exact_flops(
    const ParametricLaw& law, double compute, std::span<const double> factors,
    std::span<const ModelShape> candidates, const ArchConfig& arch) {
  if (!(compute > 0)) throw PreconditionError("overtraining: compute must be > 0");
  if (candidates.empty()) throw PreconditionError("overtraining: no candidate shapes");

  struct Realized {
    double factor, params, tokens, loss;
  };
  std::vector<Realized> realized;
  realized.reserve(candidates.size());
  for (const ModelShape& s : candidates) {
    const double p = static_cast<double>(count_params(s, arch).with_embeddings);
    const double t = compute / flops_per_token(s, arch).total;
    // Realized factor: tokens relative to the compute-optimal tokens for
    // this size under the law's prescription.
    const double a = law.beta / (law.alpha + law.beta);
    const double b = 1.0 - a;
    const double g = std::pow(law.alpha * law.A / (law.beta * law.B),
                              1.0 / (law.alpha + law.beta));
    const double c_p = 6.0 * std::pow(p / g, 1.0 / a);  // budget where p is optimal
    const double t_opt = std::pow(c_p / 6.0, b) / g;
    realized.push_back({t / t_opt, p, t, predicted_loss(law, p, t)});
  }

  std::vector<OvertrainingPoint> out;
  out.reserve(factors.size());
  for (const double f : factors) {
    OvertrainingPoint pt;
    pt.factor = f;
    if (!(f > 0) || !std::isfinite(f)) {
      pt.representable = false;
      out.push_back(pt);
      continue;
    }
    const Realized* best = nullptr;
    double best_d = 0.0;
    for (const Realized& r : realized) {
      if (!(r.factor > 0) || !std::isfinite(r.factor)) continue;
      const double d = std::abs(std::log(r.factor) - std::log(f));
      if (!best || d < best_d) {
        best = &r;
        best_d = d;
      }
    }
    if (!best) {
      pt.representable = false;
      out.push_back(pt);
      continue;
    }
    pt.factor = best->factor;
    pt.params = best->params;
    pt.tokens = best->tokens;
    pt.loss = best->loss;
    out.push_back(pt);
  }
  return out;
}

double are_metric(const ParametricLaw& law, std::span<const RunRecord> holdout,
                  double last_fraction, bool include_embeddings, const ArchConfig& arch) {
  if (holdout.empty()) throw PreconditionError("are_metric: holdout must be non-empty");
  if (!(last_fraction > 0) || last_fraction > 1)
    throw PreconditionError("are_metric: last_fraction must be in (0, 1]");

  std::map<std::string, std::int64_t> max_tokens;
  for (const RunRecord& r : holdout) {
    auto [it, inserted] = max_tokens.emplace(r.run_id, r.tokens);
    if (!inserted) it->second = std::max(it->second, r.tokens);
  }

  std::map<ModelShape, double> params_cache;
  double sum = 0.0;
  std::size_t count = 0;
  for (const RunRecord& r : holdout) {
    const double cutoff =
        (1.0 - last_fraction) * static_cast<double>(max_tokens[r.run_id]);
    if (static_cast<double>(r.tokens) < cutoff) continue;
    auto it = params_cache.find(r.shape);
    if (it == params_cache.end()) {
      const auto pc = count_params(r.shape, arch);
      it = params_cache
               .emplace(r.shape, static_cast<double>(include_embeddings ? pc.with_embeddings
                                                                        : pc.without_embeddings))
               .first;
    }
    const double predicted = predicted_loss(law, it->second, static_cast<double>(r.tokens));
    sum += std::abs(predicted - r.val_loss) / r.val_loss;
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

ParametricLaw chinchilla_replication_law() {
  // Epoch AI's replication of the Hoffmann et al. parametric fit.
  ParametricLaw law;
  law.A = 482.01;
  law.B = 2085.43;
  law.alpha = 0.3478;
  law.beta = 0.3658;
  law.eps = 1.8172;
  law.objective = 0.0;
  law.init_used = -1;
  return law;
}

}  // namespace gemlaw
