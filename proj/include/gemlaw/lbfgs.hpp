#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace gemlaw {

struct LbfgsOptions {
  int max_iterations = 2000;
  double grad_tolerance = 1e-9;  // infinity norm
  int history = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 60;
};

enum class LbfgsStatus { converged, max_iterations, line_search_failed, non_finite_input };

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  double grad_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::non_finite_input;
};

namespace detail {

// Strong-Wolfe line search (bracket + bisection zoom). fg evaluates value
// and gradient at x + alpha*d. Returns the accepted step, or 0 on failure;
// on success x/f/g hold the accepted point.
template <typename FG>
double wolfe_line_search(FG&& fg, const Eigen::VectorXd& x0, double f0,
                         const Eigen::VectorXd& g0, const Eigen::VectorXd& d,
                         double alpha_init, const LbfgsOptions& opt, Eigen::VectorXd& x,
                         double& f, Eigen::VectorXd& g) {
  const double dphi0 = g0.dot(d);
  if (!(dphi0 < 0)) return 0.0;  // not a descent direction

  const auto eval = [&](double alpha) {
    x = x0 + alpha * d;
    f = fg(x, g);
    if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
    return g.dot(d);
  };

  const auto zoom = [&](double lo, double f_lo, double hi) -> double {
    for (int i = 0; i < opt.max_line_search; ++i) {
      const double alpha = 0.5 * (lo + hi);
      const double dphi = eval(alpha);
      if (f > f0 + opt.wolfe_c1 * alpha * dphi0 || f >= f_lo) {
        hi = alpha;
      } else {
        if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) return alpha;
        if (dphi * (hi - lo) >= 0) hi = lo;
        lo = alpha;
        f_lo = f;
      }
      if (std::abs(hi - lo) < 1e-16 * (1.0 + std::abs(lo))) break;
    }
    // Fall back to the best sufficient-decrease point if curvature was
    // never satisfied.
    const double dphi = eval(lo);
    (void)dphi;
    if (std::isfinite(f) && f < f0) return lo;
    return 0.0;
  };

  double alpha_prev = 0.0;
  double f_prev = f0;
  double alpha = alpha_init;
  for (int i = 0; i < opt.max_line_search; ++i) {
    const double dphi = eval(alpha);
    if (f > f0 + opt.wolfe_c1 * alpha * dphi0 || (i > 0 && f >= f_prev))
      return zoom(alpha_prev, f_prev, alpha);
    if (std::abs(dphi) <= -opt.wolfe_c2 * dphi0) return alpha;
    if (dphi >= 0) return zoom(alpha, f, alpha_prev);
    alpha_prev = alpha;
    f_prev = f;
    alpha *= 2.0;
  }
  return 0.0;
}

}  // namespace detail

/// Limited-memory BFGS with a strong-Wolfe line search. `fg(x, grad)`
/// returns the objective value and fills the gradient.
template <typename FG>
LbfgsResult lbfgs_minimize(FG&& fg, Eigen::VectorXd x0, const LbfgsOptions& opt = {}) {
  const auto n = x0.size();
  LbfgsResult res;
  Eigen::VectorXd g(n);
  double f = fg(x0, g);
  if (!std::isfinite(f) || !g.allFinite()) {
    res.x = std::move(x0);
    res.status = LbfgsStatus::non_finite_input;
    return res;
  }

  Eigen::VectorXd x = std::move(x0);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (s, y)
  std::deque<double> rho;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= opt.grad_tolerance) {
      res = {std::move(x), f, gnorm, iter, LbfgsStatus::converged};
      return res;
    }

    // Two-loop recursion for d = -H*g.
    Eigen::VectorXd q = g;
    Eigen::VectorXd alpha_hist(static_cast<Eigen::Index>(pairs.size()));
    for (Eigen::Index i = static_cast<Eigen::Index>(pairs.size()) - 1; i >= 0; --i) {
      const auto& [s, y] = pairs[static_cast<std::size_t>(i)];
      const double a = rho[static_cast<std::size_t>(i)] * s.dot(q);
      alpha_hist[i] = a;
      q -= a * y;
    }
    if (!pairs.empty()) {
      const auto& [s, y] = pairs.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [s, y] = pairs[i];
      const double b = rho[i] * y.dot(q);
      q += (alpha_hist[static_cast<Eigen::Index>(i)] - b) * s;
    }
    Eigen::VectorXd d = -q;
    if (!(g.dot(d) < 0)) {  // safeguard: fall back to steepest descent
      d = -g;
      pairs.clear();
      rho.clear();
    }

    const double alpha_init =
        pairs.empty() ? std::min(1.0, 1.0 / (1.0 + g.template lpNorm<1>())) : 1.0;
    Eigen::VectorXd x_new(n), g_new(n);
    double f_new = f;
    const double step = detail::wolfe_line_search(fg, x, f, g, d, alpha_init, opt, x_new,
                                                  f_new, g_new);
    if (step == 0.0) {
      res = {std::move(x), f, gnorm, iter, LbfgsStatus::line_search_failed};
      return res;
    }

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      pairs.emplace_back(std::move(s), std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(pairs.size()) > opt.history) {
        pairs.pop_front();
        rho.pop_front();
      }
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
  }
  res = {std::move(x), f, g.lpNorm<Eigen::Infinity>(), opt.max_iterations,
         LbfgsStatus::max_iterations};
  return res;
}

}  // namespace gemlaw
