#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gemlaw/lbfgs.hpp"
#include "gemlaw/records.hpp"

namespace gemlaw {

/// Coefficients of the additive power-law loss surface
/// L(p, T) = A / p^alpha + B / T^beta + eps.
struct ParametricLaw {
  double A = 0.0;
  double B = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double eps = 0.0;       // irreducible loss
  double objective = 0.0;  // final Huber objective of the winning start
  int init_used = -1;      // index into the initialization grid
};

/// Per-coefficient initialization values. The optimizer works on
/// theta = (ln A, ln B, ln eps, alpha, beta); ln_* lists are already in
/// log space. The full grid is the Cartesian product.
struct CoeffGrid {
  std::vector<double> ln_a{0, 5, 10, 15, 20};
  std::vector<double> ln_b{0, 5, 10, 15, 20};
  std::vector<double> ln_e{-1, 0, 1};
  std::vector<double> alpha{0.1, 0.3, 0.5, 0.7, 1.0};
  std::vector<double> beta{0.1, 0.3, 0.5, 0.7, 1.0};

  std::size_t size() const;
  Eigen::VectorXd at(std::size_t index) const;  // decode flat index to theta
};

struct FitConfig {
  double huber_delta = 1e-4;
  CoeffGrid grid{};
  int max_iterations = 2000;
  double convergence_tol = 1e-9;  // gradient infinity-norm
  bool include_embeddings = true;
  ArchConfig arch{};
};

/// Huber penalty: quadratic within delta of zero, linear outside.
inline double huber(double r, double delta) {
  const double a = r < 0 ? -r : r;
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

double predicted_loss(const ParametricLaw& law, double params, double tokens);

/// The fitting objective: sum of Huber penalties between observed log loss
/// and the log-sum-exp prediction
///   ln L_hat = LSE(lnA - alpha ln p, lnB - beta ln T, ln eps)
/// over theta = (ln A, ln B, ln eps, alpha, beta). Exposed so tests can
/// check the analytic gradient against finite differences.
class HuberLossObjective {
 public:
  static constexpr int kDim = 5;

  HuberLossObjective(Eigen::ArrayXd ln_params, Eigen::ArrayXd ln_tokens,
                     Eigen::ArrayXd ln_loss, double delta);

  double value(const Eigen::VectorXd& theta) const;
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;

  Eigen::Index sample_count() const { return ln_params_.size(); }

 private:
  Eigen::ArrayXd ln_params_, ln_tokens_, ln_loss_;
  double delta_;
};

/// Builds the objective from run records (observations sorted canonically
/// so the fit is invariant to input order).
HuberLossObjective make_objective(std::span<const RunRecord> runs, const FitConfig& config);

struct FitStartResult {
  int init_index = -1;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::non_finite_input;
};

struct ParametricFitReport {
  ParametricLaw law;
  int starts_converged = 0;
  int starts_stalled = 0;  // finite result without meeting the gradient tolerance
  int starts_failed = 0;
  std::vector<FitStartResult> starts;
};

/// Multi-start quasi-Newton fit. Starts run independently (in parallel) and
/// the minimum objective wins, ties broken by lower init index. Throws
/// PreconditionError on insufficient data and FitFailureError if every
/// start fails.
ParametricFitReport fit_parametric_detailed(std::span<const RunRecord> runs,
                                            const FitConfig& config);
ParametricLaw fit_parametric(std::span<const RunRecord> runs, const FitConfig& config);

/// Exponent of the compute-optimal parameter prescription: beta/(alpha+beta).
double slope(const ParametricLaw& law);

/// Compute-optimal prescriptions: N_opt(C) = G (C/6)^a, D_opt(C) = (C/6)^b / G,
/// with G = (alpha A / (beta B))^(1/(alpha+beta)), a = beta/(alpha+beta) and
/// b = 1 - a (exactly).
struct Prescription {
  double G = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> compute;
  std::vector<double> n_opt;
  std::vector<double> d_opt;
  std::vector<double> tokens_per_param;
};

Prescription prescribe(const ParametricLaw& law, std::span<const double> compute_grid);

/// One point of an overtraining sweep at a fixed budget C: tokens are
/// factor x the compute-optimal amount for the chosen size, with 6 p T = C.
struct OvertrainingPoint {
  double factor = 0.0;
  double params = 0.0;
  double tokens = 0.0;
  double loss = 0.0;
  bool representable = true;
};

std::vector<OvertrainingPoint> overtraining_curve(const ParametricLaw& law, double compute,
                                                  std::span<const double> factors);

/// Exact-FLOP variant: restricted to concrete shapes, tokens set by the
/// exact per-token FLOP count, and each requested factor mapped to the
/// shape whose realized factor is nearest in log space. No optimality
/// claim; exposed for comparison with the 6pT reading.
std::vector<OvertrainingPoint> overtraining_curve_exact_flops(
    const ParametricLaw& law, double compute, std::span<const double> factors,
    std::span<const ModelShape> candidates, const ArchConfig& arch);

/// Mean absolute relative error between predicted and observed loss over
/// each run's last `last_fraction` of training tokens.
double are_metric(const ParametricLaw& law, std::span<const RunRecord> holdout,
                  double last_fraction = 0.3, bool include_embeddings = true,
                  const ArchConfig& arch = {});

/// Published replication coefficients for the Hoffmann et al. law, used as
/// a reference overlay and for slope cross-checks.
ParametricLaw chinchilla_replication_law();

}  // namespace gemlaw
