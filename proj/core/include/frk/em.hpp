#pragma once

#include <string>
#include <vector>

#include "frk/gaussian.hpp"

namespace frk {

// Controls for the iterative maximum-likelihood fit. The free flags select
// which parameters the M-step updates; the rest stay at their initial
// values. When both variances are free, merge_nugget updates their sum as a
// single parameter and splits it by the initial delta/eps ratio, which
// avoids the flat likelihood direction that appears when every location is
// observed once.
struct EmConfig {
  int max_iterations = 200;
  double loglik_rtol = 1e-6;
  double param_tol = 1e-5;

  enum class Init { Auto, Given };
  Init init = Init::Auto;

  bool free_beta = true;
  bool free_k = true;
  bool free_sigma2_eps = true;
  bool free_sigma2_delta = false;
  bool merge_nugget = true;

  // Variance updates that hit zero are clamped to this multiple of var(z).
  double variance_floor_scale = 1e-12;
};

// Conditional moments of the coefficient vector given the data.
struct EStepMoments {
  Eigen::VectorXd mean;  // mu_alpha
  Eigen::MatrixXd cov;   // Sigma_alpha
};

struct FitResult {
  SreParams params;
  std::vector<double> loglik_trace;  // value at init, then after each iteration
  int iterations = 0;
  bool converged = false;
  std::string termination;  // "loglik_tol" | "param_tol" | "max_iterations"
  bool variance_clamped = false;
};

// Exact Gaussian conditional of alpha given Z under the current parameters,
// computed through the same symmetric capacitance factorization as the
// marginal solve so that singular K is handled.
EStepMoments e_step(const SpatialDataset& ds, const BasisSet& basis, const SreParams& params);

// Maximizer of the expected complete-data log likelihood given the E-step
// moments. Closed form for beta, full K, and the variances; the correlation
// parameter of the AR(1) and exponential K forms is found by a bounded 1-D
// search of the profiled objective, keeping the previous value as a
// candidate so the step never decreases it.
SreParams m_step(const SpatialDataset& ds, const BasisSet& basis, const EStepMoments& moments,
                 const SreParams& prev, const EmConfig& config, bool* clamped = nullptr);

// Alternates e_step and m_step until the log likelihood or the parameters
// stop moving. Aborts with a diagnostic if the log likelihood ever drops by
// more than 1e-9, which would indicate a defect rather than a model issue.
FitResult fit_em(const SpatialDataset& ds, const BasisSet& basis, const SreParams& init,
                 const EmConfig& config);

}  // namespace frk
