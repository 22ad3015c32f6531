#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "frk/covariance.hpp"

namespace frk {

// Full parameter set of the spatial mixed-effects model: fixed effects,
// coefficient covariance, and the two noise variances.
struct SreParams {
  Eigen::VectorXd beta;  // p-vector; empty when the dataset has no covariates
  KModel k_model = KScaledIdentity{1.0};
  NoiseParams noise;
};

// Per-location predictive summary. For Gaussian engines the interval is the
// central one, mean +/- z * sqrt(variance); the trans-Gaussian path fills it
// with empirical quantiles instead.
struct PredictiveResult {
  double mean = 0.0;
  double variance = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Work products of the Woodbury route through C_Z = Phi K Phi^T + C_xi with
// diagonal C_xi. K is factored as L L^T and the r x r capacitance is kept in
// the symmetric form G = I + L^T Phi^T Cxi^{-1} Phi L, whose Cholesky factor
// drives every solve; G is positive definite whenever C_xi is, even for
// singular K. Setup is O(n r^2); each apply is O(n r + r^2).
class FittedSolve {
 public:
  // cxi_diag holds the per-row diagonal of C_xi; all entries must be > 0.
  FittedSolve(Eigen::MatrixXd phi, const Eigen::MatrixXd& k, Eigen::VectorXd cxi_diag);

  int n() const { return static_cast<int>(phi_.rows()); }
  int r() const { return static_cast<int>(phi_.cols()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;  // C_Z^{-1} v
  double log_det() const { return logdet_; }              // log |C_Z|
  double quad_form(const Eigen::VectorXd& v) const;       // v^T C_Z^{-1} v

  const Eigen::MatrixXd& phi() const { return phi_; }
  const Eigen::MatrixXd& k() const { return k_; }
  const Eigen::VectorXd& cxi_diag() const { return cxi_; }
  const Eigen::MatrixXd& phit_cxi_phi() const { return m_; }

  // Conditional moments of alpha given residuals e = Z - X beta:
  //   cov(alpha | Z)  = L G^{-1} L^T
  //   mean(alpha | Z) = cov * Phi^T Cxi^{-1} e
  Eigen::MatrixXd posterior_cov() const;

  // Diagonal jitter added to K before factorization (0 when none was needed).
  double jitter() const { return jitter_; }

 private:
  Eigen::MatrixXd phi_;
  Eigen::MatrixXd k_;
  Eigen::VectorXd cxi_;   // diagonal of C_xi
  Eigen::VectorXd cxi_inv_;
  Eigen::MatrixXd l_;     // K (+ jitter) = L L^T
  Eigen::MatrixXd m_;     // Phi^T Cxi^{-1} Phi
  Eigen::LLT<Eigen::MatrixXd> g_llt_;
  double logdet_ = 0.0;
  double jitter_ = 0.0;
};

// Solve cache for one (dataset, basis, params) triple, with the residual
// products needed by likelihood evaluation and prediction.
struct SreSolve {
  FittedSolve solve;
  Eigen::VectorXd resid;       // Z - X beta
  Eigen::VectorXd phit_cxi_z;  // Phi^T Cxi^{-1} Z
  Eigen::MatrixXd phit_cxi_x;  // Phi^T Cxi^{-1} X
};

SreSolve build_sre_solve(const SpatialDataset& ds, const BasisSet& basis, const SreParams& params);

Eigen::VectorXd smw_apply(const FittedSolve& solve, const Eigen::VectorXd& v);

// Log density of Z under Gau(X beta, C_Z), with log|C_Z| taken from the
// determinant-lemma companion of the Woodbury identity.
double log_likelihood(const SpatialDataset& ds, const BasisSet& basis, const SreParams& params);

// Predictive mean/variance/interval of the hidden process at each target.
// Fine-scale covariance between a target and the data is sigma2_delta on
// exact coordinate matches and zero otherwise. x_targets must provide one
// covariate row per target when the model has p > 0.
std::vector<PredictiveResult> predict(const SpatialDataset& ds, const BasisSet& basis,
                                      const SreParams& params,
                                      const std::vector<Location>& targets, double level,
                                      const std::optional<Eigen::MatrixXd>& x_targets = std::nullopt,
                                      bool observable = false);

// Dense simple kriging of a zero-mean residual process under a Matern
// covariance, the classical O(n^3) baseline. Guarded by max_n.
std::vector<PredictiveResult> kriging_baseline(const SpatialDataset& ds, const MaternParams& p,
                                               double sigma2_eps,
                                               const std::vector<Location>& targets, double level,
                                               int max_n = 20000, bool observable = false);

// Maximum-likelihood fit of (sigma2, range, sigma2_eps) for the baseline at
// fixed smoothness, by coordinate descent on the dense Gaussian likelihood.
struct MaternMlFit {
  MaternParams params;
  double sigma2_eps = 0.0;
  double loglik = 0.0;
};
MaternMlFit fit_matern_ml(const SpatialDataset& ds, double smoothness, int max_n = 20000);

// Draws one realization of the model at the given locations: coefficients,
// fine-scale term, and measurement error, in that order, so runs are
// reproducible from the seed. y holds the hidden process values.
struct SreSimulation {
  SpatialDataset data;
  Eigen::VectorXd y;
  Eigen::VectorXd alpha;
};
SreSimulation simulate_sre(const std::vector<Location>& locations,
                           const std::optional<Eigen::MatrixXd>& x, const BasisSet& basis,
                           const SreParams& params, std::uint64_t seed);

}  // namespace frk
