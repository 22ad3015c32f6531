#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "frk/gaussian.hpp"

namespace frk {

// Dynamic spatio-temporal model: spatial basis coefficients evolving under
// a first-order Markov rule alpha_t = M alpha_{t-1} + omega_t, observed
// through the per-slice design matrix with noise variance
// sigma2_delta + sigma2_eps. The initial state alpha_1 ~ Gau(m0, P0) is an
// explicit model input.
struct DynamicStModel {
  BasisSet spatial_basis;
  Eigen::MatrixXd propagator;      // M, r x r
  Eigen::MatrixXd innovation_cov;  // C_omega, r x r PSD
  Eigen::VectorXd initial_mean;    // m0
  Eigen::MatrixXd initial_cov;     // P0, PSD
  NoiseParams noise;
  Eigen::VectorXd beta;            // optional; slices must carry covariates when nonempty

  int r() const { return spatial_basis.r(); }
  void validate() const;
};

// Filtered or smoothed state moments per time slice.
struct StateTrajectory {
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;

  int T() const { return static_cast<int>(mean.size()); }
};

struct StSimulation {
  StDataset data;
  std::vector<Eigen::VectorXd> states;  // true alpha_t
  std::vector<Eigen::VectorXd> y;       // true process values per slice
};

// Draws states and observations; delta and eps are drawn separately so the
// true process values can be reported. Deterministic given the seed.
StSimulation simulate_dynamic(const DynamicStModel& model,
                              const std::vector<std::vector<Location>>& locations,
                              std::uint64_t seed,
                              const std::vector<Eigen::MatrixXd>& covariates = {});

// Forward recursion with the Joseph-form covariance update; an empty slice
// degenerates to a pure prediction step.
StateTrajectory kalman_filter(const DynamicStModel& model, const StDataset& data);

// Backward pass conditioning every state on all the data; uses a
// pseudo-inverse of the predicted covariance so degenerate innovations
// (C_omega = 0) are handled.
StateTrajectory kalman_smoother(const DynamicStModel& model, const StDataset& data);

// Space-time prediction target: slice index t (1-based); t > T requests a
// forecast obtained by propagating the last state through M and C_omega.
struct StTarget {
  Location s;
  int t = 1;
};

std::vector<PredictiveResult> predict_st(const DynamicStModel& model,
                                         const StateTrajectory& trajectory,
                                         const std::vector<StTarget>& targets, double level,
                                         const std::optional<Eigen::MatrixXd>& x_targets = std::nullopt);

struct TransientGrowthDiag {
  bool is_normal = false;
  double max_amplification = 0.0;  // largest singular value squared
};

// Non-normality of the propagator and the worst-case one-step energy
// amplification it allows.
TransientGrowthDiag transient_growth_diag(const Eigen::MatrixXd& m);

// Descriptive route: flattens the slices into one dataset over the (s, t)
// product domain and delegates to the spatial engine with the given
// space-time basis. Targets carry the raw time coordinate. Zero-mean unless
// beta and slice covariates are provided.
std::vector<PredictiveResult> descriptive_st_predict(
    const BasisSet& st_basis, const KModel& k_model, const NoiseParams& noise,
    const StDataset& data, const std::vector<std::pair<Location, double>>& targets, double level,
    const Eigen::VectorXd& beta = {}, const std::optional<Eigen::MatrixXd>& x_targets = std::nullopt);

}  // namespace frk
