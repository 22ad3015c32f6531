#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frk/gaussian.hpp"

namespace frk {

// Monte Carlo settings for the back-transform. Per-target sub-seeds are
// derived from (seed, target index), so results are deterministic given the
// seed and independent of batch order.
struct McConfig {
  int samples = 2000;  // >= 100
  std::uint64_t seed = 0;
};

// (y^lambda - 1) / lambda, or log y at lambda = 0. Inputs must be positive
// when lambda <= 0; the caller is expected to have standardized y to a
// unitless scale.
double bc_forward(double y, double lambda);

// (lambda w + 1)^(1/lambda), or exp(w) at lambda = 0. Requires
// lambda * w + 1 > 0 when lambda != 0.
double bc_inverse(double w, double lambda);

struct TransPredictiveResult {
  PredictiveResult result;       // mean/variance on the original scale,
                                 // interval from empirical quantiles
  double mc_se = 0.0;            // Monte Carlo standard error of the mean
  std::vector<double> samples;   // back-transformed draws (sorted)
};

// Gaussian prediction on the transformed scale followed by a Monte Carlo
// back-transform through bc_inverse. Draws that fall outside the inverse
// domain are redrawn; if more than 1% of the nominal draws at any target
// are invalid the call fails, since that signals a mis-specified lambda.
std::vector<TransPredictiveResult> predict_trans(
    const SpatialDataset& ds, const BasisSet& basis, const SreParams& params, double lambda,
    const std::vector<Location>& targets, double level, const McConfig& mc,
    const std::optional<Eigen::MatrixXd>& x_targets = std::nullopt, bool observable = false);

}  // namespace frk
