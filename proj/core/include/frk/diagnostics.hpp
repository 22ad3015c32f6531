#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frk/errors.hpp"

namespace frk {

// Validation summary row: the five scores plus wall time.
struct Diagnostics {
  double rmspe = 0.0;
  double cov90 = 0.0;
  double is90 = 0.0;
  double crps = 0.0;
  double run_time_s = 0.0;
};

// sqrt(mean((pred - truth)^2))
double rmspe(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

// Empirical coverage of [l, u] plus the mean interval score at level
// 1 - alpha:
//   (u - l) + (2/alpha) (l - z) 1{z < l} + (2/alpha) (z - u) 1{z > u}.
std::pair<double, double> coverage_and_interval_score(const Eigen::VectorXd& lower,
                                                      const Eigen::VectorXd& upper,
                                                      const Eigen::VectorXd& truth,
                                                      double alpha = 0.1);

// Closed form for a Gaussian predictive distribution,
//   sigma * [ w (2 Phi(w) - 1) + 2 phi(w) - 1/sqrt(pi) ],  w = (z - mu)/sigma,
// degenerating to |z - mu| at sigma = 0.
double crps_gaussian(double mu, double sigma, double z);

// Sample estimator mean|x_i - z| - mean|x_i - x_j|/2 from predictive draws;
// used for Monte Carlo (trans-Gaussian) outputs.
double crps_empirical(const std::vector<double>& samples, double z);

}  // namespace frk
