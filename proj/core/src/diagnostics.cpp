#include "frk/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "frk/math_util.hpp"

namespace frk {

double rmspe(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size() || pred.size() < 1) {
    throw ConfigError("rmspe: vectors must have equal nonzero length");
  }
  return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
}

std::pair<double, double> coverage_and_interval_score(const Eigen::VectorXd& lower,
                                                      const Eigen::VectorXd& upper,
                                                      const Eigen::VectorXd& truth,
                                                      double alpha) {
  const long n = truth.size();
  if (lower.size() != n || upper.size() != n || n < 1) {
    throw ConfigError("interval score: vectors must have equal nonzero length");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("interval score: alpha must be in (0,1)");

  long covered = 0;
  double score = 0.0;
  for (long i = 0; i < n; ++i) {
    const double l = lower[i], u = upper[i], z = truth[i];
    if (l > u) throw ConfigError("interval score: lower > upper at row " + std::to_string(i));
    if (z >= l && z <= u) ++covered;
    double s = u - l;
    if (z < l) s += (2.0 / alpha) * (l - z);
    if (z > u) s += (2.0 / alpha) * (z - u);
    score += s;
  }
  return {static_cast<double>(covered) / n, score / n};
}

double crps_gaussian(double mu, double sigma, double z) {
  if (sigma < 0.0) throw ConfigError("crps: sigma must be nonnegative");
  if (sigma == 0.0) return std::abs(z - mu);
  const double w = (z - mu) / sigma;
  return sigma * (w * (2.0 * normal_cdf(w) - 1.0) + 2.0 * normal_pdf(w) -
                  1.0 / std::sqrt(M_PI));
}

double crps_empirical(const std::vector<double>& samples, double z) {
  if (samples.empty()) throw ConfigError("crps: no samples");
  const auto m = static_cast<double>(samples.size());
  std::vector<double> x = samples;
  std::sort(x.begin(), x.end());

  double mad = 0.0;
  for (double v : x) mad += std::abs(v - z);
  mad /= m;

  // sum_{i<j} (x_j - x_i) over the sorted sample in one pass
  double spread = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    spread += (2.0 * static_cast<double>(k) - m + 1.0) * x[k];
  }
  return mad - spread / (m * m);
}

}  // namespace frk
