#include "frk/trans_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frk/math_util.hpp"

namespace frk {

double bc_forward(double y, double lambda) {
  if (lambda <= 0.0 && !(y > 0.0)) {
    throw ConfigError("box-cox: input must be positive when lambda <= 0");
  }
  if (lambda == 0.0) return std::log(y);
  if (y < 0.0) throw ConfigError("box-cox: negative input");
  return (std::pow(y, lambda) - 1.0) / lambda;
}

double bc_inverse(double w, double lambda) {
  if (lambda == 0.0) return std::exp(w);
  const double base = lambda * w + 1.0;
  if (!(base > 0.0)) {
    throw ConfigError("box-cox: inverse undefined (lambda * w + 1 <= 0)");
  }
  return std::pow(base, 1.0 / lambda);
}

namespace {

double empirical_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

}  // namespace

std::vector<TransPredictiveResult> predict_trans(
    const SpatialDataset& ds, const BasisSet& basis, const SreParams& params, double lambda,
    const std::vector<Location>& targets, double level, const McConfig& mc,
    const std::optional<Eigen::MatrixXd>& x_targets, bool observable) {
  if (mc.samples < 100) throw ConfigError("monte carlo: need at least 100 samples");

  const std::vector<PredictiveResult> gauss =
      predict(ds, basis, params, targets, level, x_targets, observable);

  std::vector<TransPredictiveResult> out;
  out.reserve(targets.size());
  const double alpha = 1.0 - level;
  const int m = mc.samples;

  for (size_t i = 0; i < gauss.size(); ++i) {
    const double mu = gauss[i].mean;
    const double sd = std::sqrt(gauss[i].variance);
    TransPredictiveResult tr;
    tr.samples.resize(m);

    if (sd == 0.0) {
      // Degenerate predictive: every draw maps to the same point.
      std::fill(tr.samples.begin(), tr.samples.end(), bc_inverse(mu, lambda));
    } else {
      std::mt19937_64 rng(sub_seed(mc.seed, i));
      std::normal_distribution<double> gau(mu, sd);
      long invalid = 0;
      const long budget = 100L * m;
      long drawn = 0;
      for (int k = 0; k < m; ++k) {
        double y;
        while (true) {
          if (++drawn > budget) {
            throw NumericError("trans predict: could not draw valid samples at target " +
                               std::to_string(i));
          }
          const double w = gau(rng);
          if (lambda == 0.0 || lambda * w + 1.0 > 0.0) {
            y = bc_inverse(w, lambda);
            break;
          }
          ++invalid;
        }
        tr.samples[k] = y;
      }
      const double frac = static_cast<double>(invalid) / static_cast<double>(m);
      if (frac > 0.01) {
        throw NumericError("trans predict: " + std::to_string(100.0 * frac) +
                           "% of draws fell outside the inverse domain at target " +
                           std::to_string(i) + "; check lambda");
      }
    }

    std::sort(tr.samples.begin(), tr.samples.end());
    double mean = 0.0;
    for (double v : tr.samples) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : tr.samples) var += (v - mean) * (v - mean);
    var /= std::max(1, m - 1);

    tr.result.mean = mean;
    tr.result.variance = var;
    tr.result.lower = empirical_quantile(tr.samples, 0.5 * alpha);
    tr.result.upper = empirical_quantile(tr.samples, 1.0 - 0.5 * alpha);
    tr.mc_se = std::sqrt(var / m);
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace frk
