// Internal helpers shared by the univariate and bivariate prediction paths.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "frk/gaussian.hpp"

namespace frk::detail {

// Exact-coordinate lookup from target locations into dataset rows; this is
// the identity under which a target shares the fine-scale term with data.
class ExactMatchIndex {
 public:
  explicit ExactMatchIndex(const std::vector<Location>& pts, int row_offset = 0) {
    for (size_t i = 0; i < pts.size(); ++i) {
      std::vector<double> key(pts[i].coords.data(), pts[i].coords.data() + pts[i].coords.size());
      map_[key].push_back(row_offset + static_cast<int>(i));
    }
  }

  const std::vector<int>* find(const Location& s) const {
    std::vector<double> key(s.coords.data(), s.coords.data() + s.coords.size());
    auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::vector<double>, std::vector<int>> map_;
};

struct PredictWork {
  Eigen::VectorXd w;            // C_Z^{-1} (Z - X beta)
  Eigen::VectorXd pw;           // Phi^T w
  Eigen::MatrixXd sigma_alpha;  // cov(alpha | Z)
};

inline PredictWork make_predict_work(const FittedSolve& solve, const Eigen::VectorXd& resid) {
  PredictWork work;
  work.w = solve.apply(resid);
  work.pw = solve.phi().transpose() * work.w;
  work.sigma_alpha = solve.posterior_cov();
  return work;
}

// Conditions one target on the data through the cached r x r pieces, O(r^2)
// per call. phi0 is the target's basis vector in the solve's coefficient
// coordinates; prior_var = c(s0); delta_cov is shared with each row in
// match_rows (rows whose coordinates equal the target exactly, so their Phi
// rows equal phi0). extra_var is added after conditioning (sigma2_eps when
// predicting the observable).
inline PredictiveResult predict_one(const FittedSolve& solve, const PredictWork& work,
                                    const Eigen::VectorXd& phi0, double prior_var,
                                    double mean_offset, const std::vector<int>* match_rows,
                                    double delta_cov, double extra_var, double zq) {
  const Eigen::VectorXd a = solve.k() * phi0;

  double w_sum = 0.0, inv_sum = 0.0;
  if (match_rows && delta_cov != 0.0) {
    for (int m : *match_rows) {
      w_sum += work.w[m];
      inv_sum += 1.0 / solve.cxi_diag()[m];
    }
  }

  const double mean = mean_offset + a.dot(work.pw) + delta_cov * w_sum;

  const Eigen::VectorXd ma = solve.phit_cxi_phi() * a;
  Eigen::VectorXd t = ma;
  double c0_d_c0 = a.dot(ma);
  if (inv_sum > 0.0) {
    t += (delta_cov * inv_sum) * phi0;
    c0_d_c0 += 2.0 * delta_cov * phi0.dot(a) * inv_sum + delta_cov * delta_cov * inv_sum;
  }
  const double reduction = c0_d_c0 - t.dot(work.sigma_alpha * t);

  double variance = prior_var - reduction + extra_var;
  if (variance < 0.0) variance = 0.0;  // conditioning roundoff

  const double half = zq * std::sqrt(variance);
  return {mean, variance, mean - half, mean + half};
}

}  // namespace frk::detail
