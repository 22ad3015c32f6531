// Internal sampling helpers.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "frk/errors.hpp"

namespace frk::detail {

// L with L L^T = m for PSD m; falls back to an eigenvalue square root with
// clamping when the Cholesky fails at the PSD boundary.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw NumericError("covariance matrix is not positive semidefinite");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

inline Eigen::VectorXd draw_std_normal(std::mt19937_64& rng, long n) {
  std::normal_distribution<double> gau(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = gau(rng);
  return v;
}

}  // namespace frk::detail
