#include "frk/covariance.hpp"

#include <cmath>

namespace frk {

void NoiseParams::validate() const {
  if (sigma2_delta < 0.0 || sigma2_eps < 0.0) {
    throw ConfigError("noise: variances must be nonnegative");
  }
}

namespace {

// Contiguous index ranges per resolution label, in basis order.
std::vector<std::pair<int, int>> resolution_blocks(const BasisSet& basis) {
  std::vector<std::pair<int, int>> blocks;
  int start = 0;
  for (int j = 1; j <= basis.r(); ++j) {
    if (j == basis.r() || basis.resolutions[j] != basis.resolutions[start]) {
      blocks.emplace_back(start, j);
      start = j;
    }
  }
  return blocks;
}

}  // namespace

Eigen::MatrixXd k_matrix(const KModel& model, const BasisSet& basis) {
  basis.validate();
  const int r = basis.r();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(r, r);

  if (const auto* u = std::get_if<KUnstructured>(&model)) {
    if (u->k.rows() != r || u->k.cols() != r) {
      throw ConfigError("k_matrix: unstructured K is " + std::to_string(u->k.rows()) + "x" +
                        std::to_string(u->k.cols()) + ", basis has r = " + std::to_string(r));
    }
    const double scale = std::max(1.0, u->k.cwiseAbs().maxCoeff());
    if ((u->k - u->k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw ConfigError("k_matrix: unstructured K is not symmetric");
    }
    return 0.5 * (u->k + u->k.transpose());
  }

  if (const auto* si = std::get_if<KScaledIdentity>(&model)) {
    if (si->sigma2 < 0.0) throw ConfigError("k_matrix: negative variance");
    return si->sigma2 * Eigen::MatrixXd::Identity(r, r);
  }

  if (const auto* ar = std::get_if<KAr1PerResolution>(&model)) {
    if (ar->sigma2 < 0.0) throw ConfigError("k_matrix: negative variance");
    if (!(std::abs(ar->rho) < 1.0)) throw ConfigError("k_matrix: AR(1) needs |rho| < 1");
    for (const auto& [lo, hi] : resolution_blocks(basis)) {
      for (int i = lo; i < hi; ++i) {
        for (int j = lo; j < hi; ++j) {
          k(i, j) = ar->sigma2 * std::pow(ar->rho, std::abs(i - j));
        }
      }
    }
    return k;
  }

  const auto& ec = std::get<KExpCentroid>(model);
  if (ec.sigma2 < 0.0) throw ConfigError("k_matrix: negative variance");
  if (!(ec.length_scale > 0.0)) throw ConfigError("k_matrix: length scale must be positive");
  std::vector<Location> centers;
  centers.reserve(r);
  for (const auto& f : basis.fns) centers.push_back(basis_fn_center(f));
  for (const auto& [lo, hi] : resolution_blocks(basis)) {
    for (int i = lo; i < hi; ++i) {
      for (int j = lo; j < hi; ++j) {
        k(i, j) = ec.sigma2 * std::exp(-distance(centers[i], centers[j]) / ec.length_scale);
      }
    }
  }
  return k;
}

double cov_y(const Location& s, const Location& u, const BasisSet& basis,
             const Eigen::MatrixXd& k, const NoiseParams& noise) {
  if (k.rows() != basis.r() || k.cols() != basis.r()) {
    throw ConfigError("cov_y: K size does not match basis");
  }
  const Eigen::VectorXd phi_s = basis.eval(s);
  const Eigen::VectorXd phi_u = basis.eval(u);
  double c = phi_s.dot(k * phi_u);
  if (s == u) c += noise.sigma2_delta;
  return c;
}

PsdReport psd_check(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("psd_check: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConfigError("psd_check: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double inf_norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double tol = -1e-10 * std::max(1.0, inf_norm);
  return {lambda_min >= tol, lambda_min};
}

double matern(double h, const MaternParams& p) {
  if (h < 0.0) throw ConfigError("matern: distance must be nonnegative");
  if (!(p.range > 0.0)) throw ConfigError("matern: range must be positive");
  if (p.sigma2 < 0.0) throw ConfigError("matern: negative sill");

  const double x = h / p.range;
  if (p.smoothness == 0.5) {
    return p.sigma2 * std::exp(-x);
  }
  if (p.smoothness == 1.5) {
    const double u = std::sqrt(3.0) * x;
    return p.sigma2 * (1.0 + u) * std::exp(-u);
  }
  if (p.smoothness == 2.5) {
    const double u = std::sqrt(5.0) * x;
    return p.sigma2 * (1.0 + u + u * u / 3.0) * std::exp(-u);
  }
  throw ConfigError("matern: smoothness must be one of 0.5, 1.5, 2.5");
}

}  // namespace frk
