#pragma once

#include <Eigen/Dense>
#include <variant>

#include "frk/basis.hpp"

namespace frk {

// Variances of the two error layers: fine-scale variation delta and
// measurement error eps. Both act as nuggets on the data scale; their sum
// is the diagonal of C_xi, which must be positive for the low-rank solve.
struct NoiseParams {
  double sigma2_delta = 0.0;
  double sigma2_eps = 0.0;

  double sigma2_xi() const { return sigma2_delta + sigma2_eps; }
  void validate() const;
};

// Parametric families for the coefficient covariance K = cov(alpha, alpha).
struct KUnstructured {
  Eigen::MatrixXd k;  // r x r symmetric
};
struct KScaledIdentity {
  double sigma2 = 1.0;
};
// AR(1) within each resolution block (indexed by position inside the
// block), zero across blocks.
struct KAr1PerResolution {
  double sigma2 = 1.0;
  double rho = 0.0;  // in (-1, 1)
};
// Exponential decay over basis-center distance within each resolution
// block, zero across blocks.
struct KExpCentroid {
  double sigma2 = 1.0;
  double length_scale = 1.0;
};

using KModel = std::variant<KUnstructured, KScaledIdentity, KAr1PerResolution, KExpCentroid>;

// Materializes K for the given basis. Throws ConfigError on parameter
// violations (|rho| >= 1, negative variances, asymmetric unstructured
// input, size mismatch).
Eigen::MatrixXd k_matrix(const KModel& model, const BasisSet& basis);

// Process covariance implied by the basis-function model:
//   C_Y(s, u) = phi(s)^T K phi(u) + sigma2_delta * 1{s == u},
// with the fine-scale term a pure nugget on exact coordinate equality.
double cov_y(const Location& s, const Location& u, const BasisSet& basis,
             const Eigen::MatrixXd& k, const NoiseParams& noise);

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

// PSD up to eigenvalue tolerance -1e-10 * max(1, ||M||_inf). Requires M
// symmetric within 1e-12 relative tolerance.
PsdReport psd_check(const Eigen::MatrixXd& m);

// Matern parameters restricted to half-integer smoothness, where the
// covariance has an exact closed form and no Bessel evaluation is needed.
struct MaternParams {
  double sigma2 = 1.0;
  double range = 1.0;       // rho > 0
  double smoothness = 0.5;  // nu in {0.5, 1.5, 2.5}
};

double matern(double h, const MaternParams& p);

}  // namespace frk
