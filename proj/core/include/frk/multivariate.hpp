#pragma once

#include <vector>

#include "frk/gaussian.hpp"

namespace frk {

// Bivariate basis-function model in the conditional parametrization:
//   alpha_1 ~ Gau(0, K11),  alpha_2 | alpha_1 ~ Gau(A alpha_1, K2|1),
// which is valid for any real A as long as K11 and K2|1 are PSD. Both
// processes are zero-mean; each carries its own nugget pair.
struct BivariateModel {
  BasisSet basis1;
  BasisSet basis2;
  Eigen::MatrixXd k11;       // r1 x r1, PSD
  Eigen::MatrixXd a;         // r2 x r1
  Eigen::MatrixXd k2given1;  // r2 x r2, PSD
  NoiseParams noise1;
  NoiseParams noise2;

  int r1() const { return basis1.r(); }
  int r2() const { return basis2.r(); }
  void validate() const;
};

// One dataset per process; the two may have different locations and sizes,
// and either may be empty.
struct BivariateDataset {
  SpatialDataset data1;
  SpatialDataset data2;
};

// Joint coefficient covariance
//   [ K11        K11 A^T          ]
//   [ A K11      K2|1 + A K11 A^T ]
// from the iterated-covariance relationship; PSD by construction.
Eigen::MatrixXd assemble_joint_k(const BivariateModel& m);

// Cross-covariance C_ij(s, u) = phi_i(s)^T K_ij phi_j(u), plus the nugget
// on the diagonal blocks at exact coordinate equality. Note C_12(s, u) =
// C_21(u, s) always, while C_12(s, u) = C_21(s, u) generally fails.
double cross_cov(const BivariateModel& m, int i, int j, const Location& s, const Location& u);

// Joint-Gaussian prediction of one process from the stacked data, through
// the same Woodbury route with r = r1 + r2. Reduces to the univariate
// predictor when the other dataset is empty.
std::vector<PredictiveResult> cokrige(const BivariateModel& m, const BivariateDataset& data,
                                      int target_process, const std::vector<Location>& targets,
                                      double level);

}  // namespace frk
