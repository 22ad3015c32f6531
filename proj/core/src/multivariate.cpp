#include "frk/multivariate.hpp"

#include "frk/math_util.hpp"
#include "predict_impl.hpp"

namespace frk {

void BivariateModel::validate() const {
  basis1.validate();
  basis2.validate();
  if (k11.rows() != r1() || k11.cols() != r1()) throw ConfigError("bivariate: K11 size mismatch");
  if (k2given1.rows() != r2() || k2given1.cols() != r2()) {
    throw ConfigError("bivariate: K2|1 size mismatch");
  }
  if (a.rows() != r2() || a.cols() != r1()) throw ConfigError("bivariate: A size mismatch");
  noise1.validate();
  noise2.validate();
}

Eigen::MatrixXd assemble_joint_k(const BivariateModel& m) {
  m.validate();
  const int r1 = m.r1(), r2 = m.r2();
  Eigen::MatrixXd k(r1 + r2, r1 + r2);
  k.topLeftCorner(r1, r1) = m.k11;
  k.topRightCorner(r1, r2) = m.k11 * m.a.transpose();
  k.bottomLeftCorner(r2, r1) = m.a * m.k11;
  k.bottomRightCorner(r2, r2) = m.k2given1 + m.a * m.k11 * m.a.transpose();
  return 0.5 * (k + k.transpose());
}

double cross_cov(const BivariateModel& m, int i, int j, const Location& s, const Location& u) {
  if ((i != 1 && i != 2) || (j != 1 && j != 2)) {
    throw ConfigError("cross_cov: process indices must be 1 or 2");
  }
  const Eigen::MatrixXd joint = assemble_joint_k(m);
  const int r1 = m.r1();
  const auto block = [&](int a_, int b_) {
    return joint.block(a_ == 1 ? 0 : r1, b_ == 1 ? 0 : r1, a_ == 1 ? r1 : m.r2(),
                       b_ == 1 ? r1 : m.r2());
  };
  const Eigen::VectorXd phi_s = (i == 1 ? m.basis1 : m.basis2).eval(s);
  const Eigen::VectorXd phi_u = (j == 1 ? m.basis1 : m.basis2).eval(u);
  double c = phi_s.dot(block(i, j) * phi_u);
  if (i == j && s == u) {
    c += (i == 1 ? m.noise1 : m.noise2).sigma2_delta;
  }
  return c;
}

std::vector<PredictiveResult> cokrige(const BivariateModel& m, const BivariateDataset& data,
                                      int target_process, const std::vector<Location>& targets,
                                      double level) {
  m.validate();
  if (target_process != 1 && target_process != 2) {
    throw ConfigError("cokrige: target process must be 1 or 2");
  }
  if (targets.empty()) throw ConfigError("cokrige: no targets");
  const int n1 = data.data1.n(), n2 = data.data2.n();
  if (n1 + n2 < 1) throw ConfigError("cokrige: need at least one observation");
  if (n1 > 0) data.data1.validate();
  if (n2 > 0) data.data2.validate();

  const int r1 = m.r1(), r2 = m.r2();
  const Eigen::MatrixXd joint_k = assemble_joint_k(m);

  // Stacked block design over [alpha_1; alpha_2] with per-process noise on
  // the C_xi diagonal.
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n1 + n2, r1 + r2);
  Eigen::VectorXd cxi(n1 + n2);
  Eigen::VectorXd z(n1 + n2);
  if (n1 > 0) {
    phi.topLeftCorner(n1, r1) = design_matrix(m.basis1, data.data1);
    cxi.head(n1).setConstant(m.noise1.sigma2_xi());
    z.head(n1) = data.data1.z;
  }
  if (n2 > 0) {
    phi.bottomRightCorner(n2, r2) = design_matrix(m.basis2, data.data2);
    cxi.tail(n2).setConstant(m.noise2.sigma2_xi());
    z.tail(n2) = data.data2.z;
  }

  const FittedSolve solve(std::move(phi), joint_k, cxi);
  const auto work = detail::make_predict_work(solve, z);
  const double zq = normal_quantile(0.5 + 0.5 * level);

  const bool is1 = target_process == 1;
  const BasisSet& basis_q = is1 ? m.basis1 : m.basis2;
  const NoiseParams& noise_q = is1 ? m.noise1 : m.noise2;
  const Eigen::MatrixXd k_qq = is1 ? joint_k.topLeftCorner(r1, r1).eval()
                                   : joint_k.bottomRightCorner(r2, r2).eval();
  // Fine-scale terms are independent across processes, so matches are
  // looked up only within the target process's rows.
  const detail::ExactMatchIndex match(is1 ? data.data1.locations : data.data2.locations,
                                      is1 ? 0 : n1);

  std::vector<PredictiveResult> out;
  out.reserve(targets.size());
  for (const auto& s0 : targets) {
    const Eigen::VectorXd phi_q = basis_q.eval(s0);
    Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(r1 + r2);
    if (is1) {
      phi0.head(r1) = phi_q;
    } else {
      phi0.tail(r2) = phi_q;
    }
    const double prior = phi_q.dot(k_qq * phi_q) + noise_q.sigma2_delta;
    out.push_back(detail::predict_one(solve, work, phi0, prior, 0.0, match.find(s0),
                                      noise_q.sigma2_delta, 0.0, zq));
  }
  return out;
}

}  // namespace frk
