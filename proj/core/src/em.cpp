#include "frk/em.hpp"

#include <cmath>
#include <sstream>

#include "optim_util.hpp"

namespace frk {

EStepMoments e_step(const SpatialDataset& ds, const BasisSet& basis, const SreParams& params) {
  const SreSolve s = build_sre_solve(ds, basis, params);
  EStepMoments m;
  m.cov = s.solve.posterior_cov();
  const Eigen::VectorXd u =
      s.solve.phi().transpose() * s.solve.cxi_diag().cwiseInverse().cwiseProduct(s.resid);
  m.mean = m.cov * u;
  return m;
}

namespace {

double sample_var(const Eigen::VectorXd& z) {
  const double mean = z.mean();
  return (z.array() - mean).square().sum() / std::max<long>(1, z.size() - 1);
}

// Expected coefficient second moment S = Sigma + mu mu^T drives every K
// update: the unstructured argmax is S itself, and parametric forms
// maximize -log|K| - tr(K^{-1} S).
KModel update_k(const KModel& prev, const BasisSet& basis, const Eigen::MatrixXd& s_mat) {
  const int r = static_cast<int>(s_mat.rows());

  if (std::holds_alternative<KUnstructured>(prev)) {
    return KUnstructured{s_mat};
  }
  if (std::holds_alternative<KScaledIdentity>(prev)) {
    return KScaledIdentity{s_mat.trace() / r};
  }

  // Profiled objective for K = sigma2 * R(theta):
  //   sigma2(theta) = tr(R^{-1} S) / r,
  //   g(theta) = -log|R(theta)| - r log sigma2(theta).
  const auto profile = [&](const KModel& candidate) -> std::pair<double, double> {
    const Eigen::MatrixXd r_mat = k_matrix(candidate, basis);
    Eigen::LLT<Eigen::MatrixXd> llt(r_mat);
    if (llt.info() != Eigen::Success) {
      return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    double logdet = 0.0;
    for (int i = 0; i < r; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
    const double sigma2 = llt.solve(s_mat).trace() / r;
    if (!(sigma2 > 0.0)) return {-std::numeric_limits<double>::infinity(), 0.0};
    return {-logdet - r * std::log(sigma2), sigma2};
  };

  if (const auto* ar = std::get_if<KAr1PerResolution>(&prev)) {
    const auto objective = [&](double rho) {
      return profile(KAr1PerResolution{1.0, rho}).first;
    };
    double best_rho =
        detail::golden_max(objective, -0.999, 0.999, 60);
    if (objective(ar->rho) > objective(best_rho)) best_rho = ar->rho;
    return KAr1PerResolution{profile(KAr1PerResolution{1.0, best_rho}).second, best_rho};
  }

  const auto& ec = std::get<KExpCentroid>(prev);
  const auto objective = [&](double log_ell) {
    return profile(KExpCentroid{1.0, std::exp(log_ell)}).first;
  };
  const double center = std::log(ec.length_scale);
  double best = detail::golden_max(objective, center - 4.0, center + 4.0, 60);
  if (objective(center) > objective(best)) best = center;
  return KExpCentroid{profile(KExpCentroid{1.0, std::exp(best)}).second, std::exp(best)};
}

}  // namespace

SreParams m_step(const SpatialDataset& ds, const BasisSet& basis, const EStepMoments& moments,
                 const SreParams& prev, const EmConfig& config, bool* clamped) {
  const int n = ds.n();
  const int r = basis.r();
  if (moments.mean.size() != r || moments.cov.rows() != r || moments.cov.cols() != r) {
    throw ConfigError("m_step: moments do not match basis size");
  }

  const Eigen::MatrixXd phi = design_matrix(basis, ds);
  const Eigen::VectorXd phi_mu = phi * moments.mean;
  const Eigen::MatrixXd phit_phi = phi.transpose() * phi;
  const double tr_phi_cov_phit = moments.cov.cwiseProduct(phit_phi).sum();

  const double s2d_old = prev.noise.sigma2_delta;
  const double s2e_old = prev.noise.sigma2_eps;
  const double cxi_old = s2d_old + s2e_old;
  if (!(cxi_old > 0.0)) throw NumericError("m_step: degenerate noise in previous parameters");

  const Eigen::VectorXd e_old = ds.p() > 0 ? (ds.z - ds.covariates * prev.beta).eval() : ds.z;
  // Conditional mean of the fine-scale vector under the previous parameters.
  const Eigen::VectorXd mu_delta = (s2d_old / cxi_old) * (e_old - phi_mu);

  SreParams next = prev;

  if (config.free_beta && ds.p() > 0) {
    Eigen::VectorXd target = ds.z - phi_mu;
    if (!config.merge_nugget || !config.free_sigma2_delta || !config.free_sigma2_eps) {
      target -= mu_delta;
    }
    next.beta = ds.covariates.colPivHouseholderQr().solve(target);
  }
  const Eigen::VectorXd e_new = ds.p() > 0 ? (ds.z - ds.covariates * next.beta).eval() : ds.z;

  if (config.free_k) {
    const Eigen::MatrixXd s_mat = moments.cov + moments.mean * moments.mean.transpose();
    next.k_model = update_k(prev.k_model, basis, s_mat);
  }

  // tr(C_Z^{-1}) through the identity C_Z^{-1} = Cxi^{-1} - Cxi^{-1} Phi
  // Sigma_alpha Phi^T Cxi^{-1}, all from the cached r x r pieces.
  const double tr_cz_inv = n / cxi_old - tr_phi_cov_phit / (cxi_old * cxi_old);

  bool any_clamped = false;
  const double floor = config.variance_floor_scale * std::max(sample_var(ds.z), 1e-300);
  const auto clamp = [&](double v) {
    if (v < floor) {
      any_clamped = true;
      return floor;
    }
    return v;
  };

  if (config.free_sigma2_delta && config.free_sigma2_eps && config.merge_nugget) {
    // Single-parameter update of sigma2_xi, split by the incoming ratio.
    const double sse = (e_new - phi_mu).squaredNorm() + tr_phi_cov_phit;
    const double s2xi = clamp(sse / n);
    const double ratio = s2d_old / cxi_old;
    next.noise.sigma2_delta = ratio * s2xi;
    next.noise.sigma2_eps = (1.0 - ratio) * s2xi;
  } else {
    if (config.free_sigma2_delta) {
      const double ed2 = mu_delta.squaredNorm() + n * s2d_old - s2d_old * s2d_old * tr_cz_inv;
      next.noise.sigma2_delta = clamp(ed2 / n);
    }
    if (config.free_sigma2_eps) {
      const double sse = (e_new - phi_mu - mu_delta).squaredNorm() + n * s2e_old -
                         s2e_old * s2e_old * tr_cz_inv;
      next.noise.sigma2_eps = clamp(sse / n);
    }
  }

  if (clamped) *clamped = any_clamped;
  return next;
}

namespace {

// Flattened parameter view used for the convergence test.
Eigen::VectorXd flatten(const SreParams& p, const BasisSet& basis) {
  const Eigen::MatrixXd k = k_matrix(p.k_model, basis);
  Eigen::VectorXd v(p.beta.size() + k.size() + 2);
  long at = 0;
  v.segment(at, p.beta.size()) = p.beta;
  at += p.beta.size();
  v.segment(at, k.size()) = Eigen::Map<const Eigen::VectorXd>(k.data(), k.size());
  at += k.size();
  v[at++] = p.noise.sigma2_delta;
  v[at] = p.noise.sigma2_eps;
  return v;
}

// Initialization rule for the free parameters: beta by ordinary least
// squares, variances from half the residual variance each, and K from a
// ridge-regularized projection of the residuals onto the basis.
SreParams auto_init(const SpatialDataset& ds, const BasisSet& basis, const SreParams& given,
                    const EmConfig& config) {
  SreParams init = given;

  Eigen::VectorXd resid = ds.z;
  if (ds.p() > 0) {
    const Eigen::VectorXd beta_ols = ds.covariates.colPivHouseholderQr().solve(ds.z);
    if (config.free_beta) init.beta = beta_ols;
    resid = ds.z - ds.covariates * init.beta;
  }

  const double resid_var =
      std::max(resid.squaredNorm() / std::max(1, ds.n() - ds.p()), 1e-12);
  if (config.free_sigma2_delta) init.noise.sigma2_delta = 0.5 * resid_var;
  if (config.free_sigma2_eps) init.noise.sigma2_eps = 0.5 * resid_var;
  if (!(init.noise.sigma2_xi() > 0.0)) init.noise.sigma2_eps = 0.5 * resid_var;

  if (config.free_k) {
    const Eigen::MatrixXd phi = design_matrix(basis, ds);
    Eigen::MatrixXd gram = phi.transpose() * phi;
    const double ridge = 1e-8 * gram.trace() / basis.r() + 1e-12;
    gram.diagonal().array() += ridge;
    const Eigen::VectorXd a = gram.ldlt().solve(phi.transpose() * resid);
    const double scale = a.squaredNorm() / basis.r() + 1e-6 * resid_var;

    if (std::holds_alternative<KUnstructured>(init.k_model)) {
      Eigen::MatrixXd k0 = a * a.transpose();
      k0.diagonal().array() += 0.1 * scale;
      init.k_model = KUnstructured{std::move(k0)};
    } else if (std::holds_alternative<KScaledIdentity>(init.k_model)) {
      init.k_model = KScaledIdentity{scale};
    } else if (auto* ar = std::get_if<KAr1PerResolution>(&init.k_model)) {
      init.k_model = KAr1PerResolution{scale, ar->rho};
    } else {
      init.k_model = KExpCentroid{scale, std::get<KExpCentroid>(init.k_model).length_scale};
    }
  }
  return init;
}

}  // namespace

FitResult fit_em(const SpatialDataset& ds, const BasisSet& basis, const SreParams& init,
                 const EmConfig& config) {
  if (config.max_iterations < 1) throw ConfigError("em: max_iterations must be >= 1");
  if (!(config.loglik_rtol > 0.0) || !(config.param_tol > 0.0)) {
    throw ConfigError("em: tolerances must be positive");
  }

  SreParams current =
      config.init == EmConfig::Init::Auto ? auto_init(ds, basis, init, config) : init;

  FitResult result;
  double ll = log_likelihood(ds, basis, current);
  result.loglik_trace.push_back(ll);
  Eigen::VectorXd flat = flatten(current, basis);

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const EStepMoments moments = e_step(ds, basis, current);
    bool clamped = false;
    SreParams next = m_step(ds, basis, moments, current, config, &clamped);
    result.variance_clamped = result.variance_clamped || clamped;

    const double ll_next = log_likelihood(ds, basis, next);
    if (ll_next < ll - 1e-9) {
      std::ostringstream msg;
      msg << "em: log likelihood decreased at iteration " << iter << " (" << ll << " -> "
          << ll_next << "); this indicates an implementation defect";
      throw std::logic_error(msg.str());
    }

    const Eigen::VectorXd flat_next = flatten(next, basis);
    const double param_change =
        ((flat_next - flat).cwiseAbs().array() / (1.0 + flat.cwiseAbs().array())).maxCoeff();

    current = std::move(next);
    result.loglik_trace.push_back(ll_next);
    result.iterations = iter;

    if (std::abs(ll_next - ll) <= config.loglik_rtol * (1.0 + std::abs(ll))) {
      result.converged = true;
      result.termination = "loglik_tol";
      ll = ll_next;
      break;
    }
    if (param_change <= config.param_tol) {
      result.converged = true;
      result.termination = "param_tol";
      ll = ll_next;
      break;
    }
    ll = ll_next;
    flat = flat_next;
  }

  if (!result.converged) result.termination = "max_iterations";
  result.params = current;
  return result;
}

}  // namespace frk
