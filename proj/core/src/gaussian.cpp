#include "frk/gaussian.hpp"

#include <cmath>

#include "frk/math_util.hpp"
#include "optim_util.hpp"
#include "predict_impl.hpp"
#include "rand_util.hpp"

namespace frk {

FittedSolve::FittedSolve(Eigen::MatrixXd phi, const Eigen::MatrixXd& k, Eigen::VectorXd cxi_diag)
    : phi_(std::move(phi)), k_(k), cxi_(std::move(cxi_diag)) {
  const int nn = static_cast<int>(phi_.rows());
  const int rr = static_cast<int>(phi_.cols());
  if (k_.rows() != rr || k_.cols() != rr) throw ConfigError("solve: K size does not match Phi");
  if (cxi_.size() != nn) throw ConfigError("solve: C_xi diagonal length does not match Phi");
  if (!phi_.allFinite() || !k_.allFinite() || !cxi_.allFinite()) {
    throw NumericError("solve: non-finite input");
  }
  if (nn < 1) throw ConfigError("solve: empty system");
  if ((cxi_.array() <= 0.0).any()) {
    throw NumericError("solve: C_xi must have positive diagonal entries "
                       "(sigma2_delta + sigma2_eps must be > 0)");
  }
  cxi_inv_ = cxi_.cwiseInverse();

  // K = L L^T. PSD-boundary values occur during EM, so fall back to a small
  // diagonal jitter and then to an eigenvalue square root with clamping.
  Eigen::LLT<Eigen::MatrixXd> k_llt(k_);
  if (k_llt.info() == Eigen::Success) {
    l_ = k_llt.matrixL();
  } else {
    jitter_ = 1e-10 * k_.trace() / rr;
    bool done = false;
    if (jitter_ > 0.0) {
      k_llt.compute(k_ + jitter_ * Eigen::MatrixXd::Identity(rr, rr));
      if (k_llt.info() == Eigen::Success) {
        l_ = k_llt.matrixL();
        done = true;
      }
    }
    if (!done) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k_);
      const double scale = std::max(1.0, k_.cwiseAbs().maxCoeff());
      if (es.eigenvalues().minCoeff() < -1e-8 * scale) {
        throw NumericError("solve: K is not positive semidefinite (lambda_min = " +
                           std::to_string(es.eigenvalues().minCoeff()) + ")");
      }
      l_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
      jitter_ = 0.0;
    }
  }

  m_.noalias() = phi_.transpose() * cxi_inv_.asDiagonal() * phi_;
  Eigen::MatrixXd g = l_.transpose() * m_ * l_;
  g.diagonal().array() += 1.0;
  g_llt_.compute(g);
  if (g_llt_.info() != Eigen::Success) {
    throw NumericError("solve: capacitance matrix factorization failed");
  }

  double logdet_g = 0.0;
  for (int i = 0; i < rr; ++i) logdet_g += std::log(g_llt_.matrixLLT()(i, i));
  logdet_ = 2.0 * logdet_g + cxi_.array().log().sum();
}

Eigen::VectorXd FittedSolve::apply(const Eigen::VectorXd& v) const {
  if (v.size() != n()) throw ConfigError("solve: vector length does not match n");
  const Eigen::VectorXd t = cxi_inv_.cwiseProduct(v);
  const Eigen::VectorXd u = l_.transpose() * (phi_.transpose() * t);
  const Eigen::VectorXd y = g_llt_.solve(u);
  return t - cxi_inv_.cwiseProduct(phi_ * (l_ * y));
}

double FittedSolve::quad_form(const Eigen::VectorXd& v) const {
  if (v.size() != n()) throw ConfigError("solve: vector length does not match n");
  const Eigen::VectorXd t = cxi_inv_.cwiseProduct(v);
  const Eigen::VectorXd u = l_.transpose() * (phi_.transpose() * t);
  return v.dot(t) - u.dot(g_llt_.solve(u));
}

Eigen::MatrixXd FittedSolve::posterior_cov() const {
  return l_ * g_llt_.solve(Eigen::MatrixXd(l_.transpose()));
}

Eigen::VectorXd smw_apply(const FittedSolve& solve, const Eigen::VectorXd& v) {
  return solve.apply(v);
}

SreSolve build_sre_solve(const SpatialDataset& ds, const BasisSet& basis, const SreParams& params) {
  ds.validate();
  basis.validate();
  params.noise.validate();
  if (basis.dim() != ds.dim()) {
    throw ConfigError("engine: basis dimension " + std::to_string(basis.dim()) +
                      " does not match dataset dimension " + std::to_string(ds.dim()));
  }
  if (params.beta.size() != ds.p()) {
    throw ConfigError("engine: beta has " + std::to_string(params.beta.size()) +
                      " entries, dataset has p = " + std::to_string(ds.p()));
  }

  const Eigen::MatrixXd k = k_matrix(params.k_model, basis);
  Eigen::MatrixXd phi = design_matrix(basis, ds);
  const Eigen::VectorXd cxi =
      Eigen::VectorXd::Constant(ds.n(), params.noise.sigma2_xi());

  FittedSolve solve(std::move(phi), k, cxi);
  Eigen::VectorXd resid = ds.z;
  if (ds.p() > 0) resid -= ds.covariates * params.beta;

  SreSolve out{std::move(solve), std::move(resid), {}, {}};
  const auto cxi_inv = out.solve.cxi_diag().cwiseInverse();
  out.phit_cxi_z.noalias() = out.solve.phi().transpose() * cxi_inv.cwiseProduct(ds.z);
  if (ds.p() > 0) {
    out.phit_cxi_x.noalias() =
        out.solve.phi().transpose() * cxi_inv.asDiagonal() * ds.covariates;
  }
  return out;
}

double log_likelihood(const SpatialDataset& ds, const BasisSet& basis, const SreParams& params) {
  const SreSolve s = build_sre_solve(ds, basis, params);
  const double n = static_cast<double>(ds.n());
  const double ll =
      -0.5 * (n * std::log(2.0 * M_PI) + s.solve.log_det() + s.solve.quad_form(s.resid));
  if (!std::isfinite(ll)) throw NumericError("log_likelihood: non-finite result");
  return ll;
}

std::vector<PredictiveResult> predict(const SpatialDataset& ds, const BasisSet& basis,
                                      const SreParams& params,
                                      const std::vector<Location>& targets, double level,
                                      const std::optional<Eigen::MatrixXd>& x_targets,
                                      bool observable) {
  if (targets.empty()) throw ConfigError("predict: no targets");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("predict: level must be in (0,1)");
  if (ds.p() > 0) {
    if (!x_targets || x_targets->rows() != static_cast<long>(targets.size()) ||
        x_targets->cols() != ds.p()) {
      throw ConfigError("predict: covariates required at targets (one row per target, p columns)");
    }
  }

  const SreSolve s = build_sre_solve(ds, basis, params);
  const auto work = detail::make_predict_work(s.solve, s.resid);
  const detail::ExactMatchIndex match(ds.locations);
  const double zq = normal_quantile(0.5 + 0.5 * level);
  const double extra = observable ? params.noise.sigma2_eps : 0.0;

  std::vector<PredictiveResult> out;
  out.reserve(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    const Eigen::VectorXd phi0 = basis.eval(targets[i]);
    const double prior = phi0.dot(s.solve.k() * phi0) + params.noise.sigma2_delta;
    const double offset = ds.p() > 0 ? x_targets->row(static_cast<long>(i)).dot(params.beta) : 0.0;
    out.push_back(detail::predict_one(s.solve, work, phi0, prior, offset,
                                      match.find(targets[i]), params.noise.sigma2_delta,
                                      extra, zq));
  }
  return out;
}

namespace {

Eigen::MatrixXd matern_gram(const SpatialDataset& ds, const MaternParams& p, double sigma2_eps) {
  const int n = ds.n();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    gram(i, i) = p.sigma2 + sigma2_eps;
    for (int j = 0; j < i; ++j) {
      const double c = matern(distance(ds.locations[i], ds.locations[j]), p);
      gram(i, j) = c;
      gram(j, i) = c;
    }
  }
  return gram;
}

}  // namespace

std::vector<PredictiveResult> kriging_baseline(const SpatialDataset& ds, const MaternParams& p,
                                               double sigma2_eps,
                                               const std::vector<Location>& targets, double level,
                                               int max_n, bool observable) {
  ds.validate();
  if (sigma2_eps < 0.0) throw ConfigError("baseline: negative measurement-error variance");
  if (ds.n() > max_n) {
    throw ConfigError("baseline: n = " + std::to_string(ds.n()) + " exceeds the dense guard (" +
                      std::to_string(max_n) + ")");
  }
  if (targets.empty()) throw ConfigError("baseline: no targets");

  const Eigen::MatrixXd gram = matern_gram(ds, p, sigma2_eps);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericError("baseline: singular gram matrix");
  const Eigen::VectorXd w = llt.solve(ds.z);
  const double zq = normal_quantile(0.5 + 0.5 * level);
  const double extra = observable ? sigma2_eps : 0.0;

  std::vector<PredictiveResult> out;
  out.reserve(targets.size());
  Eigen::VectorXd c0(ds.n());
  for (const auto& s0 : targets) {
    for (int i = 0; i < ds.n(); ++i) c0[i] = matern(distance(s0, ds.locations[i]), p);
    const double mean = c0.dot(w);
    double variance = p.sigma2 - c0.dot(llt.solve(c0)) + extra;
    if (variance < 0.0) variance = 0.0;
    const double half = zq * std::sqrt(variance);
    out.push_back({mean, variance, mean - half, mean + half});
  }
  return out;
}

SreSimulation simulate_sre(const std::vector<Location>& locations,
                           const std::optional<Eigen::MatrixXd>& x, const BasisSet& basis,
                           const SreParams& params, std::uint64_t seed) {
  if (locations.empty()) throw ConfigError("simulate: no locations");
  basis.validate();
  params.noise.validate();
  const auto n = static_cast<long>(locations.size());
  if (x && (x->rows() != n || x->cols() != params.beta.size())) {
    throw ConfigError("simulate: covariate shape does not match beta");
  }
  if (!x && params.beta.size() > 0) {
    throw ConfigError("simulate: beta set but no covariates given");
  }

  const Eigen::MatrixXd k = k_matrix(params.k_model, basis);
  const Eigen::MatrixXd k_sqrt = detail::psd_sqrt(k);
  const Eigen::MatrixXd phi = design_matrix(basis, locations);

  std::mt19937_64 rng(seed);
  SreSimulation sim;
  sim.alpha = k_sqrt * detail::draw_std_normal(rng, basis.r());
  sim.y = phi * sim.alpha +
          std::sqrt(params.noise.sigma2_delta) * detail::draw_std_normal(rng, n);
  if (x) sim.y += (*x) * params.beta;

  sim.data.locations = locations;
  sim.data.z = sim.y + std::sqrt(params.noise.sigma2_eps) * detail::draw_std_normal(rng, n);
  if (x) sim.data.covariates = *x;
  return sim;
}

MaternMlFit fit_matern_ml(const SpatialDataset& ds, double smoothness, int max_n) {
  ds.validate();
  if (ds.n() > max_n) {
    throw ConfigError("baseline fit: n exceeds the dense guard (" + std::to_string(max_n) + ")");
  }

  const auto loglik = [&](double log_s2, double log_rho, double log_eps) {
    MaternParams p{std::exp(log_s2), std::exp(log_rho), smoothness};
    const Eigen::MatrixXd gram = matern_gram(ds, p, std::exp(log_eps));
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (int i = 0; i < ds.n(); ++i) logdet += std::log(llt.matrixLLT()(i, i));
    const double quad = ds.z.dot(llt.solve(ds.z));
    return -0.5 * (ds.n() * std::log(2.0 * M_PI) + 2.0 * logdet + quad);
  };

  // Scale-aware start, then coordinate descent on the log parameters.
  const double var_z = (ds.z.array() - ds.z.mean()).square().sum() / std::max(1, ds.n() - 1);
  double max_d = 0.0;
  for (int i = 1; i < ds.n(); ++i) max_d = std::max(max_d, distance(ds.locations[0], ds.locations[i]));
  if (max_d <= 0.0) max_d = 1.0;

  Eigen::Vector3d theta(std::log(std::max(0.8 * var_z, 1e-12)),
                        std::log(0.3 * max_d),
                        std::log(std::max(0.2 * var_z, 1e-12)));
  for (int sweep = 0; sweep < 4; ++sweep) {
    const double span = 3.0 / (sweep + 1);
    for (int k = 0; k < 3; ++k) {
      theta[k] = detail::golden_max(
          [&](double v) {
            Eigen::Vector3d t = theta;
            t[k] = v;
            return loglik(t[0], t[1], t[2]);
          },
          theta[k] - span, theta[k] + span, 40);
    }
  }

  MaternMlFit fit;
  fit.params = MaternParams{std::exp(theta[0]), std::exp(theta[1]), smoothness};
  fit.sigma2_eps = std::exp(theta[2]);
  fit.loglik = loglik(theta[0], theta[1], theta[2]);
  return fit;
}

}  // namespace frk
