#include "frk/dynamic_st.hpp"

#include <cmath>

#include "frk/math_util.hpp"
#include "rand_util.hpp"

namespace frk {

void DynamicStModel::validate() const {
  spatial_basis.validate();
  const int rr = r();
  if (propagator.rows() != rr || propagator.cols() != rr) {
    throw ConfigError("dynamic model: propagator must be r x r");
  }
  if (innovation_cov.rows() != rr || innovation_cov.cols() != rr) {
    throw ConfigError("dynamic model: innovation covariance must be r x r");
  }
  if (initial_mean.size() != rr) throw ConfigError("dynamic model: m0 must have r entries");
  if (initial_cov.rows() != rr || initial_cov.cols() != rr) {
    throw ConfigError("dynamic model: P0 must be r x r");
  }
  noise.validate();
}

StSimulation simulate_dynamic(const DynamicStModel& model,
                              const std::vector<std::vector<Location>>& locations,
                              std::uint64_t seed,
                              const std::vector<Eigen::MatrixXd>& covariates) {
  model.validate();
  const int T = static_cast<int>(locations.size());
  if (T < 1) throw ConfigError("simulate: T must be >= 1");
  const bool with_x = model.beta.size() > 0;
  if (with_x && static_cast<int>(covariates.size()) != T) {
    throw ConfigError("simulate: covariates required for every slice when beta is set");
  }

  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd p0_sqrt = detail::psd_sqrt(model.initial_cov);
  const Eigen::MatrixXd omega_sqrt = detail::psd_sqrt(model.innovation_cov);
  const double sd_delta = std::sqrt(model.noise.sigma2_delta);
  const double sd_eps = std::sqrt(model.noise.sigma2_eps);

  StSimulation sim;
  Eigen::VectorXd alpha;
  for (int t = 0; t < T; ++t) {
    if (t == 0) {
      alpha = model.initial_mean + p0_sqrt * detail::draw_std_normal(rng, model.r());
    } else {
      alpha = model.propagator * alpha + omega_sqrt * detail::draw_std_normal(rng, model.r());
    }
    sim.states.push_back(alpha);

    const auto n_t = static_cast<long>(locations[t].size());
    SpatialDataset slice;
    slice.locations = locations[t];
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_t);
    if (n_t > 0) {
      const Eigen::MatrixXd phi_t = design_matrix(model.spatial_basis, locations[t]);
      y = phi_t * alpha + sd_delta * detail::draw_std_normal(rng, n_t);
      if (with_x) {
        const auto& x = covariates[t];
        if (x.rows() != n_t || x.cols() != model.beta.size()) {
          throw ConfigError("simulate: covariate shape mismatch at slice " + std::to_string(t + 1));
        }
        y += x * model.beta;
        slice.covariates = x;
      }
      slice.z = y + sd_eps * detail::draw_std_normal(rng, n_t);
    } else {
      slice.z.resize(0);
    }
    sim.y.push_back(std::move(y));
    sim.data.slices.push_back(std::move(slice));
    sim.data.times.push_back(t + 1.0);
  }
  return sim;
}

namespace {

struct FilterPass {
  StateTrajectory filtered;
  std::vector<Eigen::VectorXd> pred_mean;
  std::vector<Eigen::MatrixXd> pred_cov;
};

FilterPass run_filter(const DynamicStModel& model, const StDataset& data) {
  model.validate();
  if (data.T() < 1) throw ConfigError("filter: T must be >= 1");
  const int r = model.r();
  const double obs_var = model.noise.sigma2_xi();
  const bool with_x = model.beta.size() > 0;

  FilterPass out;
  Eigen::VectorXd m = model.initial_mean;
  Eigen::MatrixXd p = model.initial_cov;

  for (int t = 0; t < data.T(); ++t) {
    if (t > 0) {
      m = model.propagator * out.filtered.mean.back();
      p = model.propagator * out.filtered.cov.back() * model.propagator.transpose() +
          model.innovation_cov;
    }
    out.pred_mean.push_back(m);
    out.pred_cov.push_back(p);

    const auto& slice = data.slices[t];
    if (slice.n() == 0) {
      out.filtered.mean.push_back(m);
      out.filtered.cov.push_back(p);
      continue;
    }
    if (!(obs_var > 0.0)) {
      throw NumericError("filter: observation noise must be positive for non-empty slices");
    }
    if (with_x && slice.p() != model.beta.size()) {
      throw ConfigError("filter: slice covariates do not match beta");
    }

    const Eigen::MatrixXd h = design_matrix(model.spatial_basis, slice);
    Eigen::VectorXd y = slice.z;
    if (with_x) y -= slice.covariates * model.beta;

    Eigen::MatrixXd s = h * p * h.transpose();
    s.diagonal().array() += obs_var;
    Eigen::LLT<Eigen::MatrixXd> s_llt(s);
    if (s_llt.info() != Eigen::Success) {
      throw NumericError("filter: innovation covariance factorization failed at slice " +
                         std::to_string(t + 1));
    }
    const Eigen::MatrixXd gain = p * h.transpose() * s_llt.solve(Eigen::MatrixXd::Identity(slice.n(), slice.n()));

    m += gain * (y - h * m);
    // Joseph form keeps the covariance PSD under roundoff.
    const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(r, r) - gain * h;
    p = ikh * p * ikh.transpose() + obs_var * gain * gain.transpose();
    p = 0.5 * (p + p.transpose());

    out.filtered.mean.push_back(m);
    out.filtered.cov.push_back(p);
  }
  return out;
}

Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(1.0, lmax);
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i) inv[i] = inv[i] > tol ? 1.0 / inv[i] : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

StateTrajectory kalman_filter(const DynamicStModel& model, const StDataset& data) {
  return run_filter(model, data).filtered;
}

StateTrajectory kalman_smoother(const DynamicStModel& model, const StDataset& data) {
  FilterPass pass = run_filter(model, data);
  const int T = pass.filtered.T();

  StateTrajectory smoothed;
  smoothed.mean.resize(T);
  smoothed.cov.resize(T);
  smoothed.mean[T - 1] = pass.filtered.mean[T - 1];
  smoothed.cov[T - 1] = pass.filtered.cov[T - 1];

  for (int t = T - 2; t >= 0; --t) {
    const Eigen::MatrixXd gain = pass.filtered.cov[t] * model.propagator.transpose() *
                                 pinv_psd(pass.pred_cov[t + 1]);
    smoothed.mean[t] =
        pass.filtered.mean[t] + gain * (smoothed.mean[t + 1] - pass.pred_mean[t + 1]);
    Eigen::MatrixXd cov = pass.filtered.cov[t] +
                          gain * (smoothed.cov[t + 1] - pass.pred_cov[t + 1]) * gain.transpose();
    smoothed.cov[t] = 0.5 * (cov + cov.transpose());
  }
  return smoothed;
}

std::vector<PredictiveResult> predict_st(const DynamicStModel& model,
                                         const StateTrajectory& trajectory,
                                         const std::vector<StTarget>& targets, double level,
                                         const std::optional<Eigen::MatrixXd>& x_targets) {
  model.validate();
  if (trajectory.T() < 1) throw ConfigError("predict_st: empty trajectory");
  if (targets.empty()) throw ConfigError("predict_st: no targets");
  const bool with_x = model.beta.size() > 0;
  if (with_x &&
      (!x_targets || x_targets->rows() != static_cast<long>(targets.size()) ||
       x_targets->cols() != model.beta.size())) {
    throw ConfigError("predict_st: covariates required at targets when beta is set");
  }
  const double zq = normal_quantile(0.5 + 0.5 * level);
  const int T = trajectory.T();

  // Forecast moments beyond T, propagated once up to the largest horizon.
  int max_t = 0;
  for (const auto& tgt : targets) {
    if (tgt.t <= 0) throw ConfigError("predict_st: target time must be >= 1");
    max_t = std::max(max_t, tgt.t);
  }
  std::vector<Eigen::VectorXd> fc_mean;
  std::vector<Eigen::MatrixXd> fc_cov;
  if (max_t > T) {
    Eigen::VectorXd m = trajectory.mean[T - 1];
    Eigen::MatrixXd p = trajectory.cov[T - 1];
    for (int h = 0; h < max_t - T; ++h) {
      m = model.propagator * m;
      p = model.propagator * p * model.propagator.transpose() + model.innovation_cov;
      fc_mean.push_back(m);
      fc_cov.push_back(p);
    }
  }

  std::vector<PredictiveResult> out;
  out.reserve(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) {
    const auto& tgt = targets[i];
    const Eigen::VectorXd phi = model.spatial_basis.eval(tgt.s);
    const Eigen::VectorXd& m = tgt.t <= T ? trajectory.mean[tgt.t - 1] : fc_mean[tgt.t - T - 1];
    const Eigen::MatrixXd& p = tgt.t <= T ? trajectory.cov[tgt.t - 1] : fc_cov[tgt.t - T - 1];

    const double offset = with_x ? x_targets->row(static_cast<long>(i)).dot(model.beta) : 0.0;
    const double mean = offset + phi.dot(m);
    double variance = phi.dot(p * phi) + model.noise.sigma2_delta;
    if (variance < 0.0) variance = 0.0;
    const double half = zq * std::sqrt(variance);
    out.push_back({mean, variance, mean - half, mean + half});
  }
  return out;
}

TransientGrowthDiag transient_growth_diag(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ConfigError("transient growth: matrix must be square");
  const double fro2 = m.squaredNorm();
  const double dev = (m.transpose() * m - m * m.transpose()).norm();
  TransientGrowthDiag diag;
  diag.is_normal = dev <= 1e-10 * fro2;
  const double smax = m.jacobiSvd().singularValues().maxCoeff();
  diag.max_amplification = smax * smax;
  return diag;
}

std::vector<PredictiveResult> descriptive_st_predict(
    const BasisSet& st_basis, const KModel& k_model, const NoiseParams& noise,
    const StDataset& data, const std::vector<std::pair<Location, double>>& targets, double level,
    const Eigen::VectorXd& beta, const std::optional<Eigen::MatrixXd>& x_targets) {
  data.validate();
  if (targets.empty()) throw ConfigError("descriptive predict: no targets");

  // Flatten the slices over the (s, t) product domain, time coordinate last.
  SpatialDataset flat;
  long total = 0;
  for (const auto& slice : data.slices) total += slice.n();
  if (total < 1) throw ConfigError("descriptive predict: no observations");
  flat.z.resize(total);
  const int p = data.slices.front().p();
  if (p > 0) flat.covariates.resize(total, p);
  long at = 0;
  for (int t = 0; t < data.T(); ++t) {
    const auto& slice = data.slices[t];
    for (int i = 0; i < slice.n(); ++i) {
      Eigen::VectorXd c(slice.dim() + 1);
      c.head(slice.dim()) = slice.locations[i].coords;
      c[slice.dim()] = data.times[t];
      flat.locations.emplace_back(std::move(c));
      flat.z[at] = slice.z[i];
      if (p > 0) flat.covariates.row(at) = slice.covariates.row(i);
      ++at;
    }
  }

  std::vector<Location> flat_targets;
  flat_targets.reserve(targets.size());
  for (const auto& [s, time] : targets) {
    Eigen::VectorXd c(s.dim() + 1);
    c.head(s.dim()) = s.coords;
    c[s.dim()] = time;
    flat_targets.emplace_back(std::move(c));
  }

  SreParams params;
  params.beta = beta;
  params.k_model = k_model;
  params.noise = noise;
  return predict(flat, st_basis, params, flat_targets, level, x_targets);
}

}  // namespace frk
