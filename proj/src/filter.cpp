#include "kinlna/filter.hpp"

#include <cmath>
#include <limits>

#include "kinlna/errors.hpp"
#include "kinlna/linalg.hpp"

namespace kinlna {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct InnovationSolve {
  Matrix s;           // jittered innovation covariance
  Eigen::LLT<Matrix> llt;
  double logdet = 0.0;
};

InnovationSolve factor_innovation(const Matrix& raw) {
  InnovationSolve out;
  out.s = symmetrize(raw);
  jitter_if_degenerate(out.s);
  out.llt.compute(out.s);
  if (out.llt.info() != Eigen::Success)
    throw Error(ErrorKind::FilterFailure,
                "innovation covariance not positive definite after jitter");
  for (int i = 0; i < out.s.rows(); ++i)
    out.logdet += 2.0 * std::log(out.llt.matrixL()(i, i));
  return out;
}

} // namespace

std::pair<GaussianDist, double> kalman_update(const GaussianDist& pred,
                                              const Matrix& P, const Matrix& V,
                                              const Vector& y) {
  const Matrix& sigma = pred.cov;
  Matrix cross = sigma * P.transpose(); // n x d
  InnovationSolve inn = factor_innovation(P * cross + V);

  Vector resid = y - P * pred.mean;
  Vector alpha = inn.llt.solve(resid);          // S^{-1} r
  Matrix gain_t = inn.llt.solve(cross.transpose()); // S^{-1} P Sigma

  GaussianDist post;
  post.mean = pred.mean + cross * alpha;
  post.cov = symmetrize(sigma - cross * gain_t);

  double d = static_cast<double>(y.size());
  double logpred =
      -0.5 * (d * std::log(2.0 * M_PI) + inn.logdet + resid.dot(alpha));
  return {post, logpred};
}

FilterResult loglik_fully_observed(const ReactionNetwork& net,
                                   const Vector& theta,
                                   const ObservationSeries& series,
                                   const IntegratorConfig& cfg) {
  const int n = net.num_species();
  series.validate(n);
  FilterResult result;
  result.dropped_y0_term = true; // exact full observation fixes x_0
  result.filtered.push_back({series.observations[0], Matrix::Zero(n, n)});

  for (size_t i = 1; i < series.times.size(); ++i) {
    double dt = series.times[i] - series.times[i - 1];
    GaussianDist trans = lna_transition_density(
        net, theta, series.observations[i - 1], dt, cfg);
    Matrix c = symmetrize(trans.cov);
    bool jittered = jitter_if_degenerate(c);
    Vector resid = series.observations[i] - trans.mean;
    if (jittered && resid.norm() > 1e-6 * std::max(1.0, trans.mean.norm())) {
      // Observation off the degenerate manifold: density is zero.
      result.loglik = kNegInf;
      result.degenerate = true;
      return result;
    }
    result.loglik += gaussian_logpdf(series.observations[i], trans.mean, c);
    result.predictive.push_back({trans.mean, c});
    result.filtered.push_back({series.observations[i], Matrix::Zero(n, n)});
  }
  return result;
}

FilterResult loglik_lna_filter(const ReactionNetwork& net, const Vector& theta,
                               const ObservationModel& obs,
                               const ObservationSeries& series,
                               const IntegratorConfig& cfg) {
  obs.validate();
  series.validate(obs.obs_dim());
  if (obs.state_dim() != net.num_species())
    throw Error(ErrorKind::UsageError, "observation model state dim mismatch");

  FilterResult result;
  const Matrix& P = obs.P;
  const Matrix& V = obs.V;

  // The y_0 term. With a point-mass prior observed exactly the term is a
  // theta-independent constant and is dropped (flagged); an inconsistent
  // observation in that case has zero density.
  bool point_mass = obs.sigma0.isZero(0.0) && V.isZero(0.0);
  GaussianDist state{obs.mu0, obs.sigma0};
  if (point_mass) {
    Vector resid = series.observations[0] - P * obs.mu0;
    if (resid.norm() > 1e-8 * std::max(1.0, series.observations[0].norm())) {
      result.loglik = kNegInf;
      result.degenerate = true;
      return result;
    }
    result.dropped_y0_term = true;
    result.filtered.push_back(state);
  } else {
    auto [post, logpred] = kalman_update(state, P, V, series.observations[0]);
    result.loglik += logpred;
    state = post;
    result.filtered.push_back(state);
  }

  for (size_t i = 1; i < series.times.size(); ++i) {
    double dt = series.times[i] - series.times[i - 1];
    // The restart: eta is re-seeded at the filtered mean each interval.
    Vector eta = state.mean;
    Matrix psi = state.cov;
    try {
      lna_predict(net, theta, eta, psi, dt, cfg);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (interval " +
                                std::to_string(i) + ")");
    }
    GaussianDist pred{eta, psi};
    result.predictive.push_back(
        {P * eta, symmetrize(P * psi * P.transpose() + V)});
    auto [post, logpred] = kalman_update(pred, P, V, series.observations[i]);
    result.loglik += logpred;
    state = post;
    result.filtered.push_back(state);
  }
  return result;
}

FilterResult loglik_lna_global(const ReactionNetwork& net, const Vector& theta,
                               const Vector& x0, const ObservationModel& obs,
                               const ObservationSeries& series,
                               const IntegratorConfig& cfg) {
  obs.validate();
  series.validate(obs.obs_dim());
  if (obs.state_dim() != net.num_species() || x0.size() != net.num_species())
    throw Error(ErrorKind::UsageError, "dimension mismatch");

  FilterResult result;
  const Matrix& P = obs.P;
  const Matrix& V = obs.V;

  // eta follows the single deterministic path from x0; the state estimate is
  // eta + m with covariance psi.
  Vector eta = x0;
  Vector m = obs.mu0 - x0;
  Matrix psi = obs.sigma0;

  bool point_mass = obs.sigma0.isZero(0.0) && V.isZero(0.0);
  if (point_mass) {
    Vector resid = series.observations[0] - P * obs.mu0;
    if (resid.norm() > 1e-8 * std::max(1.0, series.observations[0].norm())) {
      result.loglik = kNegInf;
      result.degenerate = true;
      return result;
    }
    result.dropped_y0_term = true;
    result.filtered.push_back({eta + m, psi});
  } else {
    GaussianDist state{eta + m, psi};
    auto [post, logpred] = kalman_update(state, P, V, series.observations[0]);
    result.loglik += logpred;
    m = post.mean - eta;
    psi = post.cov;
    result.filtered.push_back(post);
  }

  for (size_t i = 1; i < series.times.size(); ++i) {
    double dt = series.times[i] - series.times[i - 1];
    try {
      lna_predict_global(net, theta, eta, m, psi, dt, cfg);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (interval " +
                                std::to_string(i) + ")");
    }
    GaussianDist pred{eta + m, psi};
    result.predictive.push_back(
        {P * pred.mean, symmetrize(P * psi * P.transpose() + V)});
    auto [post, logpred] = kalman_update(pred, P, V, series.observations[i]);
    result.loglik += logpred;
    m = post.mean - eta;
    psi = post.cov;
    result.filtered.push_back(post);
  }
  return result;
}

double loglik_ode_gauss(const ReactionNetwork& net, const Vector& theta,
                        const Vector& x0, double sigma2,
                        const ObservationModel& obs,
                        const ObservationSeries& series,
                        const IntegratorConfig& cfg) {
  if (!(sigma2 > 0))
    throw Error(ErrorKind::UsageError, "sigma2 must be positive");
  obs.validate();
  series.validate(obs.obs_dim());

  const int d = obs.obs_dim();
  double loglik = 0.0;
  double t0 = series.times.front();
  OdeField field = [&](double, const Eigen::VectorXd& y) {
    return net.drift(y, theta);
  };
  size_t idx = 0;
  integrate_ode_observed(
      field, x0, t0, series.times.back(), series.times,
      [&](double, const Eigen::VectorXd& eta) {
        Vector resid = series.observations[idx] - obs.P * eta;
        loglik += -0.5 * (d * std::log(2.0 * M_PI * sigma2) +
                          resid.squaredNorm() / sigma2);
        ++idx;
      },
      cfg);
  return loglik;
}

} // namespace kinlna
