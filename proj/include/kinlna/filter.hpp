#ifndef KINLNA_FILTER_HPP
#define KINLNA_FILTER_HPP

#include "kinlna/lna.hpp"
#include "kinlna/network.hpp"
#include "kinlna/observation.hpp"

namespace kinlna {

struct FilterResult {
  double loglik = 0.0;
  std::vector<GaussianDist> filtered;   // posterior on states, n+1 entries
  std::vector<GaussianDist> predictive; // on observations, n entries
  bool dropped_y0_term = false; // point-mass prior + exact observation
  bool degenerate = false;      // loglik is -inf from a degenerate mismatch
};

/// Kalman measurement update of a Gaussian state prediction against a
/// single observation. Returns the posterior and the log predictive density
/// log N(y; P mu, P Sigma P' + V). Uses symmetric solves, never explicit
/// inversion; the degenerate-innovation jitter convention of
/// jitter_if_degenerate applies.
std::pair<GaussianDist, double> kalman_update(const GaussianDist& pred,
                                              const Matrix& P, const Matrix& V,
                                              const Vector& y);

/// Fully observed LNA log-likelihood: sum of log transition densities
/// N(x_i; eta(dt), Psi(dt)) seeded at x_{i-1}. Observations must be full
/// states (d = n_s). A degenerate transition covariance with an observation
/// off the degenerate manifold yields -inf with result.degenerate set.
FilterResult loglik_fully_observed(const ReactionNetwork& net,
                                   const Vector& theta,
                                   const ObservationSeries& series,
                                   const IntegratorConfig& cfg = {});

/// Restarted-LNA Kalman filter likelihood: the deterministic path is
/// re-seeded at the filtered mean on every interval.
FilterResult loglik_lna_filter(const ReactionNetwork& net, const Vector& theta,
                               const ObservationModel& obs,
                               const ObservationSeries& series,
                               const IntegratorConfig& cfg = {});

/// Global-LNA likelihood: the deterministic path is solved once from x0
/// over the whole window and never restarted; the perturbation mean m
/// carries across observations.
FilterResult loglik_lna_global(const ReactionNetwork& net, const Vector& theta,
                               const Vector& x0, const ObservationModel& obs,
                               const ObservationSeries& series,
                               const IntegratorConfig& cfg = {});

/// ODE baseline: integrates the deterministic path from x0 and scores
/// observations as y_i ~ N(P eta(t_i), sigma2 I).
double loglik_ode_gauss(const ReactionNetwork& net, const Vector& theta,
                        const Vector& x0, double sigma2,
                        const ObservationModel& obs,
                        const ObservationSeries& series,
                        const IntegratorConfig& cfg = {});

} // namespace kinlna

#endif
