#ifndef KINLNA_MCMC_HPP
#define KINLNA_MCMC_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kinlna/network.hpp"

namespace kinlna {

/// Per-parameter prior on the natural (theta > 0) scale.
struct PriorEntry {
  enum class Family { Gamma, HalfCauchy };
  Family family;
  double a = 0; // gamma shape, or half-cauchy scale c
  double b = 0; // gamma rate
};

struct PriorSpec {
  std::vector<PriorEntry> entries; // one per parameter, in theta order

  static PriorEntry gamma(double shape, double rate);
  static PriorEntry halfcauchy(double c);
};

/// Log prior density of the chain state u = log10(theta), including the
/// change-of-variables term log(theta_j) + log(ln 10) per coordinate.
/// Set include_jacobian = false only for sensitivity checks. Returns -inf
/// outside the support.
double log_prior(const PriorSpec& prior, const Vector& u_log10,
                 bool include_jacobian = true);

using LogPost = std::function<double(const Vector&)>;

struct SampleChain {
  Matrix draws;        // iters x n_p, log10-parameter values
  Vector logposts;     // iters
  long accept_count = 0;
  Matrix proposal_cov; // n_p x n_p
  int iters() const { return static_cast<int>(draws.rows()); }
  double acceptance_rate() const {
    return static_cast<double>(accept_count) / std::max(1, iters());
  }
};

/// Random-walk Metropolis with a single block Gaussian proposal; stores
/// every state. Deterministic given the seed.
SampleChain rwm_chain(const LogPost& logpost, const Vector& theta0_log,
                      const Matrix& proposal_cov, int iters, uint64_t seed);

struct TuneResult {
  Matrix proposal_cov;
  double acceptance = 0.0; // of the final probe
  bool converged = false;  // acceptance landed in [0.25, 0.30]
  int rounds = 0;
};

/// Pilot tuning: bisects a global scale on an isotropic covariance, then on
/// the pilot empirical covariance, probing with 5000-iteration chains until
/// the acceptance rate falls in [0.25, 0.30]; at most 20 probe rounds, else
/// the best covariance seen so far is returned with converged = false.
TuneResult tune_proposal(const LogPost& logpost, const Vector& theta0_log,
                         uint64_t seed);

struct EssResult {
  double ess = 1.0;
  bool degenerate = false; // zero-variance series
};

/// Effective sample size N / (1 + 2 sum rho_k) with the autocorrelation sum
/// truncated by the initial-positive-sequence rule; clipped to [1, N].
EssResult ess(const std::vector<double>& series);

struct ParamSummary {
  std::string name;
  double median, q025, q975, ess;
};

struct ChainSummary {
  std::vector<ParamSummary> params;
  double acceptance_rate = 0.0;
};

/// Empirical quantiles (linear interpolation) of post-burnin draws on the
/// log10 scale.
ChainSummary summarize(const SampleChain& chain,
                       const std::vector<std::string>& param_names, int burnin);

} // namespace kinlna

#endif
