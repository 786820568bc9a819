#include "kinlna/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinlna/errors.hpp"
#include "kinlna/linalg.hpp"
#include "kinlna/rng.hpp"

namespace kinlna {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn10 = 2.302585092994045684;
} // namespace

PriorEntry PriorSpec::gamma(double shape, double rate) {
  if (!(shape > 0) || !(rate > 0))
    throw Error(ErrorKind::UsageError, "gamma prior needs positive shape/rate");
  return {PriorEntry::Family::Gamma, shape, rate};
}

PriorEntry PriorSpec::halfcauchy(double c) {
  if (!(c > 0))
    throw Error(ErrorKind::UsageError, "half-cauchy prior needs positive scale");
  return {PriorEntry::Family::HalfCauchy, c, 0.0};
}

double log_prior(const PriorSpec& prior, const Vector& u_log10,
                 bool include_jacobian) {
  if (static_cast<int>(prior.entries.size()) != u_log10.size())
    throw Error(ErrorKind::UsageError, "prior/parameter count mismatch");
  double lp = 0.0;
  for (int j = 0; j < u_log10.size(); ++j) {
    double theta = std::pow(10.0, u_log10[j]);
    if (!(theta > 0) || !std::isfinite(theta)) return kNegInf;
    const PriorEntry& e = prior.entries[static_cast<size_t>(j)];
    switch (e.family) {
    case PriorEntry::Family::Gamma:
      lp += e.a * std::log(e.b) - std::lgamma(e.a) +
            (e.a - 1.0) * std::log(theta) - e.b * theta;
      break;
    case PriorEntry::Family::HalfCauchy:
      // pi(theta) = 2c / (pi (1 + (c theta)^2)) on theta > 0
      lp += std::log(2.0 * e.a / M_PI) - std::log1p(e.a * e.a * theta * theta);
      break;
    }
    if (include_jacobian) lp += std::log(theta) + std::log(kLn10);
  }
  return lp;
}

SampleChain rwm_chain(const LogPost& logpost, const Vector& theta0_log,
                      const Matrix& proposal_cov, int iters, uint64_t seed) {
  if (iters < 1)
    throw Error(ErrorKind::UsageError, "iters must be >= 1");
  const int np = static_cast<int>(theta0_log.size());
  double lp = logpost(theta0_log);
  if (!std::isfinite(lp))
    throw Error(ErrorKind::UsageError, "log posterior not finite at theta0");

  Matrix chol = psd_sqrt(proposal_cov);
  Rng rng(seed);

  SampleChain chain;
  chain.draws.resize(iters, np);
  chain.logposts.resize(iters);
  chain.proposal_cov = proposal_cov;

  Vector current = theta0_log;
  Vector z(np);
  for (int it = 0; it < iters; ++it) {
    for (int j = 0; j < np; ++j) z[j] = rng.normal();
    Vector proposal = current + chol * z;
    double lp_prop = logpost(proposal);
    double log_alpha = lp_prop - lp;
    double u = rng.uniform_pos();
    if (std::log(u) < log_alpha) {
      current = proposal;
      lp = lp_prop;
      ++chain.accept_count;
    }
    chain.draws.row(it) = current.transpose();
    chain.logposts[it] = lp;
  }
  return chain;
}

TuneResult tune_proposal(const LogPost& logpost, const Vector& theta0_log,
                         uint64_t seed) {
  const int np = static_cast<int>(theta0_log.size());
  const int probe_iters = 5000;
  const int max_rounds = 20;
  constexpr double lo_acc = 0.25, hi_acc = 0.30;

  TuneResult result;
  Matrix shape = Matrix::Identity(np, np);
  double log_s = std::log(0.1); // initial isotropic proposal sd
  double best_dist = std::numeric_limits<double>::infinity();

  // Bracket on log scale: acceptance decreases as scale grows.
  double lo = -std::numeric_limits<double>::infinity(); // acc too high side
  double hi = std::numeric_limits<double>::infinity();  // acc too low side
  bool empirical_phase = false;
  SampleChain last_probe;

  for (int round = 0; round < max_rounds; ++round) {
    result.rounds = round + 1;
    double s = std::exp(log_s);
    Matrix cov = s * s * shape;
    SampleChain probe = rwm_chain(logpost, theta0_log, cov,
                                  probe_iters, seed + static_cast<uint64_t>(round) * 7919u);
    double acc = probe.acceptance_rate();
    double dist = acc < lo_acc ? lo_acc - acc : (acc > hi_acc ? acc - hi_acc : 0.0);
    if (dist < best_dist) {
      best_dist = dist;
      result.proposal_cov = cov;
      result.acceptance = acc;
    }
    if (acc >= lo_acc && acc <= hi_acc) {
      if (empirical_phase) {
        result.proposal_cov = cov;
        result.acceptance = acc;
        result.converged = true;
        return result;
      }
      // Isotropic scale is in range: switch to the probe's empirical
      // covariance and retune the global scale once more.
      empirical_phase = true;
      Matrix centered = probe.draws.rowwise() -
                        probe.draws.colwise().mean();
      Matrix emp = (centered.transpose() * centered) /
                   std::max(1, probe.iters() - 1);
      emp = symmetrize(emp);
      emp.diagonal().array() += 1e-8 * std::max(1.0, emp.trace());
      // Normalize so the scale search restarts near the standard 2.38^2/d.
      shape = emp / std::max(emp.trace() / np, 1e-300);
      log_s = std::log(2.38 / std::sqrt(static_cast<double>(np)));
      lo = -std::numeric_limits<double>::infinity();
      hi = std::numeric_limits<double>::infinity();
      continue;
    }
    if (acc > hi_acc) {
      lo = log_s; // scale too small
      log_s = std::isfinite(hi) ? 0.5 * (lo + hi) : log_s + std::log(4.0);
    } else {
      hi = log_s; // scale too large
      log_s = std::isfinite(lo) ? 0.5 * (lo + hi) : log_s - std::log(4.0);
    }
  }
  return result; // best-so-far, converged = false
}

EssResult ess(const std::vector<double>& series) {
  const size_t n = series.size();
  if (n < 100)
    throw Error(ErrorKind::UsageError, "ess needs at least 100 samples");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  if (var <= 0.0) return {1.0, true};

  auto autocov = [&](size_t k) {
    double s = 0.0;
    for (size_t i = 0; i + k < n; ++i)
      s += (series[i] - mean) * (series[i + k] - mean);
    return s / static_cast<double>(n);
  };

  // Geyer initial-positive-sequence: sum pairs rho_{2m} + rho_{2m+1} while
  // positive.
  double sum_rho = 0.0;
  for (size_t m = 0;; ++m) {
    size_t k1 = 2 * m + 1, k2 = 2 * m + 2;
    if (k1 >= n) break;
    double pair = autocov(k1) / var + (k2 < n ? autocov(k2) / var : 0.0);
    if (pair <= 0.0) break;
    sum_rho += pair;
  }
  double value = static_cast<double>(n) / (1.0 + 2.0 * sum_rho);
  return {std::clamp(value, 1.0, static_cast<double>(n)), false};
}

namespace {

double quantile_linear(std::vector<double> sorted, double q) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double pos = q * static_cast<double>(n - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

} // namespace

ChainSummary summarize(const SampleChain& chain,
                       const std::vector<std::string>& param_names, int burnin) {
  if (burnin < 0 || burnin >= chain.iters())
    throw Error(ErrorKind::UsageError, "burnin must be in [0, iters)");
  const int np = static_cast<int>(chain.draws.cols());
  if (static_cast<int>(param_names.size()) != np)
    throw Error(ErrorKind::UsageError, "param name count mismatch");

  const int kept = chain.iters() - burnin;
  ChainSummary summary;
  for (int j = 0; j < np; ++j) {
    std::vector<double> col(static_cast<size_t>(kept));
    for (int i = 0; i < kept; ++i) col[static_cast<size_t>(i)] = chain.draws(burnin + i, j);
    EssResult e = kept >= 100 ? ess(col) : EssResult{1.0, true};
    std::sort(col.begin(), col.end());
    summary.params.push_back({param_names[static_cast<size_t>(j)],
                              quantile_linear(col, 0.5),
                              quantile_linear(col, 0.025),
                              quantile_linear(col, 0.975), e.ess});
  }
  // Acceptance over post-burnin proposals: count moves among kept draws.
  long moves = 0;
  for (int i = burnin + 1; i < chain.iters(); ++i)
    if (chain.draws.row(i) != chain.draws.row(i - 1)) ++moves;
  summary.acceptance_rate = kept > 1 ? static_cast<double>(moves) / (kept - 1) : 0.0;
  return summary;
}

} // namespace kinlna
