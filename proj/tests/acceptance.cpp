// End-to-end acceptance checks. Each check prints exactly one PASS/FAIL line;
// the exit code is the number of failures. Individual checks can be selected
// by number on the command line (default: all).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kinlna/datasets.hpp"
#include "kinlna/errors.hpp"
#include "kinlna/filter.hpp"
#include "kinlna/linalg.hpp"
#include "kinlna/lna.hpp"
#include "kinlna/mcmc.hpp"
#include "kinlna/network.hpp"
#include "kinlna/rng.hpp"
#include "kinlna/sim.hpp"

using namespace kinlna;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  template <typename T> Check& operator<<(const T& v) {
    detail << v;
    return *this;
  }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// --------------------------------------------------------------------------
// 1. Linear test system: stationary variance of dX = -X dt + dW after t = 1.

Check check_linear_variance() {
  Check c;
  ReactionNetwork net = parse_network(
      "species X\nparam c\n"
      "reaction: X -> 0 @ (X + c) / 2\n"
      "reaction: 0 -> X @ (c - X) / 2\n");
  Vector eta = vec({0.0});
  Matrix psi = Matrix::Zero(1, 1);
  lna_predict(net, vec({1.0}), eta, psi, 1.0);
  double expected = (1.0 - std::exp(-2.0)) / 2.0;
  double err = std::abs(psi(0, 0) - expected);
  c << "Psi(1) = " << psi(0, 0) << ", closed form " << expected
    << ", |err| = " << err;
  c.require(err < 1e-6, "|err| < 1e-6");
  return c;
}

// --------------------------------------------------------------------------
// 2. LV residual SDE: the covariance ODE against Euler-Maruyama Monte Carlo
//    of dM = F(eta) M dt + S(eta) dW along the deterministic path.

Check check_residual_sde_covariance() {
  Check c;
  BuiltinModel m = builtin("lotka-volterra");
  const double t_end = 0.5, dt = 1e-3;
  const int reps = 10000, steps = static_cast<int>(std::round(t_end / dt));

  // Deterministic path on the EM grid.
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = k * dt;
  std::vector<Vector> eta_path(steps + 1);
  OdeField field = [&](double, const Eigen::VectorXd& y) {
    return m.network.drift(y, m.theta);
  };
  size_t idx = 0;
  IntegratorConfig tight{1e-10, 1e-12, 1000000};
  integrate_ode_observed(field, m.x0, 0.0, t_end, grid,
                         [&](double, const Eigen::VectorXd& y) {
                           eta_path[idx++] = y;
                         },
                         tight);

  // Frozen per-step coefficients.
  std::vector<Matrix> f_path(steps), s_path(steps);
  for (int k = 0; k < steps; ++k) {
    f_path[k] = m.network.drift_jacobian(eta_path[k], m.theta);
    s_path[k] = psd_sqrt(m.network.diffusion_matrix(eta_path[k], m.theta));
  }

  Matrix sum = Matrix::Zero(2, 2);
  std::vector<Vector> finals(reps);
  double sqdt = std::sqrt(dt);
  for (int r = 0; r < reps; ++r) {
    Rng sub = Rng::substream(2025, static_cast<uint64_t>(r));
    Vector mres = Vector::Zero(2);
    Vector z(2);
    for (int k = 0; k < steps; ++k) {
      z[0] = sub.normal();
      z[1] = sub.normal();
      mres += f_path[k] * mres * dt + s_path[k] * (sqdt * z);
    }
    finals[r] = mres;
    sum += mres * mres.transpose();
  }
  Matrix mc_cov = sum / (reps - 1);

  Vector eta = m.x0;
  Matrix psi = Matrix::Zero(2, 2);
  lna_predict(m.network, m.theta, eta, psi, t_end, tight);

  double worst = 0.0;
  bool all_in = true;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double se = std::sqrt((psi(i, i) * psi(j, j) + psi(i, j) * psi(i, j)) /
                            reps);
      double z = std::abs(mc_cov(i, j) - psi(i, j)) / se;
      worst = std::max(worst, z);
      if (z > 3.0) all_in = false;
    }
  c << "Psi(0.5) diag = (" << psi(0, 0) << ", " << psi(1, 1)
    << "), MC diag = (" << mc_cov(0, 0) << ", " << mc_cov(1, 1)
    << "), worst |z| = " << worst;
  c.require(all_in, "every entry within 3 MC standard errors");
  return c;
}

// --------------------------------------------------------------------------
// 3. Autoregulatory network at two system sizes: LNA moments against an SSA
//    oracle at t = 0.5.

Check check_autoreg_scaling() {
  Check c;
  const int reps = 10000;
  struct Setup {
    double omega;
    double sd_tol;
  };
  for (Setup setup : {Setup{100.0, 0.15}, Setup{10.0, 0.25}}) {
    BuiltinModel m = builtin("autoreg", setup.omega);
    EmpiricalTransition ssa = empirical_transition(
        m.network, m.theta, m.x0, 0.5, reps, SimMethod::Exact,
        static_cast<uint64_t>(setup.omega));
    GaussianDist lna = lna_transition_density(m.network, m.theta, m.x0, 0.5);
    for (int j = 0; j < 4; ++j) {
      double ssa_sd = std::sqrt(ssa.cov(j, j));
      double lna_sd = std::sqrt(std::max(0.0, lna.cov(j, j)));
      double mean_gap = std::abs(lna.mean[j] - ssa.mean[j]);
      double sd_gap = std::abs(lna_sd - ssa_sd) / ssa_sd;
      c.require(mean_gap <= 0.10 * ssa_sd,
                "Omega=" + std::to_string(int(setup.omega)) + " species " +
                    std::to_string(j + 1) + " mean gap " +
                    std::to_string(mean_gap) + " <= 10% of sd " +
                    std::to_string(ssa_sd));
      c.require(sd_gap <= setup.sd_tol,
                "Omega=" + std::to_string(int(setup.omega)) + " species " +
                    std::to_string(j + 1) + " sd rel gap " +
                    std::to_string(sd_gap));
    }
    c << "Omega=" << setup.omega << " mean(LNA)=("
      << lna.mean.transpose() << ") mean(SSA)=(" << ssa.mean.transpose()
      << "); ";
  }
  return c;
}

// --------------------------------------------------------------------------
// Shared epidemic / LV inference plumbing.

ObservationModel smallpox_obs_model() {
  ObservationModel obs;
  obs.P = Matrix(1, 2);
  obs.P << 1, 1;
  obs.V = Matrix::Zero(1, 1);
  obs.mu0 = vec({1, 118});
  obs.sigma0 = Matrix::Zero(2, 2);
  return obs;
}

LogPost make_logpost(const ReactionNetwork& net, const PriorSpec& prior,
                     const ObservationModel& obs, const ObservationSeries& data,
                     const std::string& engine, const Vector& x0,
                     double sigma2) {
  // Pathological proposals (stiff or exploding dynamics) are scored -inf
  // instead of exhausting the default step budget.
  IntegratorConfig cfg;
  cfg.max_steps = 5000;
  return [&net, prior, obs, data, engine, x0, sigma2, cfg](const Vector& u) {
    double lp = log_prior(prior, u);
    if (!std::isfinite(lp)) return lp;
    Vector theta(u.size());
    for (int j = 0; j < u.size(); ++j) theta[j] = std::pow(10.0, u[j]);
    try {
      if (engine == "restart")
        return lp + loglik_lna_filter(net, theta, obs, data, cfg).loglik;
      if (engine == "global")
        return lp + loglik_lna_global(net, theta, x0, obs, data, cfg).loglik;
      return lp + loglik_ode_gauss(net, theta, x0, sigma2, obs, data, cfg);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
}

// --------------------------------------------------------------------------
// 4. Smallpox outbreak reanalysis with half-Cauchy(100) priors.

Check check_smallpox() {
  Check c;
  BuiltinModel m = builtin("sir");
  ObservationSeries data = smallpox_series();
  ObservationModel obs = smallpox_obs_model();
  PriorSpec prior;
  prior.entries = {PriorSpec::halfcauchy(100.0), PriorSpec::halfcauchy(100.0)};

  LogPost logpost =
      make_logpost(m.network, prior, obs, data, "restart", vec({1, 118}), 0);
  Vector u0 = vec({std::log10(0.001), std::log10(0.1)});
  TuneResult tuned = tune_proposal(logpost, u0, 101);
  const int iters = 100000, burnin = 20000;
  SampleChain chain = rwm_chain(logpost, u0, tuned.proposal_cov, iters, 102);
  ChainSummary s = summarize(chain, {"log10_theta1", "log10_theta2"}, burnin);

  struct Target {
    double median, lo, hi;
  };
  Target targets[2] = {{-3.06, -3.16, -2.95}, {-1.13, -1.32, -0.95}};
  for (int j = 0; j < 2; ++j) {
    const ParamSummary& p = s.params[static_cast<size_t>(j)];
    c << p.name << ": median " << p.median << " (target "
      << targets[j].median << "), CI [" << p.q025 << ", " << p.q975
      << "] (target [" << targets[j].lo << ", " << targets[j].hi << "]); ";
    c.require(std::abs(p.median - targets[j].median) <= 0.05,
              p.name + " median within 0.05");
    c.require(std::abs(p.q025 - targets[j].lo) <= 0.08,
              p.name + " lower CI within 0.08");
    c.require(std::abs(p.q975 - targets[j].hi) <= 0.08,
              p.name + " upper CI within 0.08");
  }
  c << "acceptance " << s.acceptance_rate << ", tuned " << tuned.converged;
  return c;
}

// --------------------------------------------------------------------------
// 5. LV simulation study (desk scale): 20 datasets, prey unobserved,
//    restart vs global vs ODE engines.

struct LvDataset {
  ObservationSeries data;
};

LvDataset simulate_lv_dataset(const BuiltinModel& m, uint64_t seed) {
  std::vector<double> grid;
  for (int t = 0; t <= 30; ++t) grid.push_back(t);
  for (;; seed += 100000) {
    // The study keeps full 30-second windows: skip runs where a species
    // goes extinct before the end.
    Trajectory traj = ssa_trajectory(m.network, m.theta, m.x0, 30.0, seed);
    auto states = sample_at_times(traj, grid);
    bool extinct = false;
    for (const Vector& s : states)
      if (s.minCoeff() <= 0) extinct = true;
    if (extinct) continue;
    LvDataset d;
    for (int t = 0; t <= 30; ++t) {
      d.data.times.push_back(t);
      d.data.observations.push_back(vec({states[static_cast<size_t>(t)][0]}));
    }
    return d;
  }
}

ObservationModel lv_obs_model() {
  // Predators observed exactly, prey unobserved; initial prey pinned at its
  // true value, predator prior variance collapsed by the exact y_0 update.
  ObservationModel obs;
  obs.P = Matrix(1, 2);
  obs.P << 1, 0;
  obs.V = Matrix::Zero(1, 1);
  obs.mu0 = vec({40, 140});
  obs.sigma0 = Matrix::Zero(2, 2);
  obs.sigma0(1, 1) = 100.0;
  return obs;
}

Check check_lv_study() {
  Check c;
  BuiltinModel m = builtin("lotka-volterra");
  ObservationModel obs = lv_obs_model();
  PriorSpec prior;
  prior.entries = {PriorSpec::gamma(2, 10), PriorSpec::gamma(2, 10),
                   PriorSpec::gamma(2, 10)};
  Vector truth_log = vec({std::log10(0.01), std::log10(0.6), std::log10(0.3)});
  const double ode_sigma2 = 25.0;
  const int n_data = 20, iters = 12000, burnin = 2000;
  const char* engines[3] = {"restart", "global", "ode"};

  std::vector<LvDataset> datasets;
  for (int d = 0; d < n_data; ++d)
    datasets.push_back(simulate_lv_dataset(m, 40000 + static_cast<uint64_t>(d)));

  // One proposal per engine, tuned on the first dataset and reused.
  Matrix proposals[3];
  for (int e = 0; e < 3; ++e) {
    LogPost lp = make_logpost(m.network, prior, obs, datasets[0].data,
                              engines[e], m.x0, ode_sigma2);
    proposals[e] = tune_proposal(lp, truth_log, 500 + e).proposal_cov;
  }

  // medians[e](d, j)
  Matrix medians[3];
  for (auto& mm : medians) mm = Matrix::Zero(n_data, 3);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int d = next.fetch_add(1);
      if (d >= n_data) return;
      for (int e = 0; e < 3; ++e) {
        LogPost lp = make_logpost(m.network, prior, obs, datasets[static_cast<size_t>(d)].data,
                                  engines[e], m.x0, ode_sigma2);
        SampleChain chain =
            rwm_chain(lp, truth_log, proposals[e], iters,
                      9000 + static_cast<uint64_t>(d) * 10 + static_cast<uint64_t>(e));
        ChainSummary s = summarize(chain, {"t1", "t2", "t3"}, burnin);
        for (int j = 0; j < 3; ++j)
          medians[e](d, j) = s.params[static_cast<size_t>(j)].median;
      }
    }
  };
  unsigned hw = std::max(2u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < std::min(hw, 8u); ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  double mean_median_t1 = medians[0].col(0).mean();
  c << "restart mean median log10(theta1) = " << mean_median_t1 << "; ";
  c.require(std::abs(mean_median_t1 - (-2.0)) <= 0.1,
            "mean median of log10 theta1 within 0.1 of -2");

  int restart_wins = 0;
  for (int j = 0; j < 3; ++j) {
    double mae[3];
    for (int e = 0; e < 3; ++e)
      mae[e] = (medians[e].col(j).array() - truth_log[j]).abs().mean();
    c << "param " << j + 1 << " MAE restart/global/ode = " << mae[0] << "/"
      << mae[1] << "/" << mae[2] << "; ";
    if (mae[0] < mae[1] && mae[0] < mae[2]) ++restart_wins;
  }
  c.require(restart_wins >= 2, "restart MAE smallest for at least 2 of 3 params");
  return c;
}

// --------------------------------------------------------------------------
// 6. Restart vs global one-step predictive error on one LV dataset.

Check check_divergence() {
  Check c;
  BuiltinModel m = builtin("lotka-volterra");
  LvDataset d = simulate_lv_dataset(m, 17);
  ObservationModel obs = lv_obs_model();

  FilterResult restart = loglik_lna_filter(m.network, m.theta, obs, d.data);
  FilterResult global =
      loglik_lna_global(m.network, m.theta, m.x0, obs, d.data);

  auto mse = [&](const FilterResult& r) {
    double s = 0.0;
    for (size_t i = 0; i < r.predictive.size(); ++i) {
      Vector resid = d.data.observations[i + 1] - r.predictive[i].mean;
      s += resid.squaredNorm();
    }
    return s / static_cast<double>(r.predictive.size());
  };
  double mse_restart = mse(restart), mse_global = mse(global);
  c << "one-step predictive MSE restart = " << mse_restart
    << ", global = " << mse_global;
  c.require(mse_global > mse_restart, "global MSE exceeds restart MSE");
  return c;
}

// --------------------------------------------------------------------------
// 7. MCMC sanity suite.

Check check_mcmc_sanity() {
  Check c;

  auto flat = [](const Vector&) { return 0.0; };
  SampleChain fc = rwm_chain(flat, vec({0.0}), Matrix::Identity(1, 1), 5000, 1);
  c << "flat acceptance " << fc.acceptance_rate() << "; ";
  c.require(fc.accept_count == fc.iters(), "flat-target acceptance = 1");

  auto normal1d = [](const Vector& u) { return -0.5 * u.squaredNorm(); };
  SampleChain nc = rwm_chain(normal1d, vec({0.0}),
                             Matrix::Identity(1, 1) * (2.38 * 2.38), 50000, 2);
  double mean = nc.draws.col(0).mean();
  double var = (nc.draws.col(0).array() - mean).square().mean();
  c << "normal target mean " << mean << " var " << var << "; ";
  c.require(std::abs(mean) < 0.05, "normal mean within 0.05 of 0");
  c.require(std::abs(var - 1.0) < 0.07, "normal variance within 0.07 of 1");

  BuiltinModel m = builtin("lotka-volterra");
  LvDataset d = simulate_lv_dataset(m, 888);
  ObservationModel obs = lv_obs_model();
  PriorSpec prior;
  prior.entries = {PriorSpec::gamma(2, 10), PriorSpec::gamma(2, 10),
                   PriorSpec::gamma(2, 10)};
  LogPost lp = make_logpost(m.network, prior, obs, d.data, "restart",
                            m.x0, 25.0);
  Vector truth_log = vec({std::log10(0.01), std::log10(0.6), std::log10(0.3)});
  TuneResult tuned = tune_proposal(lp, truth_log, 3);
  SampleChain lv_chain = rwm_chain(lp, truth_log, tuned.proposal_cov, 20000, 4);
  c << "tuned LV acceptance " << lv_chain.acceptance_rate() << "; ";
  c.require(lv_chain.acceptance_rate() >= 0.23 &&
                lv_chain.acceptance_rate() <= 0.32,
            "tuned LV acceptance in [0.23, 0.32]");

  Rng rng(5);
  std::vector<double> iid(50000);
  for (double& v : iid) v = rng.normal();
  double iid_ratio = ess(iid).ess / 50000.0;
  c << "iid ESS/N " << iid_ratio << "; ";
  c.require(iid_ratio >= 0.9 && iid_ratio <= 1.1, "iid ESS/N in [0.9, 1.1]");

  double rho = 0.6;
  std::vector<double> ar(200000);
  double x = 0.0;
  for (double& v : ar) {
    x = rho * x + rng.normal();
    v = x;
  }
  double expected = 200000.0 * (1 - rho) / (1 + rho);
  double got = ess(ar).ess;
  c << "AR(1) ESS " << got << " (expected ~" << expected << ")";
  c.require(std::abs(got - expected) <= 0.2 * expected,
            "AR(1) ESS within 20% of (1-rho)/(1+rho)");
  return c;
}

// --------------------------------------------------------------------------
// 8. The standalone property suite passes on its own.

Check check_properties_standalone() {
  Check c;
  std::string cmd = std::string(KINLNA_PROPERTIES_PATH);
  int rc = std::system(cmd.c_str());
  int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  c << "property suite exit code " << code;
  c.require(code == 0, "property suite exits 0");
  return c;
}

} // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int number;
    const char* name;
    Check (*run)();
  };
  const Criterion criteria[] = {
      {1, "linear-system stationary variance", check_linear_variance},
      {2, "LV residual-SDE covariance equivalence", check_residual_sde_covariance},
      {3, "autoregulatory network LNA vs SSA", check_autoreg_scaling},
      {4, "smallpox outbreak posterior", check_smallpox},
      {5, "LV simulation study", check_lv_study},
      {6, "restart vs global predictive divergence", check_divergence},
      {7, "MCMC sanity suite", check_mcmc_sanity},
      {8, "standalone property suites", check_properties_standalone},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& cr : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), cr.number) == selected.end())
      continue;
    Check c = cr.run();
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << cr.number << " ("
              << cr.name << "): " << c.detail.str() << std::endl;
    if (!c.ok) ++failures;
  }
  return failures;
}
