#include <doctest.h>

#include <cmath>

#include "kinlna/datasets.hpp"
#include "kinlna/errors.hpp"
#include "kinlna/filter.hpp"
#include "kinlna/linalg.hpp"
#include "kinlna/sim.hpp"

using namespace kinlna;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const char* kOuDsl =
    "species X\nparam c\n"
    "reaction: X -> 0 @ (X + c) / 2\n"
    "reaction: 0 -> X @ (c - X) / 2\n";

ObservationModel full_obs(int n, double vdiag, const Vector& mu0,
                          double sigma0diag) {
  ObservationModel m;
  m.P = Matrix::Identity(n, n);
  m.V = Matrix::Identity(n, n) * vdiag;
  m.mu0 = mu0;
  m.sigma0 = Matrix::Identity(n, n) * sigma0diag;
  return m;
}

} // namespace

TEST_CASE("kalman_update: scalar case by hand") {
  GaussianDist pred{vec({2.0}), Matrix::Constant(1, 1, 4.0)};
  auto [post, logpred] = kalman_update(pred, Matrix::Identity(1, 1),
                                       Matrix::Constant(1, 1, 1.0), vec({3.0}));
  // S = 5, K = 4/5
  CHECK(post.mean[0] == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(post.cov(0, 0) == doctest::Approx(0.8).epsilon(1e-12));
  double expected = -0.5 * (std::log(2 * M_PI * 5.0) + 1.0 / 5.0);
  CHECK(logpred == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kalman_update: partial observation of a 2-state system") {
  Matrix sigma(2, 2);
  sigma << 2, 1, 1, 3;
  GaussianDist pred{vec({1.0, 2.0}), sigma};
  Matrix P(1, 2);
  P << 1, 0;
  auto [post, logpred] =
      kalman_update(pred, P, Matrix::Constant(1, 1, 0.5), vec({2.0}));
  // S = 2.5, K = (2,1)/2.5, residual 1
  CHECK(post.mean.isApprox(vec({1.8, 2.4}), 1e-12));
  // posterior cov = Sigma - K P Sigma: [[2,1],[1,3]] - [[1.6,0.8],[0.8,0.4]]
  Matrix cov_expected(2, 2);
  cov_expected << 0.4, 0.2, 0.2, 2.6;
  CHECK(post.cov.isApprox(cov_expected, 1e-12));
  double expected = -0.5 * (std::log(2 * M_PI * 2.5) + 1.0 / 2.5);
  CHECK(logpred == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kalman_update: exact observation collapses the observed direction") {
  Matrix sigma(2, 2);
  sigma << 2, 1, 1, 3;
  GaussianDist pred{vec({1.0, 2.0}), sigma};
  Matrix P(1, 2);
  P << 1, 0;
  auto [post, logpred] =
      kalman_update(pred, P, Matrix::Zero(1, 1), vec({4.0}));
  CHECK(post.mean[0] == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(std::abs(post.cov(0, 0)) < 1e-10);
  CHECK(std::isfinite(logpred));
}

TEST_CASE("kalman_update: degenerate innovation gets the pinned jitter") {
  GaussianDist pred{vec({2.0}), Matrix::Zero(1, 1)};
  auto [post, logpred] = kalman_update(pred, Matrix::Identity(1, 1),
                                       Matrix::Zero(1, 1), vec({2.0}));
  CHECK(post.mean[0] == doctest::Approx(2.0));
  // jitter = 1e-10 * max(1, trace) = 1e-10; density of an exact hit
  double expected = -0.5 * std::log(2 * M_PI * 1e-10);
  CHECK(logpred == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("fully observed likelihood is the sum of transition logpdfs") {
  BuiltinModel m = builtin("lotka-volterra");
  Trajectory traj = ssa_trajectory(m.network, m.theta, m.x0, 5.0, 31);
  ObservationSeries series;
  for (int t = 0; t <= 5; ++t) {
    series.times.push_back(t);
    series.observations.push_back(sample_at_times(traj, {double(t)})[0]);
  }
  FilterResult res = loglik_fully_observed(m.network, m.theta, series);
  REQUIRE(res.filtered.size() == 6);
  REQUIRE(res.predictive.size() == 5);
  CHECK(res.dropped_y0_term);

  double manual = 0.0;
  for (int i = 1; i <= 5; ++i) {
    GaussianDist d = lna_transition_density(
        m.network, m.theta, series.observations[i - 1], 1.0);
    Matrix c = symmetrize(d.cov);
    jitter_if_degenerate(c);
    manual += gaussian_logpdf(series.observations[i], d.mean, c);
  }
  CHECK(res.loglik == doctest::Approx(manual).epsilon(1e-9));
}

TEST_CASE("fully observed: off-manifold observation under a frozen model") {
  ReactionNetwork net =
      parse_network("species X\nparam t\nreaction: X -> 0 @ 0 * t * X\n");
  ObservationSeries series;
  series.times = {0.0, 1.0};
  series.observations = {vec({5.0}), vec({7.0})}; // cannot move
  FilterResult res = loglik_fully_observed(net, vec({1.0}), series);
  CHECK(res.degenerate);
  CHECK(res.loglik == -std::numeric_limits<double>::infinity());

  series.observations[1] = vec({5.0}); // on the manifold: finite
  FilterResult ok = loglik_fully_observed(net, vec({1.0}), series);
  CHECK_FALSE(ok.degenerate);
  CHECK(std::isfinite(ok.loglik));
}

TEST_CASE("restart filter against an independent scalar Kalman recursion") {
  // Linear SDE dX = -X dt + dW observed with noise: exact discrete-time
  // dynamics are x_i = a x_{i-1} + N(0, q), a = e^{-dt}, q = (1-e^{-2dt})/2,
  // and the LNA is exact here, so the filter must reproduce the textbook
  // scalar Kalman likelihood.
  ReactionNetwork net = parse_network(kOuDsl);
  Vector theta = vec({1.0});
  double dt = 0.7, vobs = 0.25, mu0 = 0.4, s0 = 0.09;
  std::vector<double> ys = {0.5, -0.2, 0.3, 0.1, -0.4};

  ObservationSeries series;
  ObservationModel obs = full_obs(1, vobs, vec({mu0}), s0);
  for (size_t i = 0; i < ys.size(); ++i) {
    series.times.push_back(dt * double(i));
    series.observations.push_back(vec({ys[i]}));
  }
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  FilterResult res = loglik_lna_filter(net, theta, obs, series, cfg);

  double a = std::exp(-dt);
  double q = (1.0 - std::exp(-2 * dt)) / 2.0;
  double mean = mu0, var = s0, manual = 0.0;
  for (size_t i = 0; i < ys.size(); ++i) {
    if (i > 0) {
      mean = a * mean;
      var = a * a * var + q;
    }
    double s = var + vobs;
    double r = ys[i] - mean;
    manual += -0.5 * (std::log(2 * M_PI * s) + r * r / s);
    mean += var / s * r;
    var -= var * var / s;
  }
  CHECK(res.loglik == doctest::Approx(manual).epsilon(1e-8));
  CHECK(res.filtered.back().mean[0] == doctest::Approx(mean).epsilon(1e-7));
  CHECK(res.filtered.back().cov(0, 0) == doctest::Approx(var).epsilon(1e-7));

  // Linear dynamics: the restarted and global filters coincide exactly.
  FilterResult glob = loglik_lna_global(net, theta, vec({mu0}), obs, series, cfg);
  CHECK(glob.loglik == doctest::Approx(manual).epsilon(1e-8));
}

TEST_CASE("point-mass prior with exact observation drops the y0 term") {
  BuiltinModel m = builtin("sir");
  ObservationModel obs;
  obs.P = Matrix(1, 2);
  obs.P << 1, 1;
  obs.V = Matrix::Zero(1, 1);
  obs.mu0 = vec({1, 118});
  obs.sigma0 = Matrix::Zero(2, 2);

  ObservationSeries series;
  series.times = {0.0, 1.0, 2.0};
  series.observations = {vec({119.0}), vec({119.0}), vec({118.0})};
  FilterResult res = loglik_lna_filter(m.network, m.theta, obs, series);
  CHECK(res.dropped_y0_term);
  CHECK(std::isfinite(res.loglik));

  // An inconsistent y_0 has zero density under the point mass.
  series.observations[0] = vec({100.0});
  FilterResult bad = loglik_lna_filter(m.network, m.theta, obs, series);
  CHECK(bad.degenerate);
  CHECK(bad.loglik == -std::numeric_limits<double>::infinity());
}

TEST_CASE("restart filter with identity observation matches fully observed") {
  BuiltinModel m = builtin("lotka-volterra");
  Trajectory traj = ssa_trajectory(m.network, m.theta, m.x0, 4.0, 8);
  ObservationSeries series;
  for (int t = 0; t <= 4; ++t) {
    series.times.push_back(t);
    series.observations.push_back(sample_at_times(traj, {double(t)})[0]);
  }
  ObservationModel obs = full_obs(2, 0.0, series.observations[0], 0.0);
  FilterResult kf = loglik_lna_filter(m.network, m.theta, obs, series);
  FilterResult fo = loglik_fully_observed(m.network, m.theta, series);
  CHECK(kf.dropped_y0_term);
  // With V = 0 the filtered mean is pinned to the data each step, so the two
  // factorizations agree up to jitter effects.
  CHECK(kf.loglik == doctest::Approx(fo.loglik).epsilon(1e-6));
}

TEST_CASE("ode baseline likelihood by hand on pure death") {
  ReactionNetwork net =
      parse_network("species X\nparam mu\nreaction: X -> 0 @ mu * X\n");
  double mu = 0.5, sigma2 = 4.0, x0 = 100;
  ObservationModel obs;
  obs.P = Matrix::Identity(1, 1);
  obs.V = Matrix::Zero(1, 1);
  obs.mu0 = vec({x0});
  obs.sigma0 = Matrix::Zero(1, 1);
  ObservationSeries series;
  std::vector<double> ys = {100, 60, 38, 21};
  for (int i = 0; i < 4; ++i) {
    series.times.push_back(i);
    series.observations.push_back(vec({ys[i]}));
  }
  double ll =
      loglik_ode_gauss(net, vec({mu}), vec({x0}), sigma2, obs, series);
  double manual = 0.0;
  for (int i = 0; i < 4; ++i) {
    double eta = x0 * std::exp(-mu * i);
    double r = ys[i] - eta;
    manual += -0.5 * (std::log(2 * M_PI * sigma2) + r * r / sigma2);
  }
  CHECK(ll == doctest::Approx(manual).epsilon(1e-5));
}

TEST_CASE("smallpox series layout") {
  ObservationSeries s = smallpox_series();
  REQUIRE(s.times.size() == 87); // days 0..76 plus a 10-day tail
  CHECK(s.times.front() == 0.0);
  CHECK(s.times.back() == 86.0);
  CHECK(s.observations.front()[0] == 119.0);
  CHECK(s.observations[13][0] == 118.0); // second removal on day 13
  CHECK(s.observations[76][0] == 90.0);  // all 30 removed
  CHECK(s.observations.back()[0] == 90.0);
  for (size_t i = 1; i < s.observations.size(); ++i)
    CHECK(s.observations[i][0] <= s.observations[i - 1][0]);

  // The filter runs end to end at the paper's ballpark parameter values.
  BuiltinModel m = builtin("sir");
  ObservationModel obs;
  obs.P = Matrix(1, 2);
  obs.P << 1, 1;
  obs.V = Matrix::Zero(1, 1);
  obs.mu0 = vec({1, 118});
  obs.sigma0 = Matrix::Zero(2, 2);
  FilterResult res =
      loglik_lna_filter(m.network, vec({0.001, 0.1}), obs, s);
  CHECK(std::isfinite(res.loglik));
  CHECK(res.dropped_y0_term);
}

TEST_CASE("observation model parsing and CSV round trip") {
  std::string text =
      "obs_dim 1\nP 1 1\nVdiag 0\nmu0 1 118\nSigma0diag 0 0\n";
  ObservationModel m = parse_observation_model(text, 2);
  CHECK(m.P(0, 0) == 1.0);
  CHECK(m.P(0, 1) == 1.0);
  CHECK(m.V.isZero());
  CHECK(m.mu0.isApprox(vec({1, 118})));
  ObservationModel again =
      parse_observation_model(serialize_observation_model(m), 2);
  CHECK(again.P == m.P);
  CHECK(again.mu0 == m.mu0);

  ObservationSeries s;
  s.times = {0.0, 0.5, 1.25};
  s.observations = {vec({1.0, 2.0}), vec({3.5, -1.0}), vec({0.125, 7.0})};
  ObservationSeries back =
      read_observation_csv(write_observation_csv(s, {"y1", "y2"}));
  REQUIRE(back.times == s.times);
  for (size_t i = 0; i < s.observations.size(); ++i)
    CHECK(back.observations[i] == s.observations[i]);

  CHECK_THROWS_AS(read_observation_csv("time,y\n1,2\n0.5,3\n"), Error);
  CHECK_THROWS_AS(parse_observation_model("obs_dim 1\n", 2), Error);
}

TEST_CASE("dimension mismatches are usage errors") {
  BuiltinModel m = builtin("lotka-volterra");
  ObservationModel obs = full_obs(1, 1.0, vec({40.0}), 1.0);
  ObservationSeries series;
  series.times = {0.0, 1.0};
  series.observations = {vec({40.0}), vec({41.0})};
  CHECK_THROWS_AS(loglik_lna_filter(m.network, m.theta, obs, series), Error);
}
