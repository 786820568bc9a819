#include <doctest.h>

#include <cmath>

#include "kinlna/errors.hpp"
#include "kinlna/sim.hpp"

using namespace kinlna;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const char* kPureDeathDsl = "species X\nparam mu\nreaction: X -> 0 @ mu * X\n";
const char* kFrozenDsl = "species X\nparam mu\nreaction: X -> 0 @ 0 * mu * X\n";

// OU-like construction: drift -x, diffusion sigma2 (constant), valid while
// |x| <= sigma2-neighborhood keeps both rates nonnegative.
std::string ou_dsl(double sigma2) {
  return "species X\nparam c\nreaction: X -> 0 @ (X + " +
         std::to_string(sigma2) + " * c) / 2\nreaction: 0 -> X @ (" +
         std::to_string(sigma2) + " * c - X) / 2\n";
}

} // namespace

TEST_CASE("pure death process: SSA mean matches exp(-mu t)") {
  ReactionNetwork net = parse_network(kPureDeathDsl);
  Vector theta = vec({0.5});
  const double t = 1.0;
  const int reps = 10000;
  EmpiricalTransition emp = empirical_transition(net, theta, vec({1.0}), t,
                                                 reps, SimMethod::Exact, 11);
  double expected = std::exp(-0.5 * t); // survival probability of one particle
  double se = std::sqrt(expected * (1 - expected) / reps);
  CHECK(std::abs(emp.mean[0] - expected) < 3 * se);
}

TEST_CASE("absorbing state holds the plateau to t_end") {
  BuiltinModel m = builtin("sir");
  Trajectory traj = ssa_trajectory(m.network, m.theta, vec({0, 118}), 5.0, 3);
  REQUIRE(traj.times.size() == 2);
  CHECK(traj.times.back() == 5.0);
  CHECK(traj.states.back().isApprox(vec({0, 118})));
}

TEST_CASE("SSA states move only by net-effect rows and stay nonnegative") {
  for (const char* name : {"lotka-volterra", "sir", "autoreg"}) {
    BuiltinModel m = builtin(name, 1.0);
    Trajectory traj = ssa_trajectory(m.network, m.theta, m.x0, 2.0, 99);
    const auto& A = m.network.net_effect_matrix();
    for (size_t i = 1; i + 1 < traj.states.size(); ++i) {
      Vector jump = traj.states[i] - traj.states[i - 1];
      bool matches = false;
      for (int r = 0; r < A.rows(); ++r)
        if (jump.isApprox(A.row(r).transpose().cast<double>())) matches = true;
      CHECK(matches);
      CHECK(traj.states[i].minCoeff() >= 0);
    }
  }
}

TEST_CASE("SSA is deterministic per seed") {
  BuiltinModel m = builtin("lotka-volterra");
  Trajectory a = ssa_trajectory(m.network, m.theta, m.x0, 3.0, 123);
  Trajectory b = ssa_trajectory(m.network, m.theta, m.x0, 3.0, 123);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t i = 0; i < a.times.size(); ++i) {
    CHECK(a.times[i] == b.times[i]); // bit-identical
    CHECK(a.states[i] == b.states[i]);
  }
  Trajectory c = ssa_trajectory(m.network, m.theta, m.x0, 3.0, 124);
  CHECK(a.times.size() != c.times.size());
}

TEST_CASE("frozen network: EM path equals x0 forever, covariance zero") {
  ReactionNetwork net = parse_network(kFrozenDsl);
  Vector theta = vec({1.0});
  Trajectory traj = em_trajectory(net, theta, vec({5.0}), {0.0, 0.5, 1.0}, 0.01, 7);
  for (const auto& s : traj.states) CHECK(s[0] == 5.0);

  EmpiricalTransition emp = empirical_transition(net, theta, vec({5.0}), 1.0, 2,
                                                 SimMethod::Exact, 7);
  CHECK(emp.samples[0][0] == 5.0);
  CHECK(emp.samples[1][0] == 5.0);
  CHECK(emp.cov.isZero());
}

TEST_CASE("EM weak consistency on the linear SDE dX = -X dt + dW") {
  ReactionNetwork net = parse_network(ou_dsl(1.0));
  Vector theta = vec({1.0});
  const int reps = 20000;
  EmpiricalTransition emp = empirical_transition(
      net, theta, vec({0.3}), 1.0, reps, SimMethod::EulerMaruyama, 5, 1e-3);
  double mean_expected = 0.3 * std::exp(-1.0);
  double var_expected = (1.0 - std::exp(-2.0)) / 2.0;
  double se_mean = std::sqrt(var_expected / reps);
  double se_var = var_expected * std::sqrt(2.0 / (reps - 1));
  CHECK(std::abs(emp.mean[0] - mean_expected) < 3 * se_mean);
  CHECK(std::abs(emp.cov(0, 0) - var_expected) < 3 * se_var);
}

TEST_CASE("EM deterministic limit with tiny diffusion") {
  ReactionNetwork net = parse_network(ou_dsl(1e-12));
  Vector theta = vec({1.0});
  Trajectory traj = em_trajectory(net, theta, vec({1.0}), {1.0}, 1e-4, 9);
  CHECK(traj.states.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("sample_at_times: right continuity and range errors") {
  Trajectory traj;
  traj.kind = TrajectoryKind::Exact;
  traj.times = {0.0, 1.5, 3.0};
  traj.states = {vec({1}), vec({2}), vec({2})};
  auto states = sample_at_times(traj, {0.0, 1.0, 1.5, 2.9});
  CHECK(states[0][0] == 1);
  CHECK(states[1][0] == 1);
  CHECK(states[2][0] == 2); // post-jump state at the jump time
  CHECK(states[3][0] == 2);
  CHECK_THROWS_AS(sample_at_times(traj, {3.5}), Error);

  Trajectory em;
  em.kind = TrajectoryKind::EulerMaruyama;
  em.times = {0.0, 0.5, 1.0};
  em.states = {vec({1}), vec({2}), vec({3})};
  CHECK(sample_at_times(em, {0.5})[0][0] == 2);
  CHECK_THROWS_AS(sample_at_times(em, {0.25}), Error);
}

TEST_CASE("LV trajectory sampled on the 31-point grid") {
  BuiltinModel m = builtin("lotka-volterra");
  Trajectory traj = ssa_trajectory(m.network, m.theta, m.x0, 30.0, 2024);
  std::vector<double> grid;
  for (int t = 0; t <= 30; ++t) grid.push_back(t);
  auto states = sample_at_times(traj, grid);
  CHECK(states.size() == 31);
  CHECK(states[0].isApprox(m.x0));
}

TEST_CASE("empirical_transition replicate substreams differ") {
  ReactionNetwork net = parse_network(kPureDeathDsl);
  EmpiricalTransition emp = empirical_transition(net, vec({0.2}), vec({50.0}),
                                                 1.0, 50, SimMethod::Exact, 17);
  bool any_diff = false;
  for (size_t r = 1; r < emp.samples.size(); ++r)
    if (emp.samples[r] != emp.samples[0]) any_diff = true;
  CHECK(any_diff);

  EmpiricalTransition again = empirical_transition(net, vec({0.2}), vec({50.0}),
                                                   1.0, 50, SimMethod::Exact, 17);
  for (size_t r = 0; r < emp.samples.size(); ++r)
    CHECK(emp.samples[r] == again.samples[r]);
}

TEST_CASE("usage errors: bad reps, t_end, fractional x0") {
  ReactionNetwork net = parse_network(kPureDeathDsl);
  CHECK_THROWS_AS(
      empirical_transition(net, vec({0.2}), vec({5.0}), 1.0, 1, SimMethod::Exact, 1),
      Error);
  CHECK_THROWS_AS(ssa_trajectory(net, vec({0.2}), vec({5.0}), 0.0, 1), Error);
  CHECK_THROWS_AS(ssa_trajectory(net, vec({0.2}), vec({5.5}), 1.0, 1), Error);
}
