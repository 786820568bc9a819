#include "kinlna/sim.hpp"

#include <algorithm>
#include <cmath>

#include "kinlna/errors.hpp"
#include "kinlna/linalg.hpp"

namespace kinlna {

Trajectory ssa_trajectory(const ReactionNetwork& net, const Vector& theta,
                          const Vector& x0, double t_end, uint64_t seed) {
  if (!(t_end > 0))
    throw Error(ErrorKind::UsageError, "t_end must be positive");
  for (int j = 0; j < x0.size(); ++j)
    if (x0[j] < 0 || x0[j] != std::floor(x0[j]))
      throw Error(ErrorKind::UsageError,
                  "SSA initial state must be nonnegative integers");

  Rng rng(seed);
  Trajectory traj;
  traj.kind = TrajectoryKind::Exact;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  Vector x = x0;
  double t = 0.0;
  const auto& A = net.net_effect_matrix();
  while (true) {
    Vector h = net.propensities(x, theta);
    double total = 0.0;
    for (int i = 0; i < h.size(); ++i) {
      if (h[i] < 0)
        throw Error(ErrorKind::StateInconsistency,
                    "negative propensity in reaction " + std::to_string(i + 1) +
                        " at t=" + std::to_string(t));
      total += h[i];
    }
    if (!std::isfinite(total))
      throw Error(ErrorKind::NumericalFailure, "propensity overflow");
    if (total == 0.0) { // absorbing state: hold the plateau to t_end
      traj.times.push_back(t_end);
      traj.states.push_back(x);
      break;
    }
    double wait = rng.exponential(total);
    if (t + wait >= t_end) {
      traj.times.push_back(t_end);
      traj.states.push_back(x);
      break;
    }
    t += wait;
    double u = rng.uniform() * total;
    int pick = static_cast<int>(h.size()) - 1;
    double acc = 0.0;
    for (int i = 0; i < h.size(); ++i) {
      acc += h[i];
      if (u < acc) { pick = i; break; }
    }
    x += A.row(pick).transpose().cast<double>();
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory em_trajectory(const ReactionNetwork& net, const Vector& theta,
                         const Vector& x0, const std::vector<double>& grid_times,
                         double dt, uint64_t seed) {
  if (!(dt > 0))
    throw Error(ErrorKind::UsageError, "dt must be positive");
  if (grid_times.empty() || grid_times.front() < 0)
    throw Error(ErrorKind::UsageError, "grid times must start at >= 0");
  for (size_t i = 1; i < grid_times.size(); ++i)
    if (grid_times[i] <= grid_times[i - 1])
      throw Error(ErrorKind::UsageError, "grid times must be increasing");

  Rng rng(seed);
  Trajectory traj;
  traj.kind = TrajectoryKind::EulerMaruyama;

  const int n = static_cast<int>(x0.size());
  Vector x = x0;
  double t = 0.0;
  Vector z(n);
  if (grid_times.front() == 0.0) {
    traj.times.push_back(0.0);
    traj.states.push_back(x);
  }
  size_t g = traj.times.empty() ? 0 : 1;
  while (g < grid_times.size()) {
    double target = grid_times[g];
    // Shorten the last step so the grid point is hit exactly.
    double step = std::min(dt, target - t);
    Matrix sqrt_d = psd_sqrt(clip_psd(net.diffusion_matrix_unchecked(x, theta)));
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    x += net.drift(x, theta) * step + sqrt_d * (std::sqrt(step) * z);
    t += step;
    if (!x.allFinite())
      throw Error(ErrorKind::IntegrationFailure,
                  "EM state blew up at t=" + std::to_string(t));
    if (t >= target - 1e-14 * std::max(1.0, target)) {
      t = target;
      traj.times.push_back(target);
      traj.states.push_back(x);
      ++g;
    }
  }
  return traj;
}

std::vector<Vector> sample_at_times(const Trajectory& traj,
                                    const std::vector<double>& times) {
  std::vector<Vector> out;
  out.reserve(times.size());
  for (double q : times) {
    if (traj.times.empty() || q < traj.times.front() || q > traj.times.back())
      throw Error(ErrorKind::RangeError,
                  "query time " + std::to_string(q) + " outside trajectory span");
    if (traj.kind == TrajectoryKind::Exact) {
      // State right-continuously in force: last index with time <= q.
      auto it = std::upper_bound(traj.times.begin(), traj.times.end(), q);
      size_t idx = static_cast<size_t>(it - traj.times.begin()) - 1;
      out.push_back(traj.states[idx]);
    } else {
      auto it = std::lower_bound(traj.times.begin(), traj.times.end(), q);
      size_t idx = static_cast<size_t>(it - traj.times.begin());
      double tol = 1e-12 * std::max(1.0, std::abs(q));
      if (idx >= traj.times.size() || std::abs(traj.times[idx] - q) > tol) {
        if (idx > 0 && std::abs(traj.times[idx - 1] - q) <= tol) {
          --idx;
        } else {
          throw Error(ErrorKind::RangeError,
                      "query time " + std::to_string(q) +
                          " is not a stored EM grid time");
        }
      }
      out.push_back(traj.states[idx]);
    }
  }
  return out;
}

EmpiricalTransition empirical_transition(const ReactionNetwork& net,
                                         const Vector& theta, const Vector& x0,
                                         double t, int reps, SimMethod method,
                                         uint64_t seed, double dt) {
  if (reps < 2)
    throw Error(ErrorKind::UsageError, "empirical_transition needs reps >= 2");
  const int n = net.num_species();
  EmpiricalTransition out;
  out.samples.resize(static_cast<size_t>(reps));

  for (int r = 0; r < reps; ++r) {
    // Substream seed derived from (seed, r); the substream constructor does
    // the mixing, keeping replicate draws independent and reproducible.
    Rng sub = Rng::substream(seed, static_cast<uint64_t>(r));
    uint64_t rep_seed = sub.next_u64();
    try {
      if (method == SimMethod::Exact) {
        Trajectory traj = ssa_trajectory(net, theta, x0, t, rep_seed);
        out.samples[static_cast<size_t>(r)] = traj.states.back();
      } else {
        Trajectory traj = em_trajectory(net, theta, x0, {t}, dt, rep_seed);
        out.samples[static_cast<size_t>(r)] = traj.states.back();
      }
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (replicate " +
                                std::to_string(r) + ")");
    }
  }

  out.mean = Vector::Zero(n);
  for (const auto& s : out.samples) out.mean += s;
  out.mean /= reps;
  out.cov = Matrix::Zero(n, n);
  for (const auto& s : out.samples) {
    Vector d = s - out.mean;
    out.cov += d * d.transpose();
  }
  out.cov /= (reps - 1);
  return out;
}

} // namespace kinlna
