#ifndef KINLNA_SIM_HPP
#define KINLNA_SIM_HPP

#include <cstdint>
#include <vector>

#include "kinlna/network.hpp"
#include "kinlna/rng.hpp"

namespace kinlna {

enum class TrajectoryKind { Exact, EulerMaruyama };

/// A simulated path: event times (SSA) or grid times (EM) with the state in
/// force at each time. Exact trajectories are right-continuous step
/// functions; states[0] is always the supplied x0.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  TrajectoryKind kind = TrajectoryKind::Exact;
};

/// Gillespie direct method to t_end (or absorption, recording the final
/// plateau). x0 must be nonnegative integers.
Trajectory ssa_trajectory(const ReactionNetwork& net, const Vector& theta,
                          const Vector& x0, double t_end, uint64_t seed);

/// Euler-Maruyama simulation of the diffusion approximation
/// dX = drift dt + psd_sqrt(diffusion) sqrt(dt) z, recording the state at
/// each grid time; the step before each grid time is shortened to land on
/// it exactly. States are not clamped; negative excursions are reported
/// as-is.
Trajectory em_trajectory(const ReactionNetwork& net, const Vector& theta,
                         const Vector& x0, const std::vector<double>& grid_times,
                         double dt, uint64_t seed);

/// States in force at the query times. Exact trajectories are sampled
/// right-continuously; EM trajectories only answer at stored grid times.
std::vector<Vector> sample_at_times(const Trajectory& traj,
                                    const std::vector<double>& times);

enum class SimMethod { Exact, EulerMaruyama };

/// Marginal samples of X(t) over independent replicates, with unbiased
/// sample mean and covariance. Replicate r uses Rng::substream(seed, r).
struct EmpiricalTransition {
  std::vector<Vector> samples; // one state per replicate
  Vector mean;
  Matrix cov;
};

EmpiricalTransition empirical_transition(const ReactionNetwork& net,
                                         const Vector& theta, const Vector& x0,
                                         double t, int reps, SimMethod method,
                                         uint64_t seed, double dt = 1e-3);

} // namespace kinlna

#endif
