#ifndef KINLNA_ODE_HPP
#define KINLNA_ODE_HPP

#include <Eigen/Dense>
#include <functional>

namespace kinlna {

struct IntegratorConfig {
  double rtol = 1e-6;
  double atol = 1e-8;
  long max_steps = 1000000;
};

using OdeField =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& y)>;

/// Adaptive Dormand-Prince 5(4) integration from t0 to t1 with embedded
/// error control (per-step local error <= atol + rtol * |y| componentwise)
/// and exact landing on t1. Throws Error(IntegrationFailure) when the step
/// budget runs out or the derivative turns non-finite, naming the time
/// reached.
Eigen::VectorXd integrate_ode(const OdeField& field, const Eigen::VectorXd& y0,
                              double t0, double t1,
                              const IntegratorConfig& cfg = {});

/// As integrate_ode but invokes `observe(t, y)` at each time in `stops`
/// (strictly increasing, within [t0, t1]); each stop is hit exactly.
Eigen::VectorXd
integrate_ode_observed(const OdeField& field, const Eigen::VectorXd& y0,
                       double t0, double t1, const std::vector<double>& stops,
                       const std::function<void(double, const Eigen::VectorXd&)>& observe,
                       const IntegratorConfig& cfg = {});

} // namespace kinlna

#endif
