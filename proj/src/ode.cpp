#include "kinlna/ode.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kinlna/errors.hpp"

namespace kinlna {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

[[noreturn]] void fail(double t, const char* why) {
  throw Error(ErrorKind::IntegrationFailure,
              std::string(why) + " at t=" + std::to_string(t));
}

} // namespace

Eigen::VectorXd integrate_ode_observed(
    const OdeField& field, const Eigen::VectorXd& y0, double t0, double t1,
    const std::vector<double>& stops,
    const std::function<void(double, const Eigen::VectorXd&)>& observe,
    const IntegratorConfig& cfg) {
  if (t1 < t0)
    throw Error(ErrorKind::UsageError, "integrate_ode requires t1 >= t0");
  if (!(cfg.rtol >= 1e-12) || !(cfg.atol > 0))
    throw Error(ErrorKind::UsageError, "bad integrator tolerances");

  Eigen::VectorXd y = y0;
  double t = t0;
  size_t next_stop = 0;
  auto emit_stops_at = [&](double time) {
    while (next_stop < stops.size() && stops[next_stop] <= time + 1e-14 * std::max(1.0, std::abs(time))) {
      observe(stops[next_stop], y);
      ++next_stop;
    }
  };
  emit_stops_at(t);
  if (t1 == t0) {
    return y;
  }

  Eigen::VectorXd k1 = field(t, y);
  if (!k1.allFinite()) fail(t, "non-finite derivative");
  double h = (t1 - t0) / 100.0;
  long steps = 0;
  const int n = static_cast<int>(y.size());

  while (t < t1) {
    if (++steps > cfg.max_steps) fail(t, "step budget exhausted");
    // Land exactly on the next stop or the endpoint, without letting the
    // truncation pollute the controller's step estimate.
    double target = t1;
    if (next_stop < stops.size()) target = std::min(target, stops[next_stop]);
    double h_step = std::min(h, target - t);
    if (h_step <= 0) { // target == t within roundoff
      emit_stops_at(t);
      continue;
    }

    Eigen::VectorXd k2 = field(t + c2 * h_step, y + h_step * (a21 * k1));
    Eigen::VectorXd k3 =
        field(t + c3 * h_step, y + h_step * (a31 * k1 + a32 * k2));
    Eigen::VectorXd k4 =
        field(t + c4 * h_step, y + h_step * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::VectorXd k5 = field(
        t + c5 * h_step, y + h_step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::VectorXd k6 =
        field(t + h_step,
              y + h_step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::VectorXd y5 =
        y + h_step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::VectorXd k7 = field(t + h_step, y5); // FSAL
    Eigen::VectorXd y4 =
        y + h_step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    if (!y5.allFinite() || !k7.allFinite()) fail(t, "non-finite state");

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      double e = (y5[i] - y4[i]) / sc;
      err += e * e;
    }
    err = std::sqrt(err / n);

    bool accepted = err <= 1.0;
    if (accepted) {
      t += h_step;
      y = y5;
      k1 = k7;
      emit_stops_at(t);
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    if (accepted && h_step < h) {
      // Step was truncated to land on a stop; keep the controller's memory.
    } else {
      h = h_step * std::clamp(factor, 0.2, 5.0);
    }
    if (!(h > 0) || !std::isfinite(h)) fail(t, "step size underflow");
  }
  emit_stops_at(t1);
  return y;
}

Eigen::VectorXd integrate_ode(const OdeField& field, const Eigen::VectorXd& y0,
                              double t0, double t1, const IntegratorConfig& cfg) {
  return integrate_ode_observed(field, y0, t0, t1, {},
                                [](double, const Eigen::VectorXd&) {}, cfg);
}

} // namespace kinlna
