#ifndef KINLNA_LNA_HPP
#define KINLNA_LNA_HPP

#include "kinlna/network.hpp"
#include "kinlna/ode.hpp"

namespace kinlna {

struct GaussianDist {
  Vector mean;
  Matrix cov;
};

/// Joint LNA state: the deterministic path eta, the perturbation mean m and
/// the perturbation covariance Psi.
struct LNAState {
  Vector eta;
  Vector m;
  Matrix psi;
};

/// Integrates d(eta)/dt = A'h(eta) and d(Psi)/dt = Psi F' + F Psi + SS'
/// jointly over Delta t, with F and SS' evaluated along eta(t). The
/// perturbation mean is identically zero in this restarted form. Psi is
/// symmetrized and eigenvalue-clipped at zero after integration.
void lna_predict(const ReactionNetwork& net, const Vector& theta, Vector& eta,
                 Matrix& psi, double delta_t, const IntegratorConfig& cfg = {});

/// Global (non-restarted) form: eta continues along the single path seeded
/// at the initial x0 and is never reset, while m evolves by dm/dt = F(eta) m
/// and Psi as above. The prediction mean for the state is eta + m.
void lna_predict_global(const ReactionNetwork& net, const Vector& theta,
                        Vector& eta, Vector& m, Matrix& psi, double delta_t,
                        const IntegratorConfig& cfg = {});

/// Gaussian transition law N(eta(dt), Psi(dt)) started from a point mass at
/// x_prev (eta = x_prev, m = 0, Psi = 0).
GaussianDist lna_transition_density(const ReactionNetwork& net,
                                    const Vector& theta, const Vector& x_prev,
                                    double delta_t,
                                    const IntegratorConfig& cfg = {});

/// True when any eta component dipped below -atol during the last predict
/// call on this thread (informational; the path is never clamped).
bool lna_eta_went_negative();

} // namespace kinlna

#endif
