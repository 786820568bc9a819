#include "kinlna/lna.hpp"

#include <cmath>

#include "kinlna/errors.hpp"
#include "kinlna/linalg.hpp"

namespace kinlna {

namespace {

thread_local bool g_eta_negative = false;

void check_psi0(const Matrix& psi) {
  if ((psi - psi.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(1.0, psi.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::UsageError, "psi0 not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(psi);
  if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, std::abs(psi.trace())))
    throw Error(ErrorKind::UsageError, "psi0 not PSD within tolerance");
}

// Packs (eta, m, psi) into one ODE state. m is optional (global variant).
struct JointField {
  const ReactionNetwork& net;
  const Vector& theta;
  int n;
  bool with_m;
  double neg_floor;

  Eigen::VectorXd operator()(double, const Eigen::VectorXd& y) const {
    Vector eta = y.head(n);
    for (int i = 0; i < n; ++i)
      if (eta[i] < -neg_floor) g_eta_negative = true;
    int off = n + (with_m ? n : 0);
    Matrix psi = Eigen::Map<const Matrix>(y.data() + off, n, n);

    Vector deta = net.drift(eta, theta);
    Matrix F = net.drift_jacobian(eta, theta);
    Matrix SSt = net.diffusion_matrix_unchecked(eta, theta);
    Matrix dpsi = psi * F.transpose() + F * psi + SSt;

    Eigen::VectorXd dy(y.size());
    dy.head(n) = deta;
    if (with_m) dy.segment(n, n) = F * y.segment(n, n);
    Eigen::Map<Matrix>(dy.data() + off, n, n) = dpsi;
    return dy;
  }
};

void predict_impl(const ReactionNetwork& net, const Vector& theta, Vector& eta,
                  Vector* m, Matrix& psi, double delta_t,
                  const IntegratorConfig& cfg) {
  if (delta_t < 0)
    throw Error(ErrorKind::UsageError, "delta_t must be nonnegative");
  check_psi0(psi);
  const int n = net.num_species();
  const bool with_m = m != nullptr;
  g_eta_negative = false;

  Eigen::VectorXd y(n + (with_m ? n : 0) + n * n);
  y.head(n) = eta;
  if (with_m) y.segment(n, n) = *m;
  Eigen::Map<Matrix>(y.data() + n + (with_m ? n : 0), n, n) = symmetrize(psi);

  JointField field{net, theta, n, with_m, cfg.atol};
  Eigen::VectorXd y1 = integrate_ode(field, y, 0.0, delta_t, cfg);

  eta = y1.head(n);
  if (with_m) *m = y1.segment(n, n);
  Matrix raw = Eigen::Map<const Matrix>(y1.data() + n + (with_m ? n : 0), n, n);
  psi = clip_psd(raw);
}

} // namespace

bool lna_eta_went_negative() { return g_eta_negative; }

void lna_predict(const ReactionNetwork& net, const Vector& theta, Vector& eta,
                 Matrix& psi, double delta_t, const IntegratorConfig& cfg) {
  predict_impl(net, theta, eta, nullptr, psi, delta_t, cfg);
}

void lna_predict_global(const ReactionNetwork& net, const Vector& theta,
                        Vector& eta, Vector& m, Matrix& psi, double delta_t,
                        const IntegratorConfig& cfg) {
  predict_impl(net, theta, eta, &m, psi, delta_t, cfg);
}

GaussianDist lna_transition_density(const ReactionNetwork& net,
                                    const Vector& theta, const Vector& x_prev,
                                    double delta_t, const IntegratorConfig& cfg) {
  if (!(delta_t > 0))
    throw Error(ErrorKind::UsageError, "delta_t must be positive");
  Vector eta = x_prev;
  Matrix psi = Matrix::Zero(net.num_species(), net.num_species());
  lna_predict(net, theta, eta, psi, delta_t, cfg);
  return {eta, psi};
}

} // namespace kinlna
