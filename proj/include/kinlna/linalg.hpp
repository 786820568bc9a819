#ifndef KINLNA_LINALG_HPP
#define KINLNA_LINALG_HPP

#include <Eigen/Dense>

namespace kinlna {

/// (M + M') / 2.
inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Symmetric PSD matrix square root via spectral decomposition. Eigenvalues
/// below zero are clipped; an eigenvalue below -1e-8 * trace or asymmetry
/// beyond tolerance is an error.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

/// Projects a symmetric matrix onto the PSD cone (clips negative eigenvalues).
Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m);

/// Log-density of N(mean, cov) at x. A covariance whose innovation
/// structure is degenerate (smallest eigenvalue < 1e-12) gets a jitter of
/// 1e-10 * max(1, trace) added to the diagonal first.
double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov);

/// Adds the degenerate-covariance jitter in place when the smallest
/// eigenvalue falls below 1e-12; returns true if jitter was applied.
bool jitter_if_degenerate(Eigen::MatrixXd& cov);

} // namespace kinlna

#endif
