#include "kinlna/linalg.hpp"

#include <cmath>

#include "kinlna/errors.hpp"

namespace kinlna {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::UsageError, "psd_sqrt needs a square matrix");
  double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, scale))
    throw Error(ErrorKind::UsageError, "psd_sqrt: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m));
  Eigen::VectorXd evals = es.eigenvalues();
  double floor = -1e-8 * std::max(1.0, std::abs(m.trace()));
  Eigen::VectorXd sq(evals.size());
  for (int i = 0; i < evals.size(); ++i) {
    if (evals[i] < floor)
      throw Error(ErrorKind::UsageError,
                  "psd_sqrt: eigenvalue " + std::to_string(evals[i]) +
                      " below negativity floor");
    sq[i] = std::sqrt(std::max(evals[i], 0.0));
  }
  return es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(m));
  Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
}

bool jitter_if_degenerate(Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(cov));
  if (es.eigenvalues().minCoeff() < 1e-12) {
    double jitter = 1e-10 * std::max(1.0, cov.trace());
    cov.diagonal().array() += jitter;
    return true;
  }
  return false;
}

double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov) {
  const int d = static_cast<int>(x.size());
  Eigen::MatrixXd c = symmetrize(cov);
  jitter_if_degenerate(c);
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::FilterFailure,
                "covariance not positive definite after jitter");
  Eigen::VectorXd r = x - mean;
  Eigen::VectorXd z = llt.matrixL().solve(r);
  double logdet = 0.0;
  for (int i = 0; i < d; ++i)
    logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (d * std::log(2.0 * M_PI) + logdet + z.squaredNorm());
}

} // namespace kinlna
