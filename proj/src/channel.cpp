#include "relaybal/channel.hpp"

#include <cmath>
#include <numbers>

namespace relaybal {

void SystemConfig::validate() const {
  if (pairs < 1) throw invalid_parameter("pairs must be >= 1");
  if (antennas < 1) throw invalid_parameter("antennas must be >= 1");
  if (!(power > 0.0)) throw invalid_parameter("power must be > 0");
  if (!(sigma2 > 0.0)) throw invalid_parameter("sigma2 must be > 0");
  if (!(sigmaR2 > 0.0)) throw invalid_parameter("sigmaR2 must be > 0");
  for (double rho : {rho1, rho2, rhoRS}) {
    if (!(rho >= 0.0 && rho < 1.0))
      throw invalid_parameter("correlation coefficients must lie in [0,1)");
  }
}

double GaussianStream::uniform_open() {
  // 53-bit mantissa, shifted into (0,1] so log() below is safe.
  return (static_cast<double>(state_() >> 11) + 1.0) * 0x1p-53;
}

double GaussianStream::uniform() {
  return static_cast<double>(state_() >> 11) * 0x1p-53;
}

double GaussianStream::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(phi);
  has_cached_ = true;
  return r * std::cos(phi);
}

cplx GaussianStream::next_complex() {
  const double s = std::numbers::sqrt2;
  const double re = next() / s;
  const double im = next() / s;
  return {re, im};
}

MatrixXd correlation_matrix(double rho, int n) {
  if (!(rho >= 0.0 && rho < 1.0)) throw invalid_parameter("correlation must lie in [0,1)");
  if (n < 1) throw invalid_parameter("correlation matrix dimension must be >= 1");
  MatrixXd theta(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) theta(i, j) = std::pow(rho, std::abs(i - j));
  return theta;
}

MatrixXd psd_sqrt(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw structural_error("psd_sqrt expects a square matrix");
  if ((A - A.transpose()).norm() > 1e-12 * std::max(A.norm(), 1.0))
    throw structural_error("psd_sqrt expects a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(A);
  if (eig.info() != Eigen::Success) throw numerical_error("psd_sqrt: eigensolver failed");
  VectorXd lambda = eig.eigenvalues();
  const double tol = 1e-12 * std::max(lambda.maxCoeff(), 0.0);
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol) throw numerical_error("psd_sqrt: matrix is not PSD");
    lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

MatrixXcd iid_gaussian(int rows, int cols, GaussianStream& rng) {
  MatrixXcd H(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) H(i, j) = rng.next_complex();
  return H;
}

}  // namespace

ChannelSet generate_channels(const SystemConfig& cfg) {
  cfg.validate();
  GaussianStream rng(cfg.seed);
  MatrixXcd Ht1 = iid_gaussian(cfg.antennas, cfg.pairs, rng);
  MatrixXcd Ht2 = iid_gaussian(cfg.antennas, cfg.pairs, rng);

  const MatrixXd theta_rs_half = psd_sqrt(correlation_matrix(cfg.rhoRS, cfg.antennas));
  const MatrixXd theta1_half = psd_sqrt(correlation_matrix(cfg.rho1, cfg.pairs));
  const MatrixXd theta2_half = psd_sqrt(correlation_matrix(cfg.rho2, cfg.pairs));

  const double scale = std::sqrt(cfg.power / cfg.pairs);
  ChannelSet ch;
  ch.H1 = scale * (theta_rs_half * Ht1 * theta1_half);
  ch.H2 = scale * (theta_rs_half * Ht2 * theta2_half);
  return ch;
}

}  // namespace relaybal
