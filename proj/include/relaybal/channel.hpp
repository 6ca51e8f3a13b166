#pragma once

#include <cstdint>
#include <random>

#include "relaybal/types.hpp"

namespace relaybal {

/// Deterministic stream of standard normal variates: mt19937_64 driving a
/// Box-Muller transform. Self-contained so that sequences are identical
/// across platforms and standard libraries for a given seed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(seed) {}

  double next();
  /// One circularly-symmetric complex Gaussian with unit variance
  /// (real and imaginary parts each N(0, 1/2)).
  cplx next_complex();

 private:
  double uniform_open();  // (0,1]
  double uniform();       // [0,1)

  std::mt19937_64 state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Exponential-decay antenna correlation: entry (i,j) = rho^|i-j|.
MatrixXd correlation_matrix(double rho, int n);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues below
/// -1e-12*lambda_max are rejected, small negatives are clamped to zero.
MatrixXd psd_sqrt(const MatrixXd& A);

/// Correlated Rayleigh channels: H_t = Theta_RS^{1/2} Htilde_t Theta_t^{1/2}
/// * sqrt(P/M), with Htilde_t iid CN(0,1) drawn deterministically from
/// cfg.seed (group 1 first, column-major within each matrix).
ChannelSet generate_channels(const SystemConfig& cfg);

}  // namespace relaybal
