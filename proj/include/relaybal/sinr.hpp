#pragma once

#include <vector>

#include "relaybal/types.hpp"

namespace relaybal {

/// The max-min problem in quadratic-form representation. For each user j
/// (global ordering, j = t*M + i) the SINR is
///   gamma_j(omega) = omega^H Q[j] omega / (omega^H Pmat[j] omega + sigma2)
/// and the relay power constraint is omega^H Z omega <= power.
/// Carries the source channels so reports can be checked against the
/// direct matrix-form SINR.
struct QuadraticProblem {
  std::vector<VectorXcd> q;     // rank-1 factors, Q[j] = q[j] q[j]^H
  std::vector<MatrixXcd> Q;     // signal forms, N_R^2 x N_R^2
  std::vector<MatrixXcd> Pmat;  // interference + relay-noise forms
  MatrixXcd Z;                  // power form, Y^T kron I
  double sigma2 = 0.0;
  double sigmaR2 = 0.0;
  double power = 0.0;
  int pairs = 0;
  int antennas = 0;
  ChannelSet channels;

  int users() const { return 2 * pairs; }
  int dim() const { return antennas * antennas; }
};

/// Assembles Q_j, P_j and Z from the channels (per-column expansion of the
/// bilinear forms A_t Omega B_t etc.).
QuadraticProblem build_quadratic_problem(const ChannelSet& ch, const SystemConfig& cfg);

/// Tr{Omega Y Omega^H} with Y = H1 H1^H + H2 H2^H + sigmaR2 I.
double relay_power(const MatrixXcd& Omega, const ChannelSet& ch, double sigmaR2);

/// Per-user SINRs evaluated directly from the precoding matrix. Independent
/// of the quadratic-form route; used for reports and cross-checks.
VectorXd sinr_direct(const MatrixXcd& Omega, const ChannelSet& ch, const SystemConfig& cfg);

/// Per-user SINRs from the vectorized precoder and assembled forms.
VectorXd sinr_quadratic(const VectorXcd& omega, const QuadraticProblem& qp);

/// Inverse of column-stacking vectorization.
MatrixXcd unvec(const VectorXcd& omega);

/// Column-stacking vectorization.
VectorXcd vec(const MatrixXcd& Omega);

}  // namespace relaybal
