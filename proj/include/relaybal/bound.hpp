#pragma once

#include <vector>

#include "relaybal/sinr.hpp"
#include "relaybal/types.hpp"

namespace relaybal {

/// Problem after power-constraint whitening, sqrt(p) w = Z^{1/2} omega with
/// p fixed to the budget. On the unit sphere the SINR of user j becomes the
/// Rayleigh quotient w^H F[j] w / w^H G[j] w.
struct WhitenedProblem {
  std::vector<MatrixXcd> F;  // Z^{-1/2} Q_j Z^{-1/2}, Hermitian PSD rank 1
  std::vector<MatrixXcd> G;  // Z^{-1/2} P_j Z^{-1/2} + (sigma2/P) I, Hermitian PD
  MatrixXcd Zhalf_inv;       // Z^{-1/2}
  double power = 0.0;

  int users() const { return static_cast<int>(F.size()); }
  int dim() const { return static_cast<int>(Zhalf_inv.rows()); }
};

struct BoundResult {
  double gamma_bar = 0.0;       // min_j lambda_max(G_j^{-1} F_j)
  int j_star = 0;               // user attaining the minimum (lowest index on ties)
  VectorXcd w0;                 // unit eigenvector of the binding eigenproblem
  VectorXd per_user_max;        // lambda_max(G_j^{-1} F_j) for every j
};

WhitenedProblem whiten(const QuadraticProblem& qp);

/// Largest generalized eigenvalue of (F, G) with G PD, via the Hermitian
/// form G^{-1/2} F G^{-1/2}. Returns the eigenvalue and a unit vector
/// attaining it as a Rayleigh quotient.
std::pair<double, VectorXcd> max_generalized_eig(const MatrixXcd& F, const MatrixXcd& G);

/// Closed-form minimax upper bound of the balanced SINR.
BoundResult upper_bound(const WhitenedProblem& wp);

}  // namespace relaybal
