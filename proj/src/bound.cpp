#include "relaybal/bound.hpp"

#include <cmath>
#include <limits>

namespace relaybal {

namespace {

// Hermitian inverse square root with an eigenvalue floor guarding round-off.
// Throws when the spectrum spans more than cond_limit.
MatrixXcd hermitian_inv_sqrt(const MatrixXcd& A, double cond_limit) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(A);
  if (eig.info() != Eigen::Success)
    throw numerical_error("hermitian_inv_sqrt: eigensolver failed");
  VectorXd lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  if (!(lmax > 0.0)) throw numerical_error("hermitian_inv_sqrt: matrix is not PD");
  if (lambda.minCoeff() <= 0.0 || lmax / lambda.minCoeff() > cond_limit)
    throw numerical_error("hermitian_inv_sqrt: matrix is numerically singular");
  const double floor = 1e-12 * lmax;
  VectorXd inv_sqrt(lambda.size());
  for (int i = 0; i < lambda.size(); ++i)
    inv_sqrt(i) = 1.0 / std::sqrt(std::max(lambda(i), floor));
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

WhitenedProblem whiten(const QuadraticProblem& qp) {
  WhitenedProblem wp;
  wp.power = qp.power;
  wp.Zhalf_inv = hermitian_inv_sqrt(qp.Z, 1e14);

  const int dim = qp.dim();
  const MatrixXcd noise_floor =
      (qp.sigma2 / qp.power) * MatrixXcd::Identity(dim, dim);
  wp.F.reserve(qp.users());
  wp.G.reserve(qp.users());
  for (int j = 0; j < qp.users(); ++j) {
    wp.F.push_back(wp.Zhalf_inv * qp.Q[j] * wp.Zhalf_inv);
    wp.G.push_back(wp.Zhalf_inv * qp.Pmat[j] * wp.Zhalf_inv + noise_floor);
  }
  return wp;
}

std::pair<double, VectorXcd> max_generalized_eig(const MatrixXcd& F, const MatrixXcd& G) {
  const MatrixXcd g_inv_sqrt = hermitian_inv_sqrt(G, 1e14);
  // Hermitian congruence keeps the spectrum real; 0.5(M + M^H) scrubs
  // round-off asymmetry before the self-adjoint solver sees it.
  MatrixXcd M = g_inv_sqrt * F * g_inv_sqrt;
  M = 0.5 * (M + M.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(M);
  if (eig.info() != Eigen::Success)
    throw numerical_error("max_generalized_eig: eigensolver failed");
  const int last = static_cast<int>(eig.eigenvalues().size()) - 1;
  const double lambda = std::max(eig.eigenvalues()(last), 0.0);
  VectorXcd u = g_inv_sqrt * eig.eigenvectors().col(last);
  u.normalize();
  return {lambda, u};
}

BoundResult upper_bound(const WhitenedProblem& wp) {
  BoundResult res;
  res.per_user_max.resize(wp.users());
  res.gamma_bar = std::numeric_limits<double>::infinity();
  VectorXcd best;
  for (int j = 0; j < wp.users(); ++j) {
    auto [lambda, u] = max_generalized_eig(wp.F[j], wp.G[j]);
    res.per_user_max(j) = lambda;
    if (lambda < res.gamma_bar) {  // strict: ties keep the lowest index
      res.gamma_bar = lambda;
      res.j_star = j;
      best = std::move(u);
    }
  }
  res.w0 = std::move(best);
  return res;
}

}  // namespace relaybal
