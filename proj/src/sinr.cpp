#include "relaybal/sinr.hpp"

#include <cmath>

namespace relaybal {

namespace {

// Channel roles for group t (0-based): A = H_t^T carries the downlink,
// B = H_tbar the partner-group signals, C = H_t the same-group signals.
struct GroupView {
  MatrixXcd A, B, C;
};

GroupView group_view(const ChannelSet& ch, int group) {
  const MatrixXcd& own = (group == 0) ? ch.H1 : ch.H2;
  const MatrixXcd& other = (group == 0) ? ch.H2 : ch.H1;
  return {own.transpose(), other, own};
}

// q such that q^H vec(Omega) = [A Omega B]_{i,j}.
VectorXcd stacked_form_vector(const MatrixXcd& A, const MatrixXcd& B, int i, int j) {
  const int nr = static_cast<int>(A.cols());
  VectorXcd q(nr * nr);
  for (int k = 0; k < nr; ++k) q.segment(k * nr, nr) = std::conj(B(k, j)) * A.row(i).adjoint();
  return q;
}

}  // namespace

QuadraticProblem build_quadratic_problem(const ChannelSet& ch, const SystemConfig& cfg) {
  cfg.validate();
  if (ch.H1.rows() != cfg.antennas || ch.H1.cols() != cfg.pairs || ch.H2.rows() != ch.H1.rows() ||
      ch.H2.cols() != ch.H1.cols())
    throw structural_error("channel dimensions do not match the configuration");

  const int nr = cfg.antennas;
  const int m = cfg.pairs;
  const int dim = nr * nr;

  QuadraticProblem qp;
  qp.pairs = m;
  qp.antennas = nr;
  qp.sigma2 = cfg.sigma2;
  qp.sigmaR2 = cfg.sigmaR2;
  qp.power = cfg.power;
  qp.channels = ch;
  qp.q.resize(2 * m);
  qp.Q.resize(2 * m);
  qp.Pmat.resize(2 * m);

  for (int t = 0; t < 2; ++t) {
    const GroupView g = group_view(ch, t);
    for (int i = 0; i < m; ++i) {
      const int u = user_index(t, i, m);

      // Relay-noise form: N_R identical diagonal blocks a^H a.
      const MatrixXcd noise_block = cfg.sigmaR2 * (g.A.row(i).adjoint() * g.A.row(i));
      MatrixXcd P = MatrixXcd::Zero(dim, dim);
      for (int k = 0; k < nr; ++k) P.block(k * nr, k * nr, nr, nr) = noise_block;

      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const VectorXcd qb = stacked_form_vector(g.A, g.B, i, j);
        const VectorXcd sc = stacked_form_vector(g.A, g.C, i, j);
        P += qb * qb.adjoint() + sc * sc.adjoint();
      }
      qp.Pmat[u] = std::move(P);

      qp.q[u] = stacked_form_vector(g.A, g.B, i, i);
      qp.Q[u] = qp.q[u] * qp.q[u].adjoint();
    }
  }

  MatrixXcd Y = ch.H1 * ch.H1.adjoint() + ch.H2 * ch.H2.adjoint() +
                cfg.sigmaR2 * MatrixXcd::Identity(nr, nr);
  qp.Z = MatrixXcd::Zero(dim, dim);
  const MatrixXcd Yt = Y.transpose();
  for (int k = 0; k < nr; ++k)
    for (int l = 0; l < nr; ++l)
      qp.Z.block(k * nr, l * nr, nr, nr) = Yt(k, l) * MatrixXcd::Identity(nr, nr);
  return qp;
}

double relay_power(const MatrixXcd& Omega, const ChannelSet& ch, double sigmaR2) {
  if (Omega.rows() != Omega.cols() || Omega.rows() != ch.H1.rows())
    throw structural_error("relay_power: precoder must be square of size N_R");
  const int nr = static_cast<int>(Omega.rows());
  MatrixXcd Y = ch.H1 * ch.H1.adjoint() + ch.H2 * ch.H2.adjoint() +
                sigmaR2 * MatrixXcd::Identity(nr, nr);
  return (Omega * Y * Omega.adjoint()).trace().real();
}

VectorXd sinr_direct(const MatrixXcd& Omega, const ChannelSet& ch, const SystemConfig& cfg) {
  const int m = cfg.pairs;
  VectorXd out(2 * m);
  for (int t = 0; t < 2; ++t) {
    const GroupView g = group_view(ch, t);
    const MatrixXcd AO = g.A * Omega;
    const MatrixXcd AOB = AO * g.B;
    const MatrixXcd AOC = AO * g.C;
    for (int i = 0; i < m; ++i) {
      const double num = std::norm(AOB(i, i));
      double den = cfg.sigmaR2 * AO.row(i).squaredNorm() + cfg.sigma2;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;  // self-interference is canceled
        den += std::norm(AOB(i, j)) + std::norm(AOC(i, j));
      }
      out(user_index(t, i, m)) = num / den;
    }
  }
  return out;
}

VectorXd sinr_quadratic(const VectorXcd& omega, const QuadraticProblem& qp) {
  if (omega.size() != qp.dim()) throw structural_error("sinr_quadratic: omega has wrong length");
  VectorXd out(qp.users());
  for (int j = 0; j < qp.users(); ++j) {
    const double num = std::norm(qp.q[j].dot(omega));  // |q^H omega|^2
    const double den = (omega.dot(qp.Pmat[j] * omega)).real() + qp.sigma2;
    out(j) = num / den;
  }
  return out;
}

MatrixXcd unvec(const VectorXcd& omega) {
  const auto n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(omega.size()))));
  if (static_cast<long>(n) * n != omega.size())
    throw structural_error("unvec: length is not a perfect square");
  MatrixXcd Omega(n, n);
  for (int k = 0; k < n; ++k) Omega.col(k) = omega.segment(k * n, n);
  return Omega;
}

VectorXcd vec(const MatrixXcd& Omega) {
  VectorXcd omega(Omega.size());
  const int n = static_cast<int>(Omega.rows());
  for (int k = 0; k < Omega.cols(); ++k) omega.segment(k * n, n) = Omega.col(k);
  return omega;
}

}  // namespace relaybal
