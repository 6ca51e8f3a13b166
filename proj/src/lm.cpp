#include "relaybal/lm.hpp"

#include <cmath>

namespace relaybal {

void LMConfig::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) throw invalid_parameter("nu must lie in (0,1)");
  if (!(eps_lm > 0.0)) throw invalid_parameter("eps_lm must be > 0");
  if (max_iters < 0) throw invalid_parameter("max_iters must be >= 0");
  if (!(armijo.alpha0 > 0.0)) throw invalid_parameter("alpha0 must be > 0");
  if (!(armijo.beta > 0.0 && armijo.beta < 1.0)) throw invalid_parameter("beta must lie in (0,1)");
  if (!(armijo.c1 > 0.0 && armijo.c1 < 1.0)) throw invalid_parameter("c1 must lie in (0,1)");
  if (armijo.max_backtracks < 0) throw invalid_parameter("max_backtracks must be >= 0");
}

VectorXd realify_vector(const VectorXcd& y) {
  const auto n = y.size();
  VectorXd x(2 * n);
  x.head(n) = y.real();
  x.tail(n) = y.imag();
  return x;
}

VectorXcd complexify_vector(const VectorXd& x) {
  if (x.size() % 2 != 0) throw structural_error("complexify_vector: length must be even");
  const auto n = x.size() / 2;
  VectorXcd y(n);
  y.real() = x.head(n);
  y.imag() = x.tail(n);
  return y;
}

MatrixXd realify_matrix(const MatrixXcd& Y) {
  if (Y.rows() != Y.cols()) throw structural_error("realify_matrix expects a square matrix");
  const auto n = Y.rows();
  MatrixXd X(2 * n, 2 * n);
  X.topLeftCorner(n, n) = Y.real();
  X.topRightCorner(n, n) = -Y.imag();
  X.bottomLeftCorner(n, n) = Y.imag();
  X.bottomRightCorner(n, n) = Y.real();
  return X;
}

RealifiedSystem build_realified_system(const WhitenedProblem& wp, double gamma) {
  RealifiedSystem sys;
  sys.gamma = gamma;
  sys.Dhat.reserve(wp.users());
  sys.Bsym.reserve(wp.users());
  for (int j = 0; j < wp.users(); ++j) {
    MatrixXd dhat = realify_matrix(wp.F[j] - gamma * wp.G[j]);
    sys.Bsym.push_back(dhat + dhat.transpose());
    sys.Dhat.push_back(std::move(dhat));
  }
  return sys;
}

VectorXd residual(const VectorXd& w_hat, const RealifiedSystem& sys) {
  VectorXd f(sys.equations());
  for (int j = 0; j < sys.equations(); ++j) f(j) = w_hat.dot(sys.Dhat[j] * w_hat);
  return f;
}

MatrixXd jacobian(const VectorXd& w_hat, const RealifiedSystem& sys) {
  MatrixXd J(sys.equations(), w_hat.size());
  for (int j = 0; j < sys.equations(); ++j) J.row(j) = (sys.Bsym[j] * w_hat).transpose();
  return J;
}

double lipschitz_K(const RealifiedSystem& sys) {
  double sum = 0.0;
  for (const MatrixXd& B : sys.Bsym) sum += B.squaredNorm();
  return std::sqrt(sum);
}

namespace {

VectorXd damped_step(const MatrixXd& J, const VectorXd& f, double mu) {
  if (!(mu > 0.0)) throw invalid_parameter("lm_step: damping must be > 0");
  MatrixXd A = J.transpose() * J;
  A.diagonal().array() += mu;
  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw numerical_error("lm_step: damped system not PD");
  return llt.solve(-(J.transpose() * f));
}

}  // namespace

VectorXd lm_step(const VectorXd& w_hat, const RealifiedSystem& sys, double mu) {
  return damped_step(jacobian(w_hat, sys), residual(w_hat, sys), mu);
}

std::pair<double, int> armijo_search(const VectorXd& w_hat, const VectorXd& delta,
                                     const RealifiedSystem& sys, const ArmijoParams& params) {
  const VectorXd f0 = residual(w_hat, sys);
  const double phi0 = 0.5 * f0.squaredNorm();
  const double slope = (jacobian(w_hat, sys).transpose() * f0).dot(delta);
  double alpha = params.alpha0;
  for (int m = 0; m <= params.max_backtracks; ++m) {
    const double phi = 0.5 * residual(w_hat + alpha * delta, sys).squaredNorm();
    if (phi <= phi0 + params.c1 * alpha * slope) return {alpha, m};
    alpha *= params.beta;
  }
  return {0.0, params.max_backtracks};
}

LMOutcome solve_at_gamma(const WhitenedProblem& wp, double gamma, const VectorXd& w_hat0,
                         const LMConfig& cfg) {
  cfg.validate();
  if (w_hat0.size() != 2 * wp.dim())
    throw structural_error("solve_at_gamma: initial iterate has wrong length");

  const RealifiedSystem sys = build_realified_system(wp, gamma);
  constexpr double mu_floor = 1e-14;

  LMState st;
  st.w_hat = w_hat0.normalized();
  st.residual = residual(st.w_hat, sys);
  st.res_norm = st.residual.norm();
  MatrixXd J = jacobian(st.w_hat, sys);
  VectorXd grad = J.transpose() * st.residual;
  st.grad_norm = grad.norm();

  while (st.grad_norm >= cfg.eps_lm && st.k < cfg.max_iters) {
    st.mu = std::max(st.res_norm, mu_floor);
    const VectorXd delta = damped_step(J, st.residual, st.mu);
    const double slope = grad.dot(delta);
    const double phi0 = 0.5 * st.res_norm * st.res_norm;

    // Candidates are renormalized before their residual is judged: the
    // residual is degree-2 homogeneous, so off-sphere decreases are
    // meaningless and w_hat = 0 would otherwise attract the iteration.
    VectorXd next;
    VectorXd f_next;
    StepKind kind = StepKind::full;
    double alpha = 1.0;
    int backtracks = 0;
    bool accepted = false;

    VectorXd cand = st.w_hat + delta;
    double cn = cand.norm();
    if (cn > 0.0) {
      cand /= cn;
      VectorXd fc = residual(cand, sys);
      if (fc.norm() <= cfg.nu * st.res_norm) {
        next = std::move(cand);
        f_next = std::move(fc);
        accepted = true;
      }
    }
    if (!accepted) {
      kind = StepKind::line_search;
      alpha = cfg.armijo.alpha0;
      for (int m = 0; m <= cfg.armijo.max_backtracks; ++m, alpha *= cfg.armijo.beta) {
        VectorXd c = st.w_hat + alpha * delta;
        const double n = c.norm();
        if (n == 0.0) continue;
        c /= n;
        VectorXd fc = residual(c, sys);
        if (0.5 * fc.squaredNorm() <= phi0 + cfg.armijo.c1 * alpha * slope) {
          next = std::move(c);
          f_next = std::move(fc);
          backtracks = m;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      st.stalled = true;
      break;
    }

    st.w_hat = std::move(next);
    st.residual = std::move(f_next);
    st.res_norm = st.residual.norm();
    J = jacobian(st.w_hat, sys);
    grad = J.transpose() * st.residual;
    st.grad_norm = grad.norm();
    ++st.k;
    st.history.push_back({st.res_norm, kind, backtracks, alpha, slope});
  }

  return {complexify_vector(st.w_hat), std::move(st)};
}

VectorXcd finalize_precoder(const VectorXcd& w, const WhitenedProblem& wp, double P) {
  if (!(P > 0.0)) throw invalid_parameter("finalize_precoder: power must be > 0");
  return std::sqrt(P) * (wp.Zhalf_inv * w);
}

}  // namespace relaybal
