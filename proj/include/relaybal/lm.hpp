#pragma once

#include <vector>

#include "relaybal/bound.hpp"
#include "relaybal/types.hpp"

namespace relaybal {

/// Residual system f_j(w_hat) = w_hat^T Dhat_j w_hat at a fixed SINR target,
/// in real arithmetic. Dhat_j is the realification of D_j = F_j - gamma G_j.
struct RealifiedSystem {
  double gamma = 0.0;
  std::vector<MatrixXd> Dhat;  // 2N_R^2 x 2N_R^2
  std::vector<MatrixXd> Bsym;  // Dhat_j + Dhat_j^T (Jacobian rows are (Bsym_j w)^T)

  int equations() const { return static_cast<int>(Dhat.size()); }
  int dim() const { return Dhat.empty() ? 0 : static_cast<int>(Dhat.front().rows()); }
};

struct ArmijoParams {
  double alpha0 = 0.25;
  double beta = 0.5;
  double c1 = 1e-4;
  int max_backtracks = 30;
};

struct LMConfig {
  double nu = 0.9;        // full-step acceptance factor, in (0,1)
  double eps_lm = 1e-7;   // stop when ||J^T f|| drops below this
  int max_iters = 50;     // N_max
  ArmijoParams armijo;

  void validate() const;
};

enum class StepKind { full, line_search };

struct LMHistoryEntry {
  double res_norm;    // ||f|| at the accepted (renormalized) iterate
  StepKind kind;
  int backtracks;
  double alpha;       // accepted step length (1 for full steps)
  double slope;       // grad(Phi)^T delta at the departed iterate
};

struct LMState {
  VectorXd w_hat;       // current iterate, unit norm
  int k = 0;            // accepted iterations
  VectorXd residual;    // f(w_hat)
  double res_norm = 0.0;
  double grad_norm = 0.0;  // ||J^T f|| at w_hat
  double mu = 0.0;         // damping used in the last step
  bool stalled = false;    // line search found no admissible step
  std::vector<LMHistoryEntry> history;
};

struct LMOutcome {
  VectorXcd w;    // complex unit solution
  LMState state;
};

VectorXd realify_vector(const VectorXcd& y);
VectorXcd complexify_vector(const VectorXd& x);
MatrixXd realify_matrix(const MatrixXcd& Y);

RealifiedSystem build_realified_system(const WhitenedProblem& wp, double gamma);

VectorXd residual(const VectorXd& w_hat, const RealifiedSystem& sys);

/// Jacobian of the residual, one row per user: (Bsym_j w_hat)^T.
MatrixXd jacobian(const VectorXd& w_hat, const RealifiedSystem& sys);

/// Lipschitz constant of the Jacobian, sqrt(sum_j ||Bsym_j||_F^2).
/// Diagnostic only.
double lipschitz_K(const RealifiedSystem& sys);

/// Damped least-squares step: solves (J^T J + mu I) delta = -J^T f.
VectorXd lm_step(const VectorXd& w_hat, const RealifiedSystem& sys, double mu);

/// Backtracking line search on Phi = 0.5||f||^2 along delta. Returns the
/// largest alpha in {alpha0 beta^m} satisfying the sufficient-decrease
/// condition, or alpha = 0 when none of the trials qualifies.
std::pair<double, int> armijo_search(const VectorXd& w_hat, const VectorXd& delta,
                                     const RealifiedSystem& sys, const ArmijoParams& params);

/// Modified Levenberg-Marquardt solve of f(w_hat) = 0 at a fixed target.
/// Damping mu_k = ||f(w_hat_k)||; a full step is kept when it shrinks the
/// residual by the factor nu, otherwise an Armijo step is taken. Iterates
/// live on the unit sphere: every candidate is renormalized before its
/// residual is judged, which rules out the spurious w_hat = 0 attractor of
/// the unconstrained least-squares problem.
LMOutcome solve_at_gamma(const WhitenedProblem& wp, double gamma, const VectorXd& w_hat0,
                         const LMConfig& cfg);

/// Maps a unit whitened solution back to a full-power precoder,
/// omega = sqrt(P) Z^{-1/2} w.
VectorXcd finalize_precoder(const VectorXcd& w, const WhitenedProblem& wp, double P);

}  // namespace relaybal
