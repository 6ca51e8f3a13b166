#pragma once

#include <utility>
#include <vector>

#include "relaybal/lm.hpp"

namespace relaybal {

struct BisectionConfig {
  double eps_bisect = 1e-3;  // stop when the gamma interval is this fraction of gamma_bar
  double delta_lo = 0.6;     // bound-scaling range
  double delta_hi = 1.0;
  int max_steps = 40;
  // Piecewise-linear map from peak-power-to-noise ratio (dB) to the factor
  // applied to gamma_bar when opening the search interval.
  std::vector<std::pair<double, double>> snr_breakpoints{{0.0, 0.6}, {30.0, 1.0}};

  void validate() const;
};

struct BisectionStep {
  double gamma;        // target tried at this step
  double achieved;     // min SINR of the finalized precoder
  bool accepted;       // true when the record improved and the lower end moved up
  int lm_iterations;
  bool stalled;
};

struct SolveReport {
  MatrixXcd Omega;
  VectorXcd omega;
  VectorXd sinrs;               // per-user, from the direct matrix form
  double min_sinr = 0.0;
  double gamma_bar = 0.0;
  double min_rate = 0.0;        // 0.5 log2(1 + min_sinr)
  double ratio_to_bound = 0.0;  // min_rate / (0.5 log2(1 + gamma_bar))
  long iterations = 0;          // LM iterations summed over bisection steps
  double linesearch_per_step = 0.0;
  double wall_time = 0.0;       // seconds
  bool degraded = false;        // no LM solve made progress; bound eigenvector returned
  std::vector<BisectionStep> trace;
};

/// Interval-opening factor for the given SNR, interpolated over the
/// breakpoint table and clamped to [0.6, 1].
double delta_scale(double snr_db, const BisectionConfig& cfg);

/// Half the two-phase sum rate at a given SINR.
double min_rate(double gamma);

/// Max-min balancing: computes the bound, then bisects the SINR target over
/// [0, delta*gamma_bar], running an LM solve per target warm-started from
/// the best iterate so far and keeping the best achieved minimum SINR.
SolveReport balance(const QuadraticProblem& qp, const LMConfig& lm_cfg,
                    const BisectionConfig& bi_cfg);

}  // namespace relaybal
