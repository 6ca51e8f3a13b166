#pragma once

#include <string>
#include <vector>

#include "relaybal/balance.hpp"

namespace relaybal {

struct ExperimentSpec {
  int trials = 100;
  std::vector<double> snr_list_db{0.0, 10.0, 20.0, 30.0};  // 10 log10(P/sigma^2)
  double snr_mac_db = 10.0;                                // 10 log10(P/sigmaR^2)
  SystemConfig system;     // template; sigma2/sigmaR2/seed are derived per task
  LMConfig lm;
  BisectionConfig bisect;
  std::string out_path = "results.csv";
  int threads = 0;         // 0 = hardware concurrency
  bool measure_time = false;  // wall_time_ms is written as 0 unless enabled

  void validate() const;
};

struct TrialRecord {
  double snr_db = 0.0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double min_sinr = 0.0;
  double gamma_bar = 0.0;
  double min_rate = 0.0;
  double rate_ratio_percent = 0.0;
  long lm_iterations = 0;
  double mean_linesearch = 0.0;
  double wall_time_ms = 0.0;
  bool degraded = false;
};

struct SnrSummary {
  double snr_db = 0.0;
  int trials = 0;
  double mean_rate_ratio_percent = 0.0;
  double median_rate_ratio_percent = 0.0;
  double mean_lm_iterations = 0.0;
  double mean_linesearch = 0.0;
  double mean_wall_time_ms = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;   // sorted by (snr_db, trial)
  std::vector<SnrSummary> summary;    // one row per SNR point
};

/// System configuration for one (snr, trial) task: noise variances derived
/// from the two SNR definitions, seed = base seed + trial index.
SystemConfig system_for_task(const ExperimentSpec& spec, double snr_db, int trial_index);

/// Full solve of a single task, returning both the record and the report.
TrialRecord run_trial(const ExperimentSpec& spec, double snr_db, int trial_index,
                      SolveReport* report = nullptr);

/// Monte-Carlo sweep over all (snr, trial) tasks with a worker pool.
/// Deterministic for a fixed ExperimentSpec regardless of thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes records to path and the per-SNR summary to the sibling
/// "<stem>.summary.csv". Floats carry 10 significant digits.
void write_csv(const ExperimentResult& result, const std::string& path);

std::string summary_path_for(const std::string& path);

}  // namespace relaybal
