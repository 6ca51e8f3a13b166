#include "relaybal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "relaybal/channel.hpp"

namespace relaybal {

void ExperimentSpec::validate() const {
  if (trials < 1) throw invalid_parameter("trials must be >= 1");
  if (snr_list_db.empty()) throw invalid_parameter("snr list must be non-empty");
  if (threads < 0) throw invalid_parameter("threads must be >= 0");
  system.validate();
  lm.validate();
  bisect.validate();
}

SystemConfig system_for_task(const ExperimentSpec& spec, double snr_db, int trial_index) {
  SystemConfig cfg = spec.system;
  cfg.sigma2 = cfg.power / std::pow(10.0, snr_db / 10.0);
  cfg.sigmaR2 = cfg.power / std::pow(10.0, spec.snr_mac_db / 10.0);
  cfg.seed = spec.system.seed + static_cast<std::uint64_t>(trial_index);
  return cfg;
}

TrialRecord run_trial(const ExperimentSpec& spec, double snr_db, int trial_index,
                      SolveReport* report) {
  const SystemConfig cfg = system_for_task(spec, snr_db, trial_index);
  const ChannelSet ch = generate_channels(cfg);
  const QuadraticProblem qp = build_quadratic_problem(ch, cfg);
  SolveReport rep = balance(qp, spec.lm, spec.bisect);

  TrialRecord rec;
  rec.snr_db = snr_db;
  rec.trial_index = trial_index;
  rec.seed = cfg.seed;
  rec.min_sinr = rep.min_sinr;
  rec.gamma_bar = rep.gamma_bar;
  rec.min_rate = rep.min_rate;
  rec.rate_ratio_percent = 100.0 * rep.ratio_to_bound;
  rec.lm_iterations = rep.iterations;
  rec.mean_linesearch = rep.linesearch_per_step;
  rec.wall_time_ms = spec.measure_time ? rep.wall_time * 1e3 : 0.0;
  rec.degraded = rep.degraded;
  if (report) *report = std::move(rep);
  return rec;
}

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (!spec.out_path.empty()) {
    std::ofstream probe(spec.out_path, std::ios::app);
    if (!probe) throw io_error("cannot open output path: " + spec.out_path);
  }

  const std::size_t n_snr = spec.snr_list_db.size();
  const std::size_t total = n_snr * static_cast<std::size_t>(spec.trials);
  std::vector<TrialRecord> records(total);

  unsigned n_threads = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(total));

  std::atomic<std::size_t> cursor{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= total) return;
      const double snr = spec.snr_list_db[i / spec.trials];
      const int trial = static_cast<int>(i % spec.trials);
      try {
        records[i] = run_trial(spec, snr, trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return a.snr_db != b.snr_db ? a.snr_db < b.snr_db : a.trial_index < b.trial_index;
  });

  ExperimentResult result;
  result.records = std::move(records);
  for (std::size_t start = 0; start < total; start += spec.trials) {
    std::vector<double> ratios, iters, linesearch, walls;
    for (std::size_t i = start; i < start + spec.trials; ++i) {
      const TrialRecord& r = result.records[i];
      ratios.push_back(r.rate_ratio_percent);
      iters.push_back(static_cast<double>(r.lm_iterations));
      linesearch.push_back(r.mean_linesearch);
      walls.push_back(r.wall_time_ms);
    }
    SnrSummary s;
    s.snr_db = result.records[start].snr_db;
    s.trials = spec.trials;
    s.mean_rate_ratio_percent = mean_of(ratios);
    s.median_rate_ratio_percent = median_of(ratios);
    s.mean_lm_iterations = mean_of(iters);
    s.mean_linesearch = mean_of(linesearch);
    s.mean_wall_time_ms = mean_of(walls);
    result.summary.push_back(s);
  }
  return result;
}

namespace {

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string summary_path_for(const std::string& path) {
  const std::string ext = ".csv";
  std::string stem = path;
  if (stem.size() >= ext.size() && stem.compare(stem.size() - ext.size(), ext.size(), ext) == 0)
    stem.erase(stem.size() - ext.size());
  return stem + ".summary.csv";
}

void write_csv(const ExperimentResult& result, const std::string& path) {
  if (result.records.empty()) throw invalid_parameter("write_csv: no records");

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw io_error("cannot open output path: " + path);
  f << "snr_db,trial,seed,min_sinr,gamma_bar,min_rate,rate_ratio_percent,"
       "lm_iterations,mean_linesearch,wall_time_ms,degraded\n";
  for (const TrialRecord& r : result.records) {
    f << fmt_g(r.snr_db) << ',' << r.trial_index << ',' << r.seed << ',' << fmt_g(r.min_sinr)
      << ',' << fmt_g(r.gamma_bar) << ',' << fmt_g(r.min_rate) << ','
      << fmt_g(r.rate_ratio_percent) << ',' << r.lm_iterations << ',' << fmt_g(r.mean_linesearch)
      << ',' << fmt_g(r.wall_time_ms) << ',' << (r.degraded ? 1 : 0) << '\n';
  }
  if (!f) throw io_error("write failed: " + path);
  f.close();

  const std::string spath = summary_path_for(path);
  std::ofstream s(spath, std::ios::trunc);
  if (!s) throw io_error("cannot open output path: " + spath);
  s << "snr_db,trials,mean_rate_ratio_percent,median_rate_ratio_percent,"
       "mean_lm_iterations,mean_linesearch,mean_wall_time_ms\n";
  for (const SnrSummary& row : result.summary) {
    s << fmt_g(row.snr_db) << ',' << row.trials << ',' << fmt_g(row.mean_rate_ratio_percent)
      << ',' << fmt_g(row.median_rate_ratio_percent) << ',' << fmt_g(row.mean_lm_iterations)
      << ',' << fmt_g(row.mean_linesearch) << ',' << fmt_g(row.mean_wall_time_ms) << '\n';
  }
  if (!s) throw io_error("write failed: " + spath);
}

}  // namespace relaybal
