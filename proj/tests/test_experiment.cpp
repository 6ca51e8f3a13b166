#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "relaybal/experiment.hpp"

using namespace relaybal;

namespace {

ExperimentSpec small_spec(const std::string& out) {
  ExperimentSpec spec;
  spec.trials = 2;
  spec.snr_list_db = {0.0, 10.0};
  spec.system.pairs = 2;
  spec.system.antennas = 3;
  spec.system.seed = 7;
  spec.bisect.eps_bisect = 1e-2;
  spec.out_path = out;
  spec.threads = 2;
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("experiment defaults match the benchmark configuration") {
  ExperimentSpec spec;
  CHECK(spec.system.pairs == 3);
  CHECK(spec.system.antennas == 6);
  CHECK(spec.snr_mac_db == 10.0);
  CHECK(spec.system.power == 10.0);
  CHECK(spec.system.rhoRS == 0.5);
  CHECK(spec.system.rho1 == 0.1);
  CHECK(spec.system.rho2 == 0.1);
  CHECK(spec.lm.nu == 0.9);
  CHECK(spec.lm.eps_lm == 1e-7);
  CHECK(spec.lm.max_iters == 50);
  CHECK(spec.lm.armijo.alpha0 == 0.25);
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("system_for_task derives noise variances and per-trial seeds") {
  ExperimentSpec spec;
  spec.system.seed = 100;
  SystemConfig cfg = system_for_task(spec, 10.0, 3);
  CHECK(cfg.sigma2 == doctest::Approx(1.0).epsilon(1e-12));   // P=10 at 10 dB
  CHECK(cfg.sigmaR2 == doctest::Approx(1.0).epsilon(1e-12));  // SNR_MAC = 10 dB
  CHECK(cfg.seed == 103);

  SystemConfig c0 = system_for_task(spec, 0.0, 0);
  CHECK(c0.sigma2 == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("run_experiment: record cardinality and ordering") {
  ExperimentSpec spec = small_spec("");
  ExperimentResult res = run_experiment(spec);
  REQUIRE(res.records.size() == 4);
  CHECK(res.records[0].snr_db == 0.0);
  CHECK(res.records[0].trial_index == 0);
  CHECK(res.records[1].trial_index == 1);
  CHECK(res.records[2].snr_db == 10.0);
  REQUIRE(res.summary.size() == 2);
  CHECK(res.summary[0].trials == 2);

  for (const TrialRecord& r : res.records) {
    CHECK(r.min_sinr <= r.gamma_bar * (1.0 + 1e-9));
    CHECK(r.rate_ratio_percent >= 0.0);
    CHECK(r.rate_ratio_percent <= 100.0 + 1e-6);
    CHECK(r.seed == spec.system.seed + static_cast<std::uint64_t>(r.trial_index));
  }
}

TEST_CASE("run_experiment + write_csv: byte-identical reruns") {
  const std::string out1 = "det_a.csv";
  const std::string out2 = "det_b.csv";
  ExperimentSpec spec = small_spec(out1);
  write_csv(run_experiment(spec), out1);
  spec.out_path = out2;
  spec.threads = 1;  // thread count must not affect the bytes
  write_csv(run_experiment(spec), out2);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(summary_path_for(out1)) == slurp(summary_path_for(out2)));
  for (const auto& p : {out1, out2}) {
    std::remove(p.c_str());
    std::remove(summary_path_for(p).c_str());
  }
}

TEST_CASE("write_csv: exact header, row shape, and round trip") {
  const std::string out = "roundtrip.csv";
  ExperimentSpec spec = small_spec(out);
  ExperimentResult res = run_experiment(spec);
  write_csv(res, out);

  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  CHECK(header ==
        "snr_db,trial,seed,min_sinr,gamma_bar,min_rate,rate_ratio_percent,"
        "lm_iterations,mean_linesearch,wall_time_ms,degraded");

  std::string line;
  std::size_t rows = 0;
  while (std::getline(f, line)) {
    auto fields = split(line, ',');
    REQUIRE(fields.size() == 11);
    const TrialRecord& r = res.records[rows];
    CHECK(std::stod(fields[0]) == r.snr_db);
    CHECK(std::stoi(fields[1]) == r.trial_index);
    CHECK(std::stoull(fields[2]) == r.seed);
    CHECK(std::stod(fields[3]) == doctest::Approx(r.min_sinr).epsilon(1e-9));
    CHECK(std::stod(fields[4]) == doctest::Approx(r.gamma_bar).epsilon(1e-9));
    CHECK(std::stod(fields[6]) == doctest::Approx(r.rate_ratio_percent).epsilon(1e-9));
    CHECK(std::stol(fields[7]) == r.lm_iterations);
    CHECK((fields[10] == "0" || fields[10] == "1"));
    ++rows;
  }
  CHECK(rows == res.records.size());

  // summary self-consistency against the records
  std::ifstream s(summary_path_for(out));
  REQUIRE(s.good());
  std::getline(s, header);
  std::size_t si = 0;
  while (std::getline(s, line)) {
    auto fields = split(line, ',');
    REQUIRE(fields.size() == 7);
    double mean = 0.0;
    int n = 0;
    for (const auto& r : res.records) {
      if (r.snr_db == std::stod(fields[0])) {
        mean += r.rate_ratio_percent;
        ++n;
      }
    }
    REQUIRE(n == std::stoi(fields[1]));
    CHECK(std::stod(fields[2]) == doctest::Approx(mean / n).epsilon(1e-9));
    ++si;
  }
  CHECK(si == res.summary.size());

  std::remove(out.c_str());
  std::remove(summary_path_for(out).c_str());
}

TEST_CASE("run_experiment: unwritable output fails before computing") {
  ExperimentSpec spec = small_spec("/no/such/directory/out.csv");
  CHECK_THROWS_AS(run_experiment(spec), io_error);
}

TEST_CASE("write_csv: refuses an empty record set") {
  ExperimentResult empty;
  CHECK_THROWS_AS(write_csv(empty, "x.csv"), invalid_parameter);
}

TEST_CASE("summary_path_for: csv extension replaced, others appended") {
  CHECK(summary_path_for("results.csv") == "results.summary.csv");
  CHECK(summary_path_for("out/run1") == "out/run1.summary.csv");
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec spec;
  spec.trials = 0;
  CHECK_THROWS_AS(spec.validate(), invalid_parameter);
  spec = ExperimentSpec{};
  spec.snr_list_db.clear();
  CHECK_THROWS_AS(spec.validate(), invalid_parameter);
}
