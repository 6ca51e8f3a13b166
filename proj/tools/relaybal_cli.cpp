#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "relaybal/channel.hpp"
#include "relaybal/experiment.hpp"

using json = nlohmann::json;
using namespace relaybal;

namespace {

void load_config(ExperimentSpec& spec, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot read config file: " + path);
  json j = json::parse(f);

  if (j.contains("trials")) spec.trials = j["trials"].get<int>();
  if (j.contains("snr_db")) spec.snr_list_db = j["snr_db"].get<std::vector<double>>();
  if (j.contains("snr_mac_db")) spec.snr_mac_db = j["snr_mac_db"].get<double>();
  if (j.contains("pairs")) spec.system.pairs = j["pairs"].get<int>();
  if (j.contains("antennas")) spec.system.antennas = j["antennas"].get<int>();
  if (j.contains("power")) spec.system.power = j["power"].get<double>();
  if (j.contains("rho_rs")) spec.system.rhoRS = j["rho_rs"].get<double>();
  if (j.contains("rho1")) spec.system.rho1 = j["rho1"].get<double>();
  if (j.contains("rho2")) spec.system.rho2 = j["rho2"].get<double>();
  if (j.contains("seed")) spec.system.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) spec.threads = j["threads"].get<int>();
  if (j.contains("timing")) spec.measure_time = j["timing"].get<bool>();
  if (j.contains("out")) spec.out_path = j["out"].get<std::string>();
  if (j.contains("lm")) {
    const json& l = j["lm"];
    if (l.contains("nu")) spec.lm.nu = l["nu"].get<double>();
    if (l.contains("eps_lm")) spec.lm.eps_lm = l["eps_lm"].get<double>();
    if (l.contains("n_max")) spec.lm.max_iters = l["n_max"].get<int>();
    if (l.contains("alpha0")) spec.lm.armijo.alpha0 = l["alpha0"].get<double>();
    if (l.contains("beta")) spec.lm.armijo.beta = l["beta"].get<double>();
    if (l.contains("c1")) spec.lm.armijo.c1 = l["c1"].get<double>();
    if (l.contains("max_backtracks")) spec.lm.armijo.max_backtracks = l["max_backtracks"].get<int>();
  }
  if (j.contains("bisect")) {
    const json& b = j["bisect"];
    if (b.contains("eps_bisect")) spec.bisect.eps_bisect = b["eps_bisect"].get<double>();
    if (b.contains("delta_lo")) spec.bisect.delta_lo = b["delta_lo"].get<double>();
    if (b.contains("delta_hi")) spec.bisect.delta_hi = b["delta_hi"].get<double>();
    if (b.contains("max_steps")) spec.bisect.max_steps = b["max_steps"].get<int>();
    if (b.contains("delta_breakpoints")) {
      spec.bisect.snr_breakpoints.clear();
      for (const auto& pt : b["delta_breakpoints"])
        spec.bisect.snr_breakpoints.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    }
  }
}

void add_instance_flags(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--snr-mac", spec.snr_mac_db, "MAC-phase SNR, 10 log10(P/sigmaR^2), in dB");
  cmd->add_option("--pairs", spec.system.pairs, "number of user pairs M");
  cmd->add_option("--antennas", spec.system.antennas, "relay antennas N_R");
  cmd->add_option("--power", spec.system.power, "relay power budget P");
  cmd->add_option("--rho-rs", spec.system.rhoRS, "relay-side antenna correlation");
  cmd->add_option("--rho1", spec.system.rho1, "group-1 antenna correlation");
  cmd->add_option("--rho2", spec.system.rho2, "group-2 antenna correlation");
  cmd->add_option("--seed", spec.system.seed, "base RNG seed");
  cmd->add_option("--eps-bisect", spec.bisect.eps_bisect, "bisection tolerance relative to the bound");
  cmd->add_option("--nmax", spec.lm.max_iters, "LM iteration cap per bisection step");
  cmd->add_option("--nu", spec.lm.nu, "full-step acceptance factor");
  cmd->add_option("--eps-lm", spec.lm.eps_lm, "LM gradient-norm stop");
  cmd->add_option("--alpha0", spec.lm.armijo.alpha0, "initial Armijo step");
}

void print_report(double snr_db, const TrialRecord& rec, const SolveReport& rep) {
  std::printf("instance:   snr=%g dB, seed=%llu\n", snr_db,
              static_cast<unsigned long long>(rec.seed));
  std::printf("bound:      gamma_bar=%.8g  (min rate bound %.8g bit/use)\n", rep.gamma_bar,
              min_rate(rep.gamma_bar));
  std::printf("achieved:   min_sinr=%.8g  min_rate=%.8g  ratio=%.4f%%\n", rep.min_sinr,
              rep.min_rate, rec.rate_ratio_percent);
  std::printf("per-user SINR:");
  for (int j = 0; j < rep.sinrs.size(); ++j) std::printf(" %.6g", rep.sinrs(j));
  std::printf("\n");
  std::printf("solver:     lm_iterations=%ld  mean_linesearch=%.3f  bisection_steps=%zu\n",
              rep.iterations, rep.linesearch_per_step, rep.trace.size());
  std::printf("wall time:  %.1f ms%s\n", rep.wall_time * 1e3, rep.degraded ? "  [degraded]" : "");
}

int run_bench(const ExperimentSpec& spec) {
  ExperimentResult res = run_experiment(spec);
  write_csv(res, spec.out_path);
  std::printf("%8s %8s %12s %12s %10s %12s\n", "snr_db", "trials", "mean_ratio%", "med_ratio%",
              "mean_iters", "mean_ls");
  for (const SnrSummary& s : res.summary)
    std::printf("%8g %8d %12.4f %12.4f %10.2f %12.3f\n", s.snr_db, s.trials,
                s.mean_rate_ratio_percent, s.median_rate_ratio_percent, s.mean_lm_iterations,
                s.mean_linesearch);
  std::printf("records: %zu -> %s (summary: %s)\n", res.records.size(), spec.out_path.c_str(),
              summary_path_for(spec.out_path).c_str());
  for (const TrialRecord& r : res.records)
    if (r.degraded) return 2;
  return 0;
}

int run_check(std::uint64_t seed) {
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok) ++failures;
  };
  auto make = [&](std::uint64_t s, int pairs, int antennas, double snr_db) {
    SystemConfig cfg;
    cfg.pairs = pairs;
    cfg.antennas = antennas;
    cfg.power = 10.0;
    cfg.sigma2 = cfg.power / std::pow(10.0, snr_db / 10.0);
    cfg.sigmaR2 = 1.0;
    cfg.seed = s;
    return std::make_pair(cfg, generate_channels(cfg));
  };
  GaussianStream rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto random_feasible = [&](const QuadraticProblem& qp) {
    VectorXcd v(qp.dim());
    for (int i = 0; i < qp.dim(); ++i) v(i) = rng.next_complex();
    return (v * std::sqrt(qp.power / (v.dot(qp.Z * v)).real())).eval();
  };

  {  // two SINR routes agree; Kronecker/trace identity holds
    double worst_sinr = 0.0, worst_kron = 0.0;
    for (int k = 0; k < 25; ++k) {
      auto [cfg, ch] = make(seed + k, 1 + k % 3, 2 + k % 5, 10.0);
      QuadraticProblem qp = build_quadratic_problem(ch, cfg);
      VectorXcd omega = random_feasible(qp);
      VectorXd direct = sinr_direct(unvec(omega), ch, cfg);
      VectorXd quad = sinr_quadratic(omega, qp);
      for (int j = 0; j < qp.users(); ++j)
        worst_sinr = std::max(worst_sinr,
                              std::abs(direct(j) - quad(j)) / std::max(1.0, std::abs(direct(j))));
      const double tr = relay_power(unvec(omega), ch, cfg.sigmaR2);
      worst_kron = std::max(worst_kron,
                            std::abs(tr - (omega.dot(qp.Z * omega)).real()) / std::max(1.0, tr));
    }
    report("sinr representation equivalence", worst_sinr <= 1e-8,
           "max rel err " + std::to_string(worst_sinr));
    report("kronecker trace identity", worst_kron <= 1e-10,
           "max rel err " + std::to_string(worst_kron));
  }

  {  // sampled feasible precoders never beat the bound
    bool ok = true;
    for (int k = 0; k < 10 && ok; ++k) {
      auto [cfg, ch] = make(seed + 100 + k, 2, 4, 10.0);
      QuadraticProblem qp = build_quadratic_problem(ch, cfg);
      BoundResult b = upper_bound(whiten(qp));
      for (int i = 0; i < 2000; ++i) {
        if (sinr_quadratic(random_feasible(qp), qp).minCoeff() >
            b.gamma_bar * (1.0 + 1e-9)) {
          ok = false;
          break;
        }
      }
    }
    report("bound dominance over sampled precoders", ok, "");
  }

  {  // analytic Jacobian against central differences
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      auto [cfg, ch] = make(seed + 200 + k, 2, 3, 10.0);
      QuadraticProblem qp = build_quadratic_problem(ch, cfg);
      WhitenedProblem wp = whiten(qp);
      BoundResult b = upper_bound(wp);
      RealifiedSystem sys = build_realified_system(wp, 0.7 * b.gamma_bar);
      VectorXd w = realify_vector(b.w0);
      MatrixXd J = jacobian(w, sys);
      const double h = 1e-6;
      MatrixXd Jfd(sys.equations(), sys.dim());
      for (int c = 0; c < sys.dim(); ++c) {
        VectorXd wp_ = w, wm = w;
        wp_(c) += h;
        wm(c) -= h;
        Jfd.col(c) = (residual(wp_, sys) - residual(wm, sys)) / (2.0 * h);
      }
      worst = std::max(worst, (Jfd - J).norm() / J.norm());
    }
    report("jacobian finite-difference check", worst <= 1e-5,
           "max rel err " + std::to_string(worst));
  }

  {  // finalized precoders sit exactly on the power budget
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      auto [cfg, ch] = make(seed + 300 + k, 2, 4, 10.0);
      QuadraticProblem qp = build_quadratic_problem(ch, cfg);
      WhitenedProblem wp = whiten(qp);
      VectorXcd w(qp.dim());
      for (int i = 0; i < qp.dim(); ++i) w(i) = rng.next_complex();
      w.normalize();
      VectorXcd omega = finalize_precoder(w, wp, qp.power);
      worst = std::max(worst, std::abs(relay_power(unvec(omega), ch, cfg.sigmaR2) - qp.power) /
                                  qp.power);
    }
    report("power tightness after finalize", worst <= 1e-9,
           "max rel err " + std::to_string(worst));
  }

  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min fair precoding for the multi-pair two-way AF relay"};
  app.require_subcommand(1);

  ExperimentSpec spec;
  std::string config_path;
  double snr_db = 10.0;
  std::uint64_t check_seed = 1;

  CLI::App* bench = app.add_subcommand("bench", "Monte-Carlo SNR sweep, writes CSV");
  bench->add_option("--config", config_path, "JSON config file (flags override it)");
  bench->add_option("--trials", spec.trials, "channel draws per SNR point");
  bench->add_option("--snr", spec.snr_list_db, "peak power to noise ratios in dB")
      ->delimiter(',');
  bench->add_option("--out", spec.out_path, "output CSV path");
  bench->add_option("--threads", spec.threads, "worker threads (0 = all cores)");
  bench->add_flag("--timing", spec.measure_time,
                  "record wall times (CSV bytes then vary run to run)");
  add_instance_flags(bench, spec);

  CLI::App* solve = app.add_subcommand("solve", "solve one instance and print the report");
  solve->add_option("--snr", snr_db, "peak power to noise ratio in dB");
  add_instance_flags(solve, spec);

  CLI::App* bnd = app.add_subcommand("bound", "print the minimax upper bound only");
  bnd->add_option("--snr", snr_db, "peak power to noise ratio in dB");
  add_instance_flags(bnd, spec);

  CLI::App* check = app.add_subcommand("check", "run the numerical property suites");
  check->add_option("--seed", check_seed, "base seed for the random suites");

  // The config file is applied before parsing, so its values become the
  // defaults and explicitly passed flags override them.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0)
      config_path = a.substr(9);
  }
  if (!config_path.empty()) {
    try {
      load_config(spec, config_path);
    } catch (const io_error& e) {
      std::cerr << "io error: " << e.what() << "\n";
      return 1;
    } catch (const json::exception& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (bench->parsed()) {
      return run_bench(spec);
    }
    if (solve->parsed()) {
      SolveReport rep;
      TrialRecord rec = run_trial(spec, snr_db, 0, &rep);
      print_report(snr_db, rec, rep);
      return rep.degraded ? 2 : 0;
    }
    if (bnd->parsed()) {
      SystemConfig cfg = system_for_task(spec, snr_db, 0);
      QuadraticProblem qp = build_quadratic_problem(generate_channels(cfg), cfg);
      BoundResult b = upper_bound(whiten(qp));
      std::printf("gamma_bar = %.10g  (binding user %d)\n", b.gamma_bar, b.j_star);
      std::printf("per-user lambda_max:");
      for (int j = 0; j < b.per_user_max.size(); ++j) std::printf(" %.10g", b.per_user_max(j));
      std::printf("\n");
      return 0;
    }
    if (check->parsed()) return run_check(check_seed);
  } catch (const invalid_parameter& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const structural_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 1;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
