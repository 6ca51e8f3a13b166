#pragma once

#include <cmath>

#include "relaybal/bound.hpp"
#include "relaybal/channel.hpp"
#include "relaybal/sinr.hpp"

namespace relaybal::testkit {

struct Instance {
  SystemConfig cfg;
  ChannelSet ch;
  QuadraticProblem qp;
};

inline Instance make_instance(std::uint64_t seed, int pairs, int antennas, double snr_db = 10.0,
                              double snr_mac_db = 10.0, double power = 10.0) {
  SystemConfig cfg;
  cfg.pairs = pairs;
  cfg.antennas = antennas;
  cfg.power = power;
  cfg.sigma2 = power / std::pow(10.0, snr_db / 10.0);
  cfg.sigmaR2 = power / std::pow(10.0, snr_mac_db / 10.0);
  cfg.seed = seed;
  Instance in;
  in.cfg = cfg;
  in.ch = generate_channels(cfg);
  in.qp = build_quadratic_problem(in.ch, cfg);
  return in;
}

inline VectorXcd random_complex_vector(int n, GaussianStream& rng) {
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.next_complex();
  return v;
}

// Random precoder on the power boundary, omega^H Z omega = P.
inline VectorXcd random_feasible_precoder(const QuadraticProblem& qp, GaussianStream& rng) {
  VectorXcd v = random_complex_vector(qp.dim(), rng);
  const double p = (v.dot(qp.Z * v)).real();
  return v * std::sqrt(qp.power / p);
}

// Synthetic whitened problem with a planted root: F_j is rank one with
// |f_j^H w*|^2 = gamma w*^H G_j w*, so f(w*) = 0 without D_j w* vanishing.
struct Planted {
  WhitenedProblem wp;
  VectorXcd w_star;
  double gamma;
};

inline Planted plant_root(int n, int users, double gamma, GaussianStream& rng) {
  Planted p;
  p.gamma = gamma;
  VectorXcd w = random_complex_vector(n, rng);
  w.normalize();
  p.w_star = w;
  p.wp.power = 1.0;
  p.wp.Zhalf_inv = MatrixXcd::Identity(n, n);
  for (int j = 0; j < users; ++j) {
    MatrixXcd L(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) L(r, c) = rng.next_complex();
    MatrixXcd G = L * L.adjoint() / n + 0.2 * MatrixXcd::Identity(n, n);
    const double target = gamma * (w.dot(G * w)).real();
    VectorXcd u = random_complex_vector(n, rng);
    const cplx overlap = u.dot(w);  // u^H w
    VectorXcd f = u + std::conj(cplx(std::sqrt(target), 0.0) - overlap) * w;
    p.wp.G.push_back(std::move(G));
    p.wp.F.push_back(f * f.adjoint());
  }
  return p;
}

}  // namespace relaybal::testkit
