#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "relaybal/sinr.hpp"

using namespace relaybal;
using testkit::make_instance;

namespace {

SystemConfig scalar_config() {
  SystemConfig cfg;
  cfg.pairs = 1;
  cfg.antennas = 1;
  cfg.sigma2 = 1.0;
  cfg.sigmaR2 = 1.0;
  cfg.power = 1.0;
  return cfg;
}

ChannelSet unit_scalar_channels() {
  ChannelSet ch;
  ch.H1 = MatrixXcd::Ones(1, 1);
  ch.H2 = MatrixXcd::Ones(1, 1);
  return ch;
}

}  // namespace

TEST_CASE("build_quadratic_problem: scalar expansion") {
  QuadraticProblem qp = build_quadratic_problem(unit_scalar_channels(), scalar_config());
  REQUIRE(qp.users() == 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(qp.Q[j](0, 0) == cplx(1.0, 0.0));
    CHECK(qp.Pmat[j](0, 0) == cplx(1.0, 0.0));
  }
  CHECK(qp.Z(0, 0) == cplx(3.0, 0.0));
}

TEST_CASE("build_quadratic_problem: zero channels leave only the noise structure") {
  SystemConfig cfg;
  cfg.pairs = 2;
  cfg.antennas = 3;
  cfg.sigmaR2 = 2.5;
  ChannelSet ch;
  ch.H1 = MatrixXcd::Zero(3, 2);
  ch.H2 = MatrixXcd::Zero(3, 2);
  QuadraticProblem qp = build_quadratic_problem(ch, cfg);
  for (int j = 0; j < qp.users(); ++j) {
    CHECK(qp.Q[j].norm() == 0.0);
    CHECK(qp.Pmat[j].norm() == 0.0);  // the noise form collapses with A_t = 0
  }
  CHECK(qp.Z.isApprox(2.5 * MatrixXcd::Identity(9, 9), 1e-15));
}

TEST_CASE("build_quadratic_problem: entrywise construction oracle") {
  auto in = make_instance(101, 3, 6);
  const int nr = 6, m = 3;
  for (int t = 0; t < 2; ++t) {
    const MatrixXcd A = (t == 0 ? in.ch.H1 : in.ch.H2).transpose();
    const MatrixXcd B = (t == 0 ? in.ch.H2 : in.ch.H1);
    for (int i = 0; i < m; ++i) {
      // q built entry by entry, independent of the library's assembly
      VectorXcd q(nr * nr);
      for (int k = 0; k < nr; ++k) {
        for (int r = 0; r < nr; ++r) {
          q(k * nr + r) = std::conj(A(i, r) * B(k, i));
        }
      }
      const int u = user_index(t, i, m);
      CHECK(in.qp.q[u].isApprox(q, 1e-14));
      CHECK(in.qp.Q[u].isApprox(q * q.adjoint(), 1e-14));
    }
  }
}

TEST_CASE("build_quadratic_problem: rejects mismatched dimensions") {
  SystemConfig cfg;
  cfg.pairs = 2;
  cfg.antennas = 3;
  ChannelSet ch;
  ch.H1 = MatrixXcd::Zero(3, 2);
  ch.H2 = MatrixXcd::Zero(4, 2);
  CHECK_THROWS_AS(build_quadratic_problem(ch, cfg), structural_error);
}

TEST_CASE("relay_power: identity precoder with zero channels counts relay noise only") {
  ChannelSet ch;
  ch.H1 = MatrixXcd::Zero(4, 2);
  ch.H2 = MatrixXcd::Zero(4, 2);
  CHECK(relay_power(MatrixXcd::Identity(4, 4), ch, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(relay_power(MatrixXcd::Zero(4, 4), ch, 1.0) == 0.0);
}

TEST_CASE("relay_power: matches the vectorized quadratic form") {
  GaussianStream rng(3);
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto in = make_instance(200 + s, 2, 4);
    VectorXcd omega = testkit::random_complex_vector(16, rng);
    const double direct = relay_power(unvec(omega), in.ch, in.cfg.sigmaR2);
    const double quad = (omega.dot(in.qp.Z * omega)).real();
    CHECK(std::abs(direct - quad) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("sinr_direct: zero precoder yields zero SINR") {
  auto in = make_instance(7, 2, 3);
  VectorXd g = sinr_direct(MatrixXcd::Zero(3, 3), in.ch, in.cfg);
  CHECK(g.isZero(0.0));
}

TEST_CASE("sinr_direct and sinr_quadratic: scalar closed form") {
  SystemConfig cfg = scalar_config();
  ChannelSet ch = unit_scalar_channels();
  QuadraticProblem qp = build_quadratic_problem(ch, cfg);

  const double w = std::sqrt(1.0 / 3.0);
  MatrixXcd Omega(1, 1);
  Omega(0, 0) = w;
  VectorXd direct = sinr_direct(Omega, ch, cfg);
  VectorXcd omega(1);
  omega(0) = w;
  VectorXd quad = sinr_quadratic(omega, qp);
  for (int j = 0; j < 2; ++j) {
    CHECK(direct(j) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(quad(j) == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("sinr representations agree on random instances") {
  GaussianStream rng(17);
  for (std::uint64_t s = 0; s < 25; ++s) {
    auto in = make_instance(300 + s, 1 + static_cast<int>(s % 3), 2 + static_cast<int>(s % 5));
    VectorXcd omega = testkit::random_feasible_precoder(in.qp, rng);
    VectorXd direct = sinr_direct(unvec(omega), in.ch, in.cfg);
    VectorXd quad = sinr_quadratic(omega, in.qp);
    for (int j = 0; j < in.qp.users(); ++j)
      CHECK(std::abs(direct(j) - quad(j)) <= 1e-8 * std::max(1.0, std::abs(direct(j))));
  }
}

TEST_CASE("sinr_quadratic: zero input and independent recomputation under scaling") {
  auto in = make_instance(5, 2, 3);
  CHECK(sinr_quadratic(VectorXcd::Zero(9), in.qp).isZero(0.0));

  GaussianStream rng(23);
  VectorXcd omega = testkit::random_complex_vector(9, rng);
  const cplx c(1.7, -0.4);
  VectorXd scaled = sinr_quadratic(omega * c, in.qp);
  for (int j = 0; j < in.qp.users(); ++j) {
    const VectorXcd oc = omega * c;
    const double num = std::norm(in.qp.q[j].dot(oc));
    const double den = (oc.dot(in.qp.Pmat[j] * oc)).real() + in.qp.sigma2;
    CHECK(scaled(j) == doctest::Approx(num / den).epsilon(1e-12));
  }
}

TEST_CASE("quadratic-form terms are degree-2 homogeneous") {
  auto in = make_instance(9, 2, 4);
  GaussianStream rng(31);
  VectorXcd omega = testkit::random_complex_vector(16, rng);
  const cplx c(0.3, 1.9);
  const double mag2 = std::norm(c);
  for (int j = 0; j < in.qp.users(); ++j) {
    const double num = std::norm(in.qp.q[j].dot(omega));
    const double num_scaled = std::norm(in.qp.q[j].dot((omega * c).eval()));
    CHECK(num_scaled == doctest::Approx(mag2 * num).epsilon(1e-10));
    const double den = (omega.dot(in.qp.Pmat[j] * omega)).real();
    const double den_scaled = ((omega * c).eval().dot(in.qp.Pmat[j] * (omega * c).eval())).real();
    CHECK(den_scaled == doctest::Approx(mag2 * den).epsilon(1e-10));
  }
}

TEST_CASE("P forms are PSD and Q forms are rank one") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto in = make_instance(400 + s, 2, 4);
    for (int j = 0; j < in.qp.users(); ++j) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> pe(in.qp.Pmat[j]);
      CHECK(pe.eigenvalues().minCoeff() >= -1e-12 * in.qp.Pmat[j].norm());
      Eigen::SelfAdjointEigenSolver<MatrixXcd> qe(in.qp.Q[j]);
      const double tol = 1e-12 * in.qp.Q[j].norm();
      int nonzero = 0;
      for (int i = 0; i < qe.eigenvalues().size(); ++i)
        if (std::abs(qe.eigenvalues()(i)) > tol) ++nonzero;
      CHECK(nonzero == 1);
    }
  }
}

TEST_CASE("unvec: column-major reshape and round trip") {
  VectorXcd v(4);
  v << 1.0, 2.0, 3.0, 4.0;
  MatrixXcd expect(2, 2);
  expect << 1.0, 3.0, 2.0, 4.0;
  CHECK(unvec(v).isApprox(expect, 0.0));

  VectorXcd id(4);
  id << 1.0, 0.0, 0.0, 1.0;
  CHECK(unvec(id).isApprox(MatrixXcd::Identity(2, 2), 0.0));

  GaussianStream rng(13);
  VectorXcd r = testkit::random_complex_vector(9, rng);
  CHECK(vec(unvec(r)).isApprox(r, 0.0));

  VectorXcd bad(3);
  bad << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(unvec(bad), structural_error);
}
