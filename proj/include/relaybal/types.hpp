#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace relaybal {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct structural_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario parameters: M user pairs exchanging data over an N_R-antenna
/// amplify-and-forward relay, with a sum power budget at the relay.
struct SystemConfig {
  int pairs = 3;            // M
  int antennas = 6;         // N_R
  double sigma2 = 1.0;      // downlink noise variance
  double sigmaR2 = 1.0;     // relay noise variance
  double power = 10.0;      // relay power budget P
  double rho1 = 0.1;        // antenna correlation, first user group
  double rho2 = 0.1;        // antenna correlation, second user group
  double rhoRS = 0.5;       // antenna correlation at the relay
  std::uint64_t seed = 1;

  int users() const { return 2 * pairs; }
  void validate() const;
};

/// Uplink channels of both user groups; column i of Ht is the channel of
/// user i in group t.
struct ChannelSet {
  MatrixXcd H1;  // N_R x M
  MatrixXcd H2;  // N_R x M

  int pairs() const { return static_cast<int>(H1.cols()); }
  int antennas() const { return static_cast<int>(H1.rows()); }
};

// Global user ordering: user i of group t (both 0-based) sits at
// j = t*M + i among the 2M per-user quantities.
inline int user_index(int group, int i, int pairs) { return group * pairs + i; }
inline int group_of(int j, int pairs) { return j / pairs; }
inline int user_of(int j, int pairs) { return j % pairs; }

}  // namespace relaybal
