#pragma once

#include <optional>

#include <Eigen/Dense>

#include "fracctl/ensemble.hpp"

namespace fracctl {

struct KalmanReport {
  Eigen::MatrixXd K;                // n x (n m) block matrix
  Eigen::VectorXd singular_values;  // nonincreasing
  int rank = 0;
  double tolerance = 0.0;
  int rank_target = 0;  // n for the averaged test, p n for the extended one
  bool controllable_in_average = false;  // rank == rank_target
};

// Averaged Kalman matrix [E(B) E(AB) ... E(A^{n-1}B)] with E(A^k B) formed as
// the expectation of the per-member product A^k B, never E(A)^k E(B). Rank by
// SVD with tolerance max(n, n m) * eps * sigma_max unless overridden.
KalmanReport averaged_kalman(const ParameterEnsemble& e,
                             std::optional<double> tol_override = {});

// Block system for a finite parameter set: bold_A = diag(A_1, ..., A_p),
// bold_B = [B_1; ...; B_p]. Only meaningful when the member list is the full
// support, so Monte Carlo ensembles are rejected.
struct ExtendedSystem {
  Eigen::MatrixXd bold_A;  // p n x p n block diagonal
  Eigen::MatrixXd bold_B;  // p n x m stacked
  int p = 0;
  Eigen::Index block_dim = 0;  // n
};

ExtendedSystem extended_system(const ParameterEnsemble& e);

// Classical Kalman test of the extended pair: rank of
// [bold_B bold_A bold_B ... bold_A^{pn-1} bold_B] against p n decides exact
// simultaneous controllability.
KalmanReport simultaneous_kalman_check(const ParameterEnsemble& e,
                                       std::optional<double> tol_override = {});

}  // namespace fracctl
