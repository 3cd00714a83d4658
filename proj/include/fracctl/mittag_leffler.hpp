#pragma once

#include <Eigen/Dense>

namespace fracctl {

// Parameters (alpha, beta) of the two-parameter Mittag-Leffler function
// E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta). Both must be
// positive. alpha = beta = 1 reduces to the exponential.
struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
};

// Series evaluation controls shared by the scalar and matrix routines.
struct MLOptions {
  // Largest admissible |z| (scalar) or spectral norm (matrix).
  double domain_bound = 50.0;
  // Stop once |term| < tol * (1 + |partial sum|), max-norm for matrices.
  double tol = 1e-16;
  int max_terms = 2000;
};

// Gamma function on the positive reals. Relative accuracy better than 1e-13
// up to x = 170; throws domain_error for x <= 0 and overflow_error past the
// double-precision ceiling x > 171.6.
double gamma(double x);

// log(Gamma(x)) for x > 0. Used for stable term ratios in the series.
double log_gamma(double x);

// Largest singular value. Matrices here are small, so this is exact rather
// than an iterative estimate.
double spectral_norm(const Eigen::MatrixXd& A);

// Truncated power series for E_{alpha,beta}(z). Throws domain_error when |z|
// exceeds the domain bound and convergence_error when the term cap is hit.
// For strongly negative z with alpha < 1 the alternating series cancels
// catastrophically, so the achievable relative accuracy degrades by the
// summation condition number sum|term|/|sum|.
double ml_scalar(const MLParams& p, double z, const MLOptions& opts = {});

// Matrix version via iterated products, same stopping rule on the max-norm.
Eigen::MatrixXd ml_matrix(const MLParams& p, const Eigen::MatrixXd& A,
                          const MLOptions& opts = {});

}  // namespace fracctl
