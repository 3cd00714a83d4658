#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

// Independent verification routes for the test suites. Nothing here shares
// code with the library's series evaluation or quadrature paths.
namespace oracles {

// Fractional Adams-Bashforth-Moulton predictor-corrector for the Caputo
// system d^alpha x = A x + B u(t), x(0) = x0, on N uniform steps. Returns
// x(T). Full-memory scheme, O(N^2).
Eigen::VectorXd abm_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const std::function<Eigen::VectorXd(double)>& u,
                          const Eigen::VectorXd& x0, double alpha, double T,
                          int N);

// Classical RK4 for x' = A x + B u with u piecewise constant per subinterval,
// integrated with `substeps` stages inside each subinterval so the
// discontinuities fall on step boundaries. Returns all node states.
std::vector<Eigen::VectorXd> rk4_solve(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
    const std::vector<Eigen::VectorXd>& u_values, const Eigen::VectorXd& x0,
    double T, int substeps);

// Scaling-and-squaring matrix exponential.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

// int_0^T e^{sA} B B^T e^{sA^T} ds by composite Simpson quadrature over the
// matrix exponential.
Eigen::MatrixXd classical_gramian(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B, double T,
                                  int simpson_cells);

// Mittag-Leffler partial sum in 50-decimal-digit arithmetic, truncated once
// the term drops below 1e-45 of the running sum.
double mp_ml(double alpha, double beta, double z);

// Condition number of the series summation, sum |term| / |sum|. A double
// precision summation cannot do better than eps times this factor, which is
// what limits accuracy for strongly negative arguments.
double mp_ml_condition(double alpha, double beta, double z);

// Gamma in 50-decimal-digit arithmetic.
double mp_gamma(double x);

}  // namespace oracles
