#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracctl/mittag_leffler.hpp"

namespace fracctl {

// Caputo derivative order in (0,1] together with the control horizon T.
// alpha = 1 is admitted as the classical-limit regression case.
struct FractionalOrder {
  double alpha = 1.0;
  double T = 1.0;
  void validate() const;
};

// One realization (A, B) of the system matrices for a fixed parameter value.
// A is n x n (units 1/time^alpha), B is n x m.
struct SystemRealization {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  void validate() const;
};

// Uniform grid t_j = j T / N, j = 0..N. The final node is pinned to T so
// rounding can never push it past the horizon.
struct TimeGrid {
  double T = 1.0;
  int N = 1;
  double h() const { return T / N; }
  double node(int j) const { return j == N ? T : j * T / N; }
  double midpoint(int j) const { return (j + 0.5) * T / N; }
  void validate() const;
  bool operator==(const TimeGrid&) const = default;
};

// Piecewise-constant control: values[j] holds u on [t_j, t_{j+1}).
struct ControlSignal {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> values;
  static ControlSignal zero(const TimeGrid& grid, Eigen::Index m);
  bool is_zero() const;
  void validate() const;
};

// States at every grid node; states[0] is the initial condition.
struct Trajectory {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> states;
};

// Exact integrals of the singular kernel lag^(alpha-1) over the lag buckets
// [d*step, (d+1)*step): weights[d] = step^alpha ((d+1)^alpha - d^alpha) / alpha
// for d = 0..count-1. Positive, and their sum telescopes to (count*step)^alpha
// / alpha.
std::vector<double> singular_weights(double alpha, double step, int count);

// Kernel matrices at the lag-bucket midpoints:
// kernel[d] = E_{alpha,alpha}((((d + 1/2) step)^alpha) A) * B.
// These are the only Mittag-Leffler evaluations the convolution needs on a
// uniform grid, so a trajectory costs O(N) series evaluations.
std::vector<Eigen::MatrixXd> midpoint_kernel(const FractionalOrder& order,
                                             const SystemRealization& sys,
                                             double step, int count,
                                             const MLOptions& opts = {});

// E_alpha(t^alpha A) x0, the solution with zero control.
Eigen::VectorXd homogeneous_state(const FractionalOrder& order,
                                  const SystemRealization& sys,
                                  const Eigen::VectorXd& x0, double t,
                                  const MLOptions& opts = {});

// State at node k under the product-midpoint discretization of the Duhamel
// convolution: the singular weight is integrated exactly per subinterval and
// the smooth kernel is evaluated at the subinterval midpoint.
Eigen::VectorXd duhamel_state(const FractionalOrder& order,
                              const SystemRealization& sys,
                              const Eigen::VectorXd& x0,
                              const ControlSignal& u, int k,
                              const MLOptions& opts = {});

// Full trajectory, sharing the kernel cache across nodes. Node k equals
// duhamel_state(..., k).
Trajectory solve_trajectory(const FractionalOrder& order,
                            const SystemRealization& sys,
                            const Eigen::VectorXd& x0, const ControlSignal& u,
                            const MLOptions& opts = {});

Trajectory solve_homogeneous(const FractionalOrder& order,
                             const SystemRealization& sys,
                             const Eigen::VectorXd& x0, const TimeGrid& grid,
                             const MLOptions& opts = {});

// Adjoint solution (T-t)^(alpha-1) E_{alpha,alpha}((T-t)^alpha A^T) yT.
// The solution is singular at t = T for alpha < 1; evaluating there is a
// hard error rather than a clamped value.
Eigen::VectorXd adjoint_state(const FractionalOrder& order,
                              const SystemRealization& sys,
                              const Eigen::VectorXd& yT, double t,
                              const MLOptions& opts = {});

// Riemann-Liouville integral of the adjoint solution in closed form:
// E_alpha((T-t)^alpha A^T) yT. Well defined on all of [0, T].
Eigen::VectorXd adjoint_fractional_integral(const FractionalOrder& order,
                                            const SystemRealization& sys,
                                            const Eigen::VectorXd& yT, double t,
                                            const MLOptions& opts = {});

// Discretization-consistency diagnostic: absolute defect of the
// primal/adjoint duality relation
//   int_0^T <u, B^T y(t)> dt = <x(T), yT> - <x0, I^{1-alpha} y(0)>
// with x(T) from the product-midpoint solver and the time integral from the
// same rule on the half-step partition (shared nodes would satisfy the
// identity algebraically and measure nothing). Tends to 0 under refinement.
double duality_residual(const FractionalOrder& order,
                        const SystemRealization& sys,
                        const Eigen::VectorXd& x0, const Eigen::VectorXd& yT,
                        const ControlSignal& u, const MLOptions& opts = {});

}  // namespace fracctl
