#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fracctl/gramian.hpp"

namespace fracctl {

// Minimal-energy steering problem for the ensemble average: drive
// E(x(T; x0; u)) to the target with the control sampled on the grid.
struct ControlProblem {
  FractionalOrder order;
  ParameterEnsemble ensemble;
  Eigen::VectorXd target;
  TimeGrid grid;
  int quadrature_N = 400;
  double cg_tol = 1e-10;
  int cg_max_iter = 0;  // 0 selects 10 n
  void validate() const;
};

struct CgResult {
  Eigen::VectorXd y;
  int iterations = 0;
  std::vector<double> residual_history;  // ||r_0||, ||r_1||, ...
  bool converged = false;
};

// Called after every update with (iteration count, current iterate).
using CgObserver = std::function<void(int, const Eigen::VectorXd&)>;

// Plain conjugate gradient on a symmetric positive semidefinite action:
//   r0 = rhs - G y0, p0 = r0,
//   a_k = (r_k,r_k)/(p_k, G p_k), y_{k+1} = y_k + a_k p_k,
//   r_{k+1} = r_k - a_k G p_k, b_k = (r_{k+1},r_{k+1})/(r_k,r_k),
//   p_{k+1} = r_{k+1} + b_k p_k,
// stopping once ||r|| <= tol or k = kmax. Throws convergence_error when
// (p, G p) <= 0 beyond roundoff slack, which signals a non-PSD action.
CgResult cg_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>&
                      apply_gramian,
                  const Eigen::VectorXd& rhs, const Eigen::VectorXd& y0,
                  double tol, int max_iter, const CgObserver& observer = {});

struct ControlResult {
  ControlSignal u_hat;           // sampled at subinterval midpoints
  Eigen::VectorXd y_hat_T;       // Gramian-system solution
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  Eigen::VectorXd achieved_average;  // closed-loop re-simulated E(x(T))
  double terminal_error = 0.0;       // ||achieved - target||
  double energy = 0.0;               // weighted norm of u_hat
  bool ill_conditioned_warning = false;
  GramianReport gramian;  // the report backing the invertibility verdict
};

// Open-loop control from the averaged Gramian:
//   rhs   = target - E(E_alpha(T^alpha A) x0)        (closed form, no grid)
//   y_T   = CG solve of  G y = rhs
//   u_j   = E(B^T E_{alpha,alpha}((T - t_{j+1/2})^alpha A^T)) y_T
// followed by a closed-loop verification run over the ensemble. Throws
// singular_gramian_error when the Gramian verdict is non-invertible; an
// ill-conditioned Gramian proceeds with the warning flag set.
ControlResult hum_control(const ControlProblem& problem,
                          const MLOptions& opts = {});

// Weighted inner product int_0^T (T-s)^(alpha-1) <u, v> ds with the weight
// integrated exactly per subinterval.
double weighted_inner(const FractionalOrder& order, const ControlSignal& u,
                      const ControlSignal& v);

double weighted_energy(const FractionalOrder& order, const ControlSignal& u);

struct MinimalityReport {
  int trials = 0;
  // Largest averaged terminal reach of the projected perturbations.
  double max_reach_norm = 0.0;
  // Largest |<w, u_hat>| relative to energy(w) energy(u_hat).
  double max_orthogonality = 0.0;
  // Largest |E(u+w)^2 - E(u)^2 - E(w)^2| relative to E(u+w)^2.
  double max_pythagoras_defect = 0.0;
  bool all_passed = false;
};

// Random perturbations projected onto the null space of the averaged reach
// map must be orthogonal to the HUM control and can only increase the energy.
MinimalityReport minimality_check(const ControlProblem& problem,
                                  const ControlResult& result, int trials,
                                  std::uint64_t seed = 2026,
                                  const MLOptions& opts = {});

}  // namespace fracctl
