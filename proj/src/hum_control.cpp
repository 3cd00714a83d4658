#include "fracctl/hum_control.hpp"

#include <cmath>

#include "fracctl/errors.hpp"

namespace fracctl {

void ControlProblem::validate() const {
  order.validate();
  ensemble.validate();
  grid.validate();
  if (grid.T != order.T) {
    throw dimension_error("control problem: grid horizon differs from T");
  }
  if (target.size() != ensemble.state_dim() || !target.allFinite()) {
    throw dimension_error("control problem: target must be finite in R^n");
  }
  if (quadrature_N < 1) {
    throw dimension_error("control problem: quadrature subdivision >= 1");
  }
  if (!(cg_tol > 0.0)) throw domain_error("control problem: cg_tol > 0");
  if (cg_max_iter < 0) throw domain_error("control problem: cg_max_iter >= 1");
}

CgResult cg_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>&
                      apply_gramian,
                  const Eigen::VectorXd& rhs, const Eigen::VectorXd& y0,
                  double tol, int max_iter, const CgObserver& observer) {
  if (max_iter < 1) throw domain_error("cg_solve: max_iter must be >= 1");
  CgResult result;
  result.y = y0;
  Eigen::VectorXd r = rhs - apply_gramian(y0);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  result.residual_history.push_back(std::sqrt(rr));
  if (result.residual_history.back() <= tol) {
    result.converged = true;
    return result;
  }
  for (int k = 0; k < max_iter; ++k) {
    const Eigen::VectorXd gp = apply_gramian(p);
    const double pgp = p.dot(gp);
    if (pgp <= 1e-14 * p.squaredNorm()) {
      throw convergence_error(
          "cg_solve: breakdown, <p, G p> <= 0 beyond roundoff; the action is "
          "not positive definite");
    }
    const double a = rr / pgp;
    result.y += a * p;
    r -= a * gp;
    const double rr_next = r.squaredNorm();
    result.iterations = k + 1;
    result.residual_history.push_back(std::sqrt(rr_next));
    if (observer) observer(result.iterations, result.y);
    if (result.residual_history.back() <= tol) {
      result.converged = true;
      return result;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  result.converged = result.residual_history.back() <= tol;
  return result;
}

namespace {

std::vector<double> energy_weights(const FractionalOrder& order,
                                   const TimeGrid& grid) {
  // ((T - t_j)^alpha - (T - t_{j+1})^alpha)/alpha indexed by subinterval j is
  // the lag-bucket weight N-1-j.
  return singular_weights(order.alpha, grid.h(), grid.N);
}

}  // namespace

double weighted_inner(const FractionalOrder& order, const ControlSignal& u,
                      const ControlSignal& v) {
  order.validate();
  u.validate();
  v.validate();
  if (!(u.grid == v.grid)) {
    throw dimension_error("weighted_inner: controls on different grids");
  }
  if (u.grid.T != order.T) {
    throw dimension_error("weighted_inner: grid horizon differs from T");
  }
  const auto w = energy_weights(order, u.grid);
  const int N = u.grid.N;
  double sum = 0.0;
  for (int j = 0; j < N; ++j) {
    sum += w[N - 1 - j] * u.values[j].dot(v.values[j]);
  }
  return sum;
}

double weighted_energy(const FractionalOrder& order, const ControlSignal& u) {
  return std::sqrt(weighted_inner(order, u, u));
}

ControlResult hum_control(const ControlProblem& problem, const MLOptions& opts) {
  problem.validate();
  const auto& e = problem.ensemble;
  const Eigen::Index n = e.state_dim();
  const int N = problem.grid.N;

  // Right-hand side from the closed-form averaged homogeneous terminal state.
  Eigen::VectorXd free_terminal = Eigen::VectorXd::Zero(n);
  for (const auto& member : e.members) {
    free_terminal += member.weight * homogeneous_state(problem.order,
                                                       member.system,
                                                       member.x0,
                                                       problem.order.T, opts);
  }
  const Eigen::VectorXd rhs = problem.target - free_terminal;

  const GramianOperator op(problem.order, e, problem.quadrature_N, opts);
  ControlResult result;
  result.gramian = gramian_report(op);
  if (!result.gramian.invertible) {
    throw singular_gramian_error(
        "hum_control: averaged Gramian is singular at the configured "
        "tolerance; the requested average is not reachable");
  }
  result.ill_conditioned_warning = result.gramian.ill_conditioned;

  const int kmax = problem.cg_max_iter > 0 ? problem.cg_max_iter
                                           : 10 * static_cast<int>(n);
  const CgResult cg =
      cg_solve([&op](const Eigen::VectorXd& y) { return op.apply(y); }, rhs,
               Eigen::VectorXd::Zero(n), problem.cg_tol, kmax);
  result.y_hat_T = cg.y;
  result.iterations = cg.iterations;
  result.residual_history = cg.residual_history;
  result.converged = cg.converged;

  // Control sampled at the grid midpoints. The averaged kernel at lag bucket
  // N-1-j is exactly E[E_{aa}((T - t_{j+1/2})^alpha A) B].
  const GramianOperator reach(problem.order, e, N, opts);
  const auto& kernels = reach.averaged_kernels();
  result.u_hat.grid = problem.grid;
  result.u_hat.values.reserve(N);
  for (int j = 0; j < N; ++j) {
    result.u_hat.values.push_back(kernels[N - 1 - j].transpose() *
                                  result.y_hat_T);
  }

  const Trajectory closed_loop =
      averaged_trajectory(problem.order, e, result.u_hat, opts);
  result.achieved_average = closed_loop.states[N];
  result.terminal_error = (result.achieved_average - problem.target).norm();
  result.energy = weighted_energy(problem.order, result.u_hat);
  return result;
}

MinimalityReport minimality_check(const ControlProblem& problem,
                                  const ControlResult& result, int trials,
                                  std::uint64_t seed, const MLOptions& opts) {
  problem.validate();
  if (!result.converged) {
    throw convergence_error("minimality_check: control solve did not converge");
  }
  if (!(result.u_hat.grid == problem.grid)) {
    throw dimension_error("minimality_check: result is on a different grid");
  }
  const int N = problem.grid.N;
  const Eigen::Index m = problem.ensemble.input_dim();

  // Grid-matched quadrature: with these nodes the discrete reach map R and
  // the weighted inner product satisfy R R* = G exactly, so projecting onto
  // ker(R) is a Gramian solve.
  const GramianOperator reach(problem.order, problem.ensemble, N, opts);
  const auto& kernels = reach.averaged_kernels();
  const auto& w = reach.weights();
  const Eigen::LDLT<Eigen::MatrixXd> gram(reach.dense());

  const auto reach_of = [&](const ControlSignal& u) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(reach.state_dim());
    for (int j = 0; j < N; ++j) {
      out += w[N - 1 - j] * (kernels[N - 1 - j] * u.values[j]);
    }
    return out;
  };

  ScalarSampler sampler(seed);
  MinimalityReport report;
  report.trials = trials;
  report.all_passed = trials > 0;
  const double hat_energy = result.energy;

  for (int trial = 0; trial < trials; ++trial) {
    ControlSignal v;
    v.grid = problem.grid;
    v.values.reserve(N);
    for (int j = 0; j < N; ++j) {
      Eigen::VectorXd value(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        value(i) = 2.0 * sampler.uniform01() - 1.0;
      }
      v.values.push_back(std::move(value));
    }
    const double v_energy = weighted_energy(problem.order, v);
    for (auto& value : v.values) value /= v_energy;

    // Remove the reachable-average component.
    const Eigen::VectorXd correction = gram.solve(reach_of(v));
    ControlSignal perturbation = v;
    for (int j = 0; j < N; ++j) {
      perturbation.values[j] -=
          kernels[N - 1 - j].transpose() * correction;
    }

    const double reach_norm = reach_of(perturbation).norm();
    const double w_energy = weighted_energy(problem.order, perturbation);
    const double inner =
        weighted_inner(problem.order, perturbation, result.u_hat);
    const double ortho =
        std::abs(inner) / std::max(w_energy * hat_energy, 1e-300);

    ControlSignal combined = result.u_hat;
    for (int j = 0; j < N; ++j) combined.values[j] += perturbation.values[j];
    const double combined_sq = weighted_inner(problem.order, combined, combined);
    const double pythagoras =
        std::abs(combined_sq - hat_energy * hat_energy - w_energy * w_energy) /
        std::max(combined_sq, 1e-300);

    report.max_reach_norm = std::max(report.max_reach_norm, reach_norm);
    report.max_orthogonality = std::max(report.max_orthogonality, ortho);
    report.max_pythagoras_defect = std::max(report.max_pythagoras_defect,
                                            pythagoras);
    const bool ok = reach_norm <= 1e-9 && ortho <= 1e-8 &&
                    pythagoras <= 1e-8 &&
                    std::sqrt(combined_sq) >= hat_energy - 1e-9;
    report.all_passed = report.all_passed && ok;
  }
  return report;
}

}  // namespace fracctl
