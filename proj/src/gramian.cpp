#include "fracctl/gramian.hpp"

#include <cmath>
#include <limits>

#include "fracctl/errors.hpp"

namespace fracctl {

GramianOperator::GramianOperator(const FractionalOrder& order,
                                 const ParameterEnsemble& e, int quadrature_N,
                                 const MLOptions& opts) {
  order.validate();
  e.validate();
  if (quadrature_N < 1) {
    throw dimension_error("gramian: quadrature subdivision must be >= 1");
  }
  n_ = e.state_dim();
  const double step = order.T / quadrature_N;
  weights_ = singular_weights(order.alpha, step, quadrature_N);
  kernels_.assign(quadrature_N,
                  Eigen::MatrixXd::Zero(n_, e.input_dim()));
  for (const auto& member : e.members) {
    const auto member_kernels =
        midpoint_kernel(order, member.system, step, quadrature_N, opts);
    for (int q = 0; q < quadrature_N; ++q) {
      kernels_[q] += member.weight * member_kernels[q];
    }
  }
}

Eigen::VectorXd GramianOperator::apply(const Eigen::VectorXd& y) const {
  if (y.size() != n_) throw dimension_error("gramian apply: dimension mismatch");
  if (!y.allFinite()) throw domain_error("gramian apply: non-finite input");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (std::size_t q = 0; q < weights_.size(); ++q) {
    out += weights_[q] * (kernels_[q] * (kernels_[q].transpose() * y));
  }
  return out;
}

Eigen::MatrixXd GramianOperator::dense() const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t q = 0; q < weights_.size(); ++q) {
    G += weights_[q] * (kernels_[q] * kernels_[q].transpose());
  }
  return 0.5 * (G + G.transpose());
}

GramianReport gramian_report(const GramianOperator& op,
                             std::optional<double> tol_override) {
  GramianReport report;
  report.G = op.dense();
  report.quadrature_N = op.quadrature_N();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(report.G);
  report.eigenvalues = solver.eigenvalues();
  report.lambda_min = report.eigenvalues(0);
  report.lambda_max = report.eigenvalues(report.eigenvalues.size() - 1);

  const double eps = std::numeric_limits<double>::epsilon();
  report.tolerance = tol_override.value_or(
      static_cast<double>(op.state_dim()) * eps *
      std::max(report.lambda_max, 1.0));
  report.invertible = report.lambda_min > report.tolerance;
  report.condition_number =
      report.lambda_min > 0.0
          ? report.lambda_max / report.lambda_min
          : std::numeric_limits<double>::infinity();
  report.ill_conditioned = report.condition_number > kIllConditionedThreshold;
  return report;
}

GramianReport averaged_gramian(const FractionalOrder& order,
                               const ParameterEnsemble& e, int quadrature_N,
                               const MLOptions& opts,
                               std::optional<double> tol_override) {
  return gramian_report(GramianOperator(order, e, quadrature_N, opts),
                        tol_override);
}

Eigen::VectorXd gramian_apply(const FractionalOrder& order,
                              const ParameterEnsemble& e, int quadrature_N,
                              const Eigen::VectorXd& y, const MLOptions& opts) {
  return GramianOperator(order, e, quadrature_N, opts).apply(y);
}

}  // namespace fracctl
