#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fracctl/ensemble.hpp"

namespace fracctl {

// Hum solves degrade noticeably past this condition number; reports carry a
// warning flag instead of failing.
inline constexpr double kIllConditionedThreshold = 1e12;

struct GramianReport {
  Eigen::MatrixXd G;            // symmetrized averaged Gramian
  Eigen::VectorXd eigenvalues;  // nondecreasing
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool invertible = false;
  double condition_number = 0.0;  // +inf when lambda_min <= 0
  bool ill_conditioned = false;
  double tolerance = 0.0;  // rank tolerance the verdict used
  int quadrature_N = 0;
};

// Quadrature of the averaged Gramian
//   G = int_0^T tau^(alpha-1) E[E_{aa}(tau^a A) B] E[B^T E_{aa}(tau^a A^T)] dtau
// after the substitution tau = T - s. The expectation is taken separately on
// each factor, exactly as the Gramian is defined; this is NOT the expectation
// of the product E[... B B^T ...]. The singular weight is integrated exactly
// per subinterval and the averaged kernel is evaluated at midpoints, so the
// rule is exact whenever the kernel is constant.
//
// The precomputed form supports repeated matrix-free products for CG.
class GramianOperator {
 public:
  GramianOperator(const FractionalOrder& order, const ParameterEnsemble& e,
                  int quadrature_N, const MLOptions& opts = {});

  // G y via the quadrature, without forming G.
  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;

  // Dense assembly from the same nodes and weights, symmetrized.
  Eigen::MatrixXd dense() const;

  int quadrature_N() const { return static_cast<int>(weights_.size()); }
  Eigen::Index state_dim() const { return n_; }

  // E[E_{aa}(tau^a A) B] at the node midpoints, indexed from the lower lag up.
  const std::vector<Eigen::MatrixXd>& averaged_kernels() const {
    return kernels_;
  }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<Eigen::MatrixXd> kernels_;
  std::vector<double> weights_;
  Eigen::Index n_ = 0;
};

// Spectrum and invertibility verdict from an assembled operator. The default
// rank tolerance is n * eps * max(lambda_max, 1); pass tol_override to
// replace it.
GramianReport gramian_report(const GramianOperator& op,
                             std::optional<double> tol_override = {});

// Dense Gramian with spectrum and invertibility verdict.
GramianReport averaged_gramian(const FractionalOrder& order,
                               const ParameterEnsemble& e, int quadrature_N,
                               const MLOptions& opts = {},
                               std::optional<double> tol_override = {});

// One-shot matrix-free product G y. Agrees with averaged_gramian(...).G * y
// to roundoff.
Eigen::VectorXd gramian_apply(const FractionalOrder& order,
                              const ParameterEnsemble& e, int quadrature_N,
                              const Eigen::VectorXd& y,
                              const MLOptions& opts = {});

}  // namespace fracctl
