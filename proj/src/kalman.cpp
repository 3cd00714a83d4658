#include "fracctl/kalman.hpp"

#include <limits>
#include <vector>

#include "fracctl/errors.hpp"

namespace fracctl {
namespace {

// Kalman test of a single deterministic pair, shared by the averaged and
// extended variants (the extended system is the averaged test of a
// one-member ensemble).
KalmanReport kalman_of_pair_list(const ParameterEnsemble& e,
                                 std::optional<double> tol_override) {
  e.validate();
  const Eigen::Index n = e.state_dim();
  const Eigen::Index m = e.input_dim();
  Eigen::MatrixXd K(n, n * m);

  // Per-member powers A^k B by repeated multiplication, averaged in member
  // order.
  std::vector<Eigen::MatrixXd> blocks(n, Eigen::MatrixXd::Zero(n, m));
  for (const auto& member : e.members) {
    Eigen::MatrixXd power = member.system.B;
    for (Eigen::Index k = 0; k < n; ++k) {
      blocks[k] += member.weight * power;
      if (k + 1 < n) power = member.system.A * power;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) K.middleCols(k * m, m) = blocks[k];

  KalmanReport report;
  report.K = K;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  report.singular_values = svd.singularValues();
  const double sigma_max =
      report.singular_values.size() > 0 ? report.singular_values(0) : 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  report.tolerance = tol_override.value_or(
      static_cast<double>(std::max(K.rows(), K.cols())) * eps * sigma_max);
  report.rank = 0;
  for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) {
    if (report.singular_values(i) > report.tolerance) ++report.rank;
  }
  report.rank_target = static_cast<int>(n);
  report.controllable_in_average = report.rank == report.rank_target;
  return report;
}

}  // namespace

KalmanReport averaged_kalman(const ParameterEnsemble& e,
                             std::optional<double> tol_override) {
  return kalman_of_pair_list(e, tol_override);
}

ExtendedSystem extended_system(const ParameterEnsemble& e) {
  e.validate();
  if (e.kind != EnsembleKind::kDiscreteExact) {
    throw domain_error(
        "extended_system: requires a discrete-exact ensemble; a Monte Carlo "
        "sample is not the full support");
  }
  const int p = e.size();
  const Eigen::Index n = e.state_dim();
  const Eigen::Index m = e.input_dim();
  ExtendedSystem ext;
  ext.p = p;
  ext.block_dim = n;
  ext.bold_A = Eigen::MatrixXd::Zero(p * n, p * n);
  ext.bold_B = Eigen::MatrixXd::Zero(p * n, m);
  for (int i = 0; i < p; ++i) {
    ext.bold_A.block(i * n, i * n, n, n) = e.members[i].system.A;
    ext.bold_B.middleRows(i * n, n) = e.members[i].system.B;
  }
  return ext;
}

KalmanReport simultaneous_kalman_check(const ParameterEnsemble& e,
                                       std::optional<double> tol_override) {
  const ExtendedSystem ext = extended_system(e);
  EnsembleMember wrapped;
  wrapped.system.A = ext.bold_A;
  wrapped.system.B = ext.bold_B;
  wrapped.weight = 1.0;
  wrapped.x0 = Eigen::VectorXd::Zero(ext.bold_A.rows());
  return kalman_of_pair_list(discrete_ensemble({std::move(wrapped)}),
                             tol_override);
}

}  // namespace fracctl
