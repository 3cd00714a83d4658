#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracles {

Eigen::VectorXd abm_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const std::function<Eigen::VectorXd(double)>& u,
                          const Eigen::VectorXd& x0, double alpha, double T,
                          int N) {
  const double h = T / N;
  const double h_alpha = std::pow(h, alpha);
  const double g1 = std::tgamma(alpha + 1.0);
  const double g2 = std::tgamma(alpha + 2.0);

  // k^alpha and k^(alpha+1) tables so the inner sums are pure flops.
  std::vector<double> pow_a(N + 2), pow_a1(N + 2);
  for (int k = 0; k <= N + 1; ++k) {
    pow_a[k] = std::pow(static_cast<double>(k), alpha);
    pow_a1[k] = std::pow(static_cast<double>(k), alpha + 1.0);
  }

  const auto f = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return A * x + B * u(t);
  };

  std::vector<Eigen::VectorXd> fs;
  fs.reserve(N + 1);
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(N + 1);
  xs.push_back(x0);
  fs.push_back(f(0.0, x0));

  for (int n = 0; n < N; ++n) {
    const double t_next = (n + 1) * h;
    // Predictor: rectangle weights b_{j,n+1} = h^a ((n+1-j)^a - (n-j)^a)/a.
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(x0.size());
    for (int j = 0; j <= n; ++j) {
      pred += (pow_a[n + 1 - j] - pow_a[n - j]) * fs[j];
    }
    pred = x0 + (h_alpha / g1) * pred;

    // Corrector: trapezoid-like weights a_{j,n+1}.
    Eigen::VectorXd corr =
        (pow_a1[n] - (n - alpha) * pow_a[n + 1]) * fs[0];
    for (int j = 1; j <= n; ++j) {
      corr += (pow_a1[n - j + 2] + pow_a1[n - j] - 2.0 * pow_a1[n - j + 1]) *
              fs[j];
    }
    corr += f(t_next, pred);
    xs.push_back(x0 + (h_alpha / g2) * corr);
    fs.push_back(f(t_next, xs.back()));
  }
  return xs.back();
}

std::vector<Eigen::VectorXd> rk4_solve(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
    const std::vector<Eigen::VectorXd>& u_values, const Eigen::VectorXd& x0,
    double T, int substeps) {
  const int N = static_cast<int>(u_values.size());
  const double h = T / N / substeps;
  std::vector<Eigen::VectorXd> states;
  states.reserve(N + 1);
  states.push_back(x0);
  Eigen::VectorXd x = x0;
  for (int j = 0; j < N; ++j) {
    const Eigen::VectorXd forcing = B * u_values[j];
    const auto f = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
      return A * v + forcing;
    };
    for (int s = 0; s < substeps; ++s) {
      const Eigen::VectorXd k1 = f(x);
      const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
      const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
      const Eigen::VectorXd k4 = f(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    states.push_back(x);
  }
  return states;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) { return A.exp(); }

Eigen::MatrixXd classical_gramian(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& B, double T,
                                  int simpson_cells) {
  const int segments = 2 * simpson_cells;
  const double h = T / segments;
  const auto integrand = [&](double s) -> Eigen::MatrixXd {
    const Eigen::MatrixXd M = expm(s * A) * B;
    return M * M.transpose();
  };
  Eigen::MatrixXd G = integrand(0.0) + integrand(T);
  for (int i = 1; i < segments; ++i) {
    G += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  }
  return (h / 3.0) * G;
}

namespace {
using Mp = boost::multiprecision::cpp_bin_float_50;
}

namespace {

void mp_ml_sums(double alpha, double beta, double z, Mp& sum, Mp& abs_sum) {
  const Mp a(alpha), b(beta), x(z);
  sum = 0;
  abs_sum = 0;
  const Mp cutoff("1e-45");
  for (int k = 0; k < 5000; ++k) {
    const Mp term =
        boost::multiprecision::pow(x, k) / boost::math::tgamma(a * k + b);
    sum += term;
    abs_sum += boost::multiprecision::abs(term);
    if (k > 5 && boost::multiprecision::abs(term) <
                     cutoff * (1 + boost::multiprecision::abs(sum))) {
      return;
    }
  }
  throw std::runtime_error("mp_ml: series oracle did not converge");
}

}  // namespace

double mp_ml(double alpha, double beta, double z) {
  Mp sum, abs_sum;
  mp_ml_sums(alpha, beta, z, sum, abs_sum);
  return sum.convert_to<double>();
}

double mp_ml_condition(double alpha, double beta, double z) {
  Mp sum, abs_sum;
  mp_ml_sums(alpha, beta, z, sum, abs_sum);
  return (abs_sum / boost::multiprecision::abs(sum)).convert_to<double>();
}

double mp_gamma(double x) {
  return boost::math::tgamma(Mp(x)).convert_to<double>();
}

}  // namespace oracles
