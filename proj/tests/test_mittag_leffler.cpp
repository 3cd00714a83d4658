#include "fracctl/mittag_leffler.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "fracctl/errors.hpp"
#include "support/oracles.hpp"

using fracctl::MLOptions;
using fracctl::MLParams;
using fracctl::ml_matrix;
using fracctl::ml_scalar;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = scale * dist(rng);
  }
  return A;
}

// Random matrix with condition number at most `cond`, via QR orthogonal
// factors around a prescribed singular value ramp.
Eigen::MatrixXd random_conditioned(std::mt19937_64& rng, int n, double cond) {
  const Eigen::MatrixXd q1 = Eigen::HouseholderQR<Eigen::MatrixXd>(
                                 random_matrix(rng, n, 1.0))
                                 .householderQ();
  const Eigen::MatrixXd q2 = Eigen::HouseholderQR<Eigen::MatrixXd>(
                                 random_matrix(rng, n, 1.0))
                                 .householderQ();
  Eigen::VectorXd sv(n);
  for (int i = 0; i < n; ++i) {
    sv(i) = 1.0 + (cond - 1.0) * i / std::max(1, n - 1);
  }
  return q1 * sv.asDiagonal() * q2.transpose();
}

}  // namespace

TEST_CASE("gamma at classical points") {
  CHECK(fracctl::gamma(1.0) == 1.0);
  CHECK(fracctl::gamma(2.0) == 1.0);
  CHECK(fracctl::gamma(5.0) == 24.0);
  CHECK(fracctl::gamma(0.5) ==
        doctest::Approx(1.7724538509055160273).epsilon(1e-14));
  CHECK(fracctl::gamma(1.5) ==
        doctest::Approx(0.88622692545275801365).epsilon(1e-14));
}

TEST_CASE("gamma against high-precision references") {
  // Frozen from a 60-digit evaluation.
  const struct {
    double x;
    double value;
  } refs[] = {
      {0.1, 9.513507698668731836292},   {0.25, 3.625609908221908311931},
      {2.5, 1.329340388179137020474},   {10.3, 716430.6890623752445476},
      {50.5, 4.290462912351959810916e63},
      {100.25, 2.94846628183876997001e156},
      {170.0, 4.269068009004705274939e304},
  };
  for (const auto& ref : refs) {
    CHECK(fracctl::gamma(ref.x) ==
          doctest::Approx(ref.value).epsilon(1e-13));
  }
}

TEST_CASE("gamma sweep against the 50-digit oracle") {
  for (int i = 1; i <= 340; ++i) {
    const double x = i * 0.5;
    CHECK(fracctl::gamma(x) ==
          doctest::Approx(oracles::mp_gamma(x)).epsilon(1e-13));
  }
  // Small-argument region near the pole.
  for (double x : {0.01, 0.05, 0.11, 0.31, 0.49, 0.73, 0.97}) {
    CHECK(fracctl::gamma(x) ==
          doctest::Approx(oracles::mp_gamma(x)).epsilon(1e-13));
  }
}

TEST_CASE("gamma domain and overflow errors") {
  CHECK_THROWS_AS(fracctl::gamma(0.0), fracctl::domain_error);
  CHECK_THROWS_AS(fracctl::gamma(-3.2), fracctl::domain_error);
  CHECK_THROWS_AS(fracctl::gamma(171.7), std::overflow_error);
  CHECK(std::isfinite(fracctl::gamma(171.5)));
}

TEST_CASE("log_gamma matches gamma on the non-overflowing range") {
  for (double x : {0.2, 0.9, 1.0, 3.7, 25.0, 120.0}) {
    CHECK(fracctl::log_gamma(x) ==
          doctest::Approx(std::log(fracctl::gamma(x))).epsilon(1e-13));
  }
  CHECK(std::isfinite(fracctl::log_gamma(3000.0)));
}

TEST_CASE("ml_scalar classical values") {
  CHECK(ml_scalar({1.0, 1.0}, 1.0) ==
        doctest::Approx(2.718281828459045).epsilon(1e-13));
  // Only the k = 0 term survives at z = 0.
  CHECK(ml_scalar({0.5, 0.5}, 0.0) ==
        doctest::Approx(0.5641895835477562869).epsilon(1e-14));
}

TEST_CASE("ml_scalar agrees with the 50-digit series oracle") {
  // Frozen from the oracle: E_{0.97,1}(-2).
  CHECK(ml_scalar({0.97, 1.0}, -2.0) ==
        doctest::Approx(0.14394782341066739034).epsilon(1e-12));
  // For alternating series the summation cannot beat eps times the series
  // condition number, so the tolerance carries that factor.
  const double eps = std::numeric_limits<double>::epsilon();
  for (double z : {-8.0, -2.0, -0.3, 0.7, 4.0, 9.5}) {
    for (double alpha : {0.5, 0.75, 0.97}) {
      for (double beta : {1.0, alpha}) {
        const double kappa = oracles::mp_ml_condition(alpha, beta, z);
        const double tol = 1e-12 + 200.0 * eps * kappa;
        CHECK(ml_scalar({alpha, beta}, z) ==
              doctest::Approx(oracles::mp_ml(alpha, beta, z)).epsilon(tol));
      }
    }
  }
}

TEST_CASE("ml_scalar reduces to exp for alpha = beta = 1") {
  for (int i = 0; i <= 100; ++i) {
    const double z = -5.0 + 0.1 * i;
    CHECK(ml_scalar({1.0, 1.0}, z) ==
          doctest::Approx(std::exp(z)).epsilon(1e-10));
  }
}

TEST_CASE("ml_scalar error paths") {
  CHECK_THROWS_AS(ml_scalar({0.5, 1.0}, 51.0), fracctl::domain_error);
  CHECK_THROWS_AS(ml_scalar({-0.5, 1.0}, 0.1), fracctl::domain_error);
  // Slow kernel with a large argument runs past the cap or out of range.
  CHECK_THROWS_AS(ml_scalar({0.3, 1.0}, 49.0), fracctl::convergence_error);
  MLOptions tight;
  tight.max_terms = 3;
  CHECK_THROWS_AS(ml_scalar({1.0, 1.0}, 4.0, tight),
                  fracctl::convergence_error);
}

TEST_CASE("ml_matrix of the zero matrix is I/Gamma(beta) exactly") {
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd E1 = ml_matrix({0.97, 1.0}, Z);
  CHECK(E1 == Eigen::MatrixXd::Identity(3, 3));
  const Eigen::MatrixXd Eb = ml_matrix({0.5, 0.5}, Z);
  const double inv_gamma_half = 1.0 / fracctl::gamma(0.5);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(Eb(i, j) == (i == j ? inv_gamma_half : 0.0));
    }
  }
}

TEST_CASE("ml_matrix diagonal case reduces to scalars") {
  Eigen::MatrixXd D = Eigen::Vector3d(1.0, 2.0, -0.7).asDiagonal();
  for (MLParams p : {MLParams{1.0, 1.0}, MLParams{0.5, 0.5}, MLParams{0.97, 1.0}}) {
    const Eigen::MatrixXd E = ml_matrix(p, D);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          CHECK(E(i, i) == doctest::Approx(ml_scalar(p, D(i, i))).epsilon(1e-12));
        } else {
          CHECK(E(i, j) == 0.0);
        }
      }
    }
  }
  CHECK(ml_matrix({1.0, 1.0}, Eigen::Vector2d(1.0, 2.0).asDiagonal().toDenseMatrix())(1, 1) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-13));
}

TEST_CASE("ml_matrix terminates on nilpotent input") {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, 0.0, 0.0;
  const Eigen::MatrixXd E = ml_matrix({0.5, 0.5}, A);
  const double c0 = 1.0 / fracctl::gamma(0.5);
  CHECK(E(0, 0) == doctest::Approx(c0).epsilon(1e-15));
  CHECK(E(1, 1) == doctest::Approx(c0).epsilon(1e-15));
  CHECK(E(0, 1) == doctest::Approx(1.0).epsilon(1e-15));  // 1/Gamma(1)
  CHECK(E(1, 0) == 0.0);
}

TEST_CASE("ml_matrix reduces to the matrix exponential at alpha = beta = 1") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd A = random_matrix(rng, n, 1.5);
    if (fracctl::spectral_norm(A) > 5.0) A *= 5.0 / fracctl::spectral_norm(A);
    const Eigen::MatrixXd E = ml_matrix({1.0, 1.0}, A);
    const Eigen::MatrixXd R = oracles::expm(A);
    CHECK((E - R).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + R.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("ml_matrix similarity equivariance") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd A = random_matrix(rng, n, 1.0);
    if (fracctl::spectral_norm(A) > 5.0) A *= 5.0 / fracctl::spectral_norm(A);
    const Eigen::MatrixXd P = random_conditioned(rng, n, 10.0);
    const Eigen::MatrixXd P_inv = P.inverse();
    const MLParams p{0.97, 1.0};
    const Eigen::MatrixXd lhs = ml_matrix(p, P * A * P_inv);
    const Eigen::MatrixXd rhs = P * ml_matrix(p, A) * P_inv;
    const double bound =
        1e-8 * fracctl::spectral_norm(P) * fracctl::spectral_norm(P_inv);
    CHECK(fracctl::spectral_norm(lhs - rhs) <= bound);
  }
}

TEST_CASE("ml_matrix domain check uses the spectral norm") {
  Eigen::MatrixXd big = Eigen::MatrixXd::Identity(2, 2) * 51.0;
  CHECK_THROWS_AS(ml_matrix({0.97, 1.0}, big), fracctl::domain_error);
  MLOptions wide;
  wide.domain_bound = 60.0;
  CHECK_NOTHROW(ml_matrix({0.97, 1.0}, big, wide));
}
