#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fracctl/linear_fractional.hpp"

namespace fracctl {

enum class EnsembleKind { kDiscreteExact, kMonteCarlo };

struct EnsembleMember {
  SystemRealization system;
  double weight = 1.0;
  Eigen::VectorXd x0;
};

// Weighted finite list of system realizations standing in for the probability
// space: either an exact discrete law or a seeded Monte Carlo sample with
// uniform weights 1/M.
struct ParameterEnsemble {
  std::vector<EnsembleMember> members;
  EnsembleKind kind = EnsembleKind::kDiscreteExact;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(members.size()); }
  Eigen::Index state_dim() const { return members.front().system.n(); }
  Eigen::Index input_dim() const { return members.front().system.m(); }
  void validate() const;
};

// Validated discrete-exact ensemble from an explicit member list.
ParameterEnsemble discrete_ensemble(std::vector<EnsembleMember> members);

enum class ScalarLawKind { kGaussian, kUniform, kPointMasses };

struct ScalarLaw {
  ScalarLawKind kind = ScalarLawKind::kPointMasses;
  double mean = 0.0;
  double variance = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> values;
  std::vector<double> probs;

  static ScalarLaw gaussian(double mean, double variance);
  static ScalarLaw uniform(double lo, double hi);
  static ScalarLaw point_masses(std::vector<double> values,
                                std::vector<double> probs);
  void validate() const;
};

// A designated matrix entry the sampled scalar is written into.
struct EntryRef {
  char matrix = 'A';  // 'A' or 'B'
  int row = 0;
  int col = 0;
};

// Base matrices plus the scalar law; each realization draws one scalar and
// stores it in every designated entry.
struct DistributionSpec {
  Eigen::MatrixXd A0;
  Eigen::MatrixXd B0;
  ScalarLaw law;
  std::vector<EntryRef> entries;
  void validate() const;
};

// Deterministic scalar sampler. The algorithm is fixed so that runs reproduce
// bit-exactly on the same build: mt19937_64 engine, uniforms from the top 53
// bits, Gaussians via the Marsaglia polar method with the spare value cached.
class ScalarSampler {
 public:
  explicit ScalarSampler(std::uint64_t seed) : engine_(seed) {}
  double uniform01();  // in [0, 1)
  double gaussian(double mean, double stddev);
  double draw(const ScalarLaw& law);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Monte Carlo ensemble of M realizations of the spec, uniform weights, every
// member starting at x0. Identical (spec, M, seed) reproduce bit-exactly.
ParameterEnsemble sample_ensemble(const DistributionSpec& spec, int M,
                                  std::uint64_t seed,
                                  const Eigen::VectorXd& x0);

// Scalar values that were written into the designated entries, in member
// order. Used for the parameter-histogram output.
std::vector<double> sampled_values(const ParameterEnsemble& e,
                                   const DistributionSpec& spec);

// Exact weighted sum sum_k weight_k f(member_k), reduced in member order.
Eigen::MatrixXd expect_matrix(
    const ParameterEnsemble& e,
    const std::function<Eigen::MatrixXd(const SystemRealization&)>& f);

// Weighted average of the per-member Duhamel trajectories at every node.
Trajectory averaged_trajectory(const FractionalOrder& order,
                               const ParameterEnsemble& e,
                               const ControlSignal& u,
                               const MLOptions& opts = {});

}  // namespace fracctl
