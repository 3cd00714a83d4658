#include "fracctl/ensemble.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fracctl/errors.hpp"

namespace fracctl {

void ParameterEnsemble::validate() const {
  if (members.empty()) throw dimension_error("ensemble: no members");
  const Eigen::Index n = members.front().system.n();
  const Eigen::Index m = members.front().system.m();
  double total = 0.0;
  for (const auto& member : members) {
    member.system.validate();
    if (member.system.n() != n || member.system.m() != m) {
      throw dimension_error("ensemble: members must share (n, m)");
    }
    if (member.x0.size() != n || !member.x0.allFinite()) {
      throw dimension_error("ensemble: initial state must be finite in R^n");
    }
    if (!(member.weight >= 0.0)) {
      throw domain_error("ensemble: weights must be nonnegative");
    }
    total += member.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw domain_error("ensemble: weights must sum to 1, got " +
                       std::to_string(total));
  }
  if (kind == EnsembleKind::kMonteCarlo) {
    const double uniform = 1.0 / static_cast<double>(members.size());
    for (const auto& member : members) {
      if (member.weight != uniform) {
        throw domain_error("ensemble: Monte Carlo weights must be uniform 1/M");
      }
    }
  }
}

ParameterEnsemble discrete_ensemble(std::vector<EnsembleMember> members) {
  ParameterEnsemble e;
  e.members = std::move(members);
  e.kind = EnsembleKind::kDiscreteExact;
  e.validate();
  return e;
}

ScalarLaw ScalarLaw::gaussian(double mean, double variance) {
  ScalarLaw law;
  law.kind = ScalarLawKind::kGaussian;
  law.mean = mean;
  law.variance = variance;
  law.validate();
  return law;
}

ScalarLaw ScalarLaw::uniform(double lo, double hi) {
  ScalarLaw law;
  law.kind = ScalarLawKind::kUniform;
  law.lo = lo;
  law.hi = hi;
  law.validate();
  return law;
}

ScalarLaw ScalarLaw::point_masses(std::vector<double> values,
                                  std::vector<double> probs) {
  ScalarLaw law;
  law.kind = ScalarLawKind::kPointMasses;
  law.values = std::move(values);
  law.probs = std::move(probs);
  law.validate();
  return law;
}

void ScalarLaw::validate() const {
  switch (kind) {
    case ScalarLawKind::kGaussian:
      if (!(variance >= 0.0)) {
        throw domain_error("scalar law: variance must be nonnegative");
      }
      break;
    case ScalarLawKind::kUniform:
      if (!(lo <= hi)) throw domain_error("scalar law: requires lo <= hi");
      break;
    case ScalarLawKind::kPointMasses: {
      if (values.empty() || values.size() != probs.size()) {
        throw domain_error("scalar law: point masses need matching values/probs");
      }
      double total = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0)) throw domain_error("scalar law: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw domain_error("scalar law: probabilities must sum to 1");
      }
      break;
    }
  }
}

void DistributionSpec::validate() const {
  if (A0.rows() != A0.cols() || A0.rows() < 1) {
    throw dimension_error("distribution spec: A0 must be square");
  }
  if (B0.rows() != A0.rows() || B0.cols() < 1) {
    throw dimension_error("distribution spec: B0 must be n x m");
  }
  law.validate();
  for (const auto& entry : entries) {
    const Eigen::MatrixXd& target = entry.matrix == 'A' ? A0 : B0;
    if (entry.matrix != 'A' && entry.matrix != 'B') {
      throw dimension_error("distribution spec: entry matrix must be A or B");
    }
    if (entry.row < 0 || entry.row >= target.rows() || entry.col < 0 ||
        entry.col >= target.cols()) {
      throw dimension_error("distribution spec: designated entry out of bounds");
    }
  }
}

double ScalarSampler::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double ScalarSampler::gaussian(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return mean + stddev * u * f;
}

double ScalarSampler::draw(const ScalarLaw& law) {
  switch (law.kind) {
    case ScalarLawKind::kGaussian:
      return gaussian(law.mean, std::sqrt(law.variance));
    case ScalarLawKind::kUniform:
      return law.lo + (law.hi - law.lo) * uniform01();
    case ScalarLawKind::kPointMasses: {
      const double u = uniform01();
      double cumulative = 0.0;
      for (std::size_t i = 0; i + 1 < law.values.size(); ++i) {
        cumulative += law.probs[i];
        if (u < cumulative) return law.values[i];
      }
      return law.values.back();
    }
  }
  throw domain_error("scalar law: unknown kind");
}

ParameterEnsemble sample_ensemble(const DistributionSpec& spec, int M,
                                  std::uint64_t seed,
                                  const Eigen::VectorXd& x0) {
  spec.validate();
  if (M < 1) throw dimension_error("sample_ensemble: M must be >= 1");
  if (x0.size() != spec.A0.rows()) {
    throw dimension_error("sample_ensemble: x0 dimension mismatch");
  }
  ScalarSampler sampler(seed);
  ParameterEnsemble e;
  e.kind = EnsembleKind::kMonteCarlo;
  e.seed = seed;
  e.members.reserve(M);
  const double weight = 1.0 / static_cast<double>(M);
  for (int i = 0; i < M; ++i) {
    EnsembleMember member;
    member.system.A = spec.A0;
    member.system.B = spec.B0;
    const double value = sampler.draw(spec.law);
    for (const auto& entry : spec.entries) {
      Eigen::MatrixXd& target =
          entry.matrix == 'A' ? member.system.A : member.system.B;
      target(entry.row, entry.col) = value;
    }
    member.weight = weight;
    member.x0 = x0;
    e.members.push_back(std::move(member));
  }
  e.validate();
  return e;
}

std::vector<double> sampled_values(const ParameterEnsemble& e,
                                   const DistributionSpec& spec) {
  if (spec.entries.empty()) {
    throw dimension_error("sampled_values: spec designates no entries");
  }
  const EntryRef& entry = spec.entries.front();
  std::vector<double> out;
  out.reserve(e.members.size());
  for (const auto& member : e.members) {
    const Eigen::MatrixXd& source =
        entry.matrix == 'A' ? member.system.A : member.system.B;
    out.push_back(source(entry.row, entry.col));
  }
  return out;
}

Eigen::MatrixXd expect_matrix(
    const ParameterEnsemble& e,
    const std::function<Eigen::MatrixXd(const SystemRealization&)>& f) {
  e.validate();
  Eigen::MatrixXd sum;
  for (const auto& member : e.members) {
    Eigen::MatrixXd value = f(member.system);
    if (sum.size() == 0) {
      sum = member.weight * value;
    } else {
      if (value.rows() != sum.rows() || value.cols() != sum.cols()) {
        throw dimension_error("expect_matrix: dimension mismatch across members");
      }
      sum += member.weight * value;
    }
  }
  return sum;
}

Trajectory averaged_trajectory(const FractionalOrder& order,
                               const ParameterEnsemble& e,
                               const ControlSignal& u, const MLOptions& opts) {
  e.validate();
  Trajectory average;
  average.grid = u.grid;
  average.states.assign(u.grid.N + 1,
                        Eigen::VectorXd::Zero(e.state_dim()));
  // Members are reduced in index order so the sum is deterministic. Monte
  // Carlo samples use the estimator form (1/M) sum x_k, a single division
  // that keeps shared initial states exact at node zero.
  const bool uniform = e.kind == EnsembleKind::kMonteCarlo;
  for (const auto& member : e.members) {
    const Trajectory traj =
        solve_trajectory(order, member.system, member.x0, u, opts);
    for (int k = 0; k <= u.grid.N; ++k) {
      if (uniform) {
        average.states[k] += traj.states[k];
      } else {
        average.states[k] += member.weight * traj.states[k];
      }
    }
  }
  if (uniform) {
    for (auto& state : average.states) state /= e.size();
  }
  return average;
}

}  // namespace fracctl
