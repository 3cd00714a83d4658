#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fracctl/ensemble.hpp"

namespace fracctl {

struct OrderConfig {
  double alpha = 1.0;
  double T = 1.0;
  bool operator==(const OrderConfig&) const = default;
};

struct DiscreteMemberConfig {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double weight = 1.0;
  std::optional<Eigen::VectorXd> x0;
  bool operator==(const DiscreteMemberConfig&) const;
};

struct EnsembleConfig {
  std::string kind;  // "discrete" | "gaussian" | "uniform"
  std::vector<DiscreteMemberConfig> members;  // discrete
  std::optional<DistributionSpec> spec;       // sampled kinds
  int M = 0;
  std::uint64_t seed = 0;
  bool operator==(const EnsembleConfig&) const;
};

struct ControlSectionConfig {
  Eigen::VectorXd target;
  double cg_tol = 1e-10;
  int cg_max_iter = 0;  // 0 selects 10 n
  bool operator==(const ControlSectionConfig&) const;
};

struct OutputConfig {
  std::string dir = ".";
  std::vector<std::string> formats{"csv", "json"};
  bool operator==(const OutputConfig&) const = default;
};

// Parsed form of the JSON run configuration. Unknown keys anywhere are a
// hard parse error; sections a command does not need may be omitted.
struct RunConfig {
  std::optional<OrderConfig> order;
  std::optional<SystemRealization> deterministic;  // system.deterministic
  std::optional<EnsembleConfig> ensemble;          // system.ensemble
  std::vector<Eigen::VectorXd> initial_state;      // one shared or per member
  bool shared_initial_state = true;
  std::optional<int> grid_N;
  std::optional<int> quadrature_Nq;
  std::optional<ControlSectionConfig> control;
  OutputConfig output;
  bool operator==(const RunConfig&) const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON object for the config_echo section; re-parsing it yields an
// equal RunConfig.
std::string run_config_to_json(const RunConfig& cfg);

// Materializes the configured system as an ensemble, resolving initial
// states. Deterministic systems become one-member discrete ensembles.
ParameterEnsemble build_ensemble_from_config(const RunConfig& cfg);

// Sampled parameter values when the ensemble came from a scalar law.
std::optional<std::vector<double>> config_sampled_values(
    const RunConfig& cfg, const ParameterEnsemble& e);

}  // namespace fracctl
