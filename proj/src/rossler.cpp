#include "fracctl/rossler.hpp"

#include <cmath>
#include <system_error>
#include <vector>

#include "fracctl/errors.hpp"
#include "fracctl/report_io.hpp"

namespace fracctl {

void RosslerConfig::validate() const {
  FractionalOrder{alpha, T}.validate();
  if (!(c > 0.0)) throw domain_error("rossler: c must be positive");
  if (M < 1 || N < 1 || Nq < 1) {
    throw dimension_error("rossler: M, N and Nq must be >= 1");
  }
  if (!variance_is_std && !(a_spread >= 0.0)) {
    throw domain_error("rossler: variance must be nonnegative");
  }
}

DistributionSpec rossler_spec(const RosslerConfig& cfg) {
  cfg.validate();
  DistributionSpec spec;
  spec.A0.resize(3, 3);
  spec.A0 << 0.0, -1.0, -1.0,
             1.0, cfg.a_mean, 0.0,
             cfg.b, 0.0, -cfg.c;
  spec.B0.resize(3, 1);
  spec.B0 << 0.0, 0.0, 1.0;
  if (cfg.point_mass) {
    spec.law = ScalarLaw::point_masses({cfg.a_mean}, {1.0});
  } else {
    const double variance =
        cfg.variance_is_std ? cfg.a_spread * cfg.a_spread : cfg.a_spread;
    spec.law = ScalarLaw::gaussian(cfg.a_mean, variance);
  }
  spec.entries = {EntryRef{'A', 1, 1}};
  return spec;
}

ParameterEnsemble build_rossler(const RosslerConfig& cfg) {
  return sample_ensemble(rossler_spec(cfg), cfg.M, cfg.seed, cfg.x0);
}

namespace {

// Per-member trajectories plus their average, accumulated in member order
// with the same reduction as averaged_trajectory.
void ensemble_trajectories(const FractionalOrder& order,
                           const ParameterEnsemble& e, const ControlSignal& u,
                           std::vector<Trajectory>& members,
                           Trajectory& average) {
  members.clear();
  members.reserve(e.members.size());
  average.grid = u.grid;
  average.states.assign(u.grid.N + 1, Eigen::VectorXd::Zero(e.state_dim()));
  const bool uniform = e.kind == EnsembleKind::kMonteCarlo;
  for (const auto& member : e.members) {
    members.push_back(solve_trajectory(order, member.system, member.x0, u));
    for (int k = 0; k <= u.grid.N; ++k) {
      if (uniform) {
        average.states[k] += members.back().states[k];
      } else {
        average.states[k] += member.weight * members.back().states[k];
      }
    }
  }
  if (uniform) {
    for (auto& state : average.states) state /= e.size();
  }
}

}  // namespace

void run_demo(const RosslerConfig& cfg, const std::filesystem::path& outdir,
              DemoSummary* summary) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw io_error("cannot create " + outdir.string());

  const DistributionSpec spec = rossler_spec(cfg);
  const ParameterEnsemble ensemble =
      sample_ensemble(spec, cfg.M, cfg.seed, cfg.x0);
  const FractionalOrder order{cfg.alpha, cfg.T};
  const TimeGrid grid{cfg.T, cfg.N};

  DemoSummary demo;
  demo.kalman = averaged_kalman(ensemble);
  if (demo.kalman.K.rows() == demo.kalman.K.cols()) {
    demo.kalman_det = demo.kalman.K.determinant();
  }

  ControlProblem problem;
  problem.order = order;
  problem.ensemble = ensemble;
  problem.target = cfg.target;
  problem.grid = grid;
  problem.quadrature_N = cfg.Nq;
  problem.cg_tol = cfg.cg_tol;
  problem.cg_max_iter = cfg.cg_max_iter;
  demo.control = hum_control(problem);
  demo.gramian = demo.control.gramian;

  std::vector<Trajectory> member_trajs;
  Trajectory average;
  const ControlSignal no_control = ControlSignal::zero(grid, 1);
  ensemble_trajectories(order, ensemble, no_control, member_trajs, average);
  write_text_file_atomic(outdir / "uncontrolled.csv",
                         trajectories_csv(member_trajs, average));

  write_text_file_atomic(outdir / "param_samples.csv",
                         param_samples_csv(sampled_values(ensemble, spec)));

  write_text_file_atomic(outdir / "control.csv",
                         control_csv(demo.control.u_hat));

  ensemble_trajectories(order, ensemble, demo.control.u_hat, member_trajs,
                        average);
  write_text_file_atomic(outdir / "controlled.csv",
                         trajectories_csv(member_trajs, average));

  JsonWriter cfg_json;
  cfg_json.begin_object();
  cfg_json.key("alpha").value(cfg.alpha);
  cfg_json.key("a_mean").value(cfg.a_mean);
  cfg_json.key("a_spread").value(cfg.a_spread);
  cfg_json.key("variance_is_std").value(cfg.variance_is_std);
  cfg_json.key("point_mass").value(cfg.point_mass);
  cfg_json.key("b").value(cfg.b);
  cfg_json.key("c").value(cfg.c);
  cfg_json.key("T").value(cfg.T);
  cfg_json.key("x0");
  write_vector(cfg_json, cfg.x0);
  cfg_json.key("M").value(cfg.M);
  cfg_json.key("N").value(cfg.N);
  cfg_json.key("Nq").value(cfg.Nq);
  cfg_json.key("seed").value(static_cast<std::uint64_t>(cfg.seed));
  cfg_json.key("target");
  write_vector(cfg_json, cfg.target);
  cfg_json.key("cg_tol").value(cfg.cg_tol);
  cfg_json.key("cg_max_iter").value(cfg.cg_max_iter);
  cfg_json.end_object();

  ReportEnvelope envelope;
  envelope.generated_at = current_utc_timestamp();
  envelope.config_json = cfg_json.str();
  envelope.kalman = demo.kalman;
  envelope.kalman_det = demo.kalman_det;
  envelope.gramian = demo.gramian;
  envelope.control = demo.control;
  write_text_file_atomic(outdir / "report.json", render_report(envelope));

  if (summary != nullptr) *summary = std::move(demo);
}

}  // namespace fracctl
