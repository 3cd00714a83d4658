// Command-line front end: parses run configurations, dispatches to the
// library and serializes trajectory CSVs and JSON reports.
//
// Exit codes: 0 success, 2 config parse error, 3 numerical-domain error,
// 4 I/O error, 5 singular Gramian, 6 CG failed to converge.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracctl/errors.hpp"
#include "fracctl/report_io.hpp"
#include "fracctl/rossler.hpp"
#include "fracctl/run_config.hpp"
#include "fracctl/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;
constexpr int kExitSingular = 5;
constexpr int kExitCgFailed = 6;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_N;
  std::optional<int> quadrature_Nq;
  std::optional<int> samples;
  std::optional<double> tol;
};

fracctl::RunConfig load_config(const GlobalFlags& flags) {
  if (flags.config_path.empty()) {
    throw fracctl::config_error("--config PATH is required for this command");
  }
  fracctl::RunConfig cfg = fracctl::load_run_config(flags.config_path);
  if (flags.output_dir) cfg.output.dir = *flags.output_dir;
  if (flags.seed && cfg.ensemble) cfg.ensemble->seed = *flags.seed;
  if (flags.grid_N) cfg.grid_N = *flags.grid_N;
  if (flags.quadrature_Nq) cfg.quadrature_Nq = *flags.quadrature_Nq;
  if (flags.samples && cfg.ensemble) {
    if (cfg.ensemble->kind == "discrete") {
      throw fracctl::config_error("--samples does not apply to discrete laws");
    }
    cfg.ensemble->M = *flags.samples;
  }
  if (flags.tol && cfg.control) cfg.control->cg_tol = *flags.tol;
  return cfg;
}

fracctl::FractionalOrder require_order(const fracctl::RunConfig& cfg) {
  if (!cfg.order) {
    throw fracctl::config_error("config needs an 'order' section");
  }
  return {cfg.order->alpha, cfg.order->T};
}

bool wants(const fracctl::RunConfig& cfg, const std::string& format) {
  for (const auto& f : cfg.output.formats) {
    if (f == format) return true;
  }
  return false;
}

std::filesystem::path ensure_outdir(const fracctl::RunConfig& cfg) {
  std::filesystem::path dir = cfg.output.dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw fracctl::io_error("cannot create output dir " + dir.string());
  return dir;
}

int require_grid(const fracctl::RunConfig& cfg) {
  if (!cfg.grid_N) throw fracctl::config_error("config needs a 'grid' section");
  return *cfg.grid_N;
}

void run_simulate(const GlobalFlags& flags) {
  const fracctl::RunConfig cfg = load_config(flags);
  const fracctl::FractionalOrder order = require_order(cfg);
  const fracctl::TimeGrid grid{order.T, require_grid(cfg)};
  const fracctl::ParameterEnsemble ensemble =
      fracctl::build_ensemble_from_config(cfg);
  const std::filesystem::path outdir = ensure_outdir(cfg);

  const fracctl::ControlSignal zero =
      fracctl::ControlSignal::zero(grid, ensemble.input_dim());
  std::vector<fracctl::Trajectory> members;
  members.reserve(ensemble.members.size());
  fracctl::Trajectory average;
  average.grid = grid;
  average.states.assign(grid.N + 1,
                        Eigen::VectorXd::Zero(ensemble.state_dim()));
  for (const auto& member : ensemble.members) {
    members.push_back(fracctl::solve_trajectory(order, member.system,
                                                member.x0, zero));
    for (int k = 0; k <= grid.N; ++k) {
      average.states[k] += member.weight * members.back().states[k];
    }
  }
  if (wants(cfg, "csv")) {
    fracctl::write_text_file_atomic(outdir / "uncontrolled.csv",
                                    fracctl::trajectories_csv(members, average));
    const auto values = fracctl::config_sampled_values(cfg, ensemble);
    if (values) {
      fracctl::write_text_file_atomic(outdir / "param_samples.csv",
                                      fracctl::param_samples_csv(*values));
    }
  }
}

void write_envelope(const fracctl::RunConfig& cfg,
                    const std::filesystem::path& outdir,
                    fracctl::ReportEnvelope envelope) {
  envelope.generated_at = fracctl::current_utc_timestamp();
  envelope.config_json = fracctl::run_config_to_json(cfg);
  fracctl::write_text_file_atomic(outdir / "report.json",
                                  fracctl::render_report(envelope));
}

void run_gramian(const GlobalFlags& flags) {
  const fracctl::RunConfig cfg = load_config(flags);
  const fracctl::FractionalOrder order = require_order(cfg);
  const fracctl::ParameterEnsemble ensemble =
      fracctl::build_ensemble_from_config(cfg);
  const int nq = cfg.quadrature_Nq.value_or(400);
  fracctl::ReportEnvelope envelope;
  envelope.gramian = fracctl::averaged_gramian(order, ensemble, nq);
  write_envelope(cfg, ensure_outdir(cfg), std::move(envelope));
}

void run_kalman(const GlobalFlags& flags) {
  const fracctl::RunConfig cfg = load_config(flags);
  const fracctl::ParameterEnsemble ensemble =
      fracctl::build_ensemble_from_config(cfg);
  fracctl::ReportEnvelope envelope;
  envelope.kalman = fracctl::averaged_kalman(ensemble);
  if (envelope.kalman->K.rows() == envelope.kalman->K.cols()) {
    envelope.kalman_det = envelope.kalman->K.determinant();
  }
  write_envelope(cfg, ensure_outdir(cfg), std::move(envelope));
}

int run_control(const GlobalFlags& flags) {
  const fracctl::RunConfig cfg = load_config(flags);
  const fracctl::FractionalOrder order = require_order(cfg);
  if (!cfg.control) {
    throw fracctl::config_error("config needs a 'control' section with target");
  }
  const fracctl::ParameterEnsemble ensemble =
      fracctl::build_ensemble_from_config(cfg);

  fracctl::ControlProblem problem;
  problem.order = order;
  problem.ensemble = ensemble;
  problem.target = cfg.control->target;
  problem.grid = fracctl::TimeGrid{order.T, require_grid(cfg)};
  problem.quadrature_N = cfg.quadrature_Nq.value_or(400);
  problem.cg_tol = cfg.control->cg_tol;
  problem.cg_max_iter = cfg.control->cg_max_iter;

  const fracctl::ControlResult result = fracctl::hum_control(problem);
  const std::filesystem::path outdir = ensure_outdir(cfg);
  if (wants(cfg, "csv")) {
    fracctl::write_text_file_atomic(outdir / "control.csv",
                                    fracctl::control_csv(result.u_hat));
  }
  fracctl::ReportEnvelope envelope;
  envelope.kalman = fracctl::averaged_kalman(ensemble);
  if (envelope.kalman->K.rows() == envelope.kalman->K.cols()) {
    envelope.kalman_det = envelope.kalman->K.determinant();
  }
  envelope.gramian = result.gramian;
  envelope.control = result;
  write_envelope(cfg, outdir, std::move(envelope));
  if (!result.converged) {
    std::cerr << "control: CG did not reach tolerance " << problem.cg_tol
              << " within " << result.iterations << " iterations\n";
    return kExitCgFailed;
  }
  return kExitOk;
}

void run_rossler_demo(const fracctl::RosslerConfig& cfg,
                      const std::string& outdir) {
  fracctl::DemoSummary summary;
  fracctl::run_demo(cfg, outdir, &summary);
  std::cout << "kalman rank " << summary.kalman.rank;
  if (summary.kalman_det) std::cout << ", det " << *summary.kalman_det;
  std::cout << "\ncg iterations " << summary.control.iterations
            << ", terminal error " << summary.control.terminal_error
            << ", energy " << summary.control.energy << "\n";
}

int run_main(int argc, char** argv) {
  CLI::App app{"Averaged controllability toolkit for fractional-order linear "
               "systems with random parameters"};
  app.set_version_flag("--version", fracctl::kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration");
  app.add_option("-o,--output", flags.output_dir, "Output directory override");
  app.add_option("--seed", flags.seed, "Sampling seed override");
  app.add_option("--grid", flags.grid_N, "Time grid subdivision override");
  app.add_option("--quadrature", flags.quadrature_Nq,
                 "Gramian quadrature subdivision override");
  app.add_option("--samples", flags.samples, "Monte Carlo sample count override");
  app.add_option("--tol", flags.tol, "CG residual tolerance override");

  auto* simulate = app.add_subcommand(
      "simulate", "Solve the uncontrolled ensemble and write trajectory CSVs");
  auto* gramian = app.add_subcommand(
      "gramian", "Assemble the averaged Gramian and report its spectrum");
  auto* kalman = app.add_subcommand(
      "kalman", "Build the averaged Kalman matrix and report its rank");
  auto* control = app.add_subcommand(
      "control", "Compute the minimal-energy control for the average");

  auto* demo = app.add_subcommand(
      "rossler-demo", "Reproduce the fractional Rossler study end to end");
  fracctl::RosslerConfig demo_cfg;
  std::string demo_outdir = "rossler_out";
  demo->add_option("--outdir", demo_outdir, "Output directory");
  demo->add_option("--samples", demo_cfg.M, "Monte Carlo sample count");
  demo->add_option("--grid", demo_cfg.N, "Time grid subdivision");
  demo->add_option("--quadrature", demo_cfg.Nq, "Quadrature subdivision");
  demo->add_option("--seed", demo_cfg.seed, "Sampling seed");
  demo->add_option("--tol", demo_cfg.cg_tol, "CG residual tolerance");
  demo->add_flag("--variance-is-std", demo_cfg.variance_is_std,
                 "Read the parameter spread 0.2 as a standard deviation");
  demo->add_flag("--point-mass", demo_cfg.point_mass,
                 "Degenerate parameter law at the mean");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      run_simulate(flags);
    } else if (gramian->parsed()) {
      run_gramian(flags);
    } else if (kalman->parsed()) {
      run_kalman(flags);
    } else if (control->parsed()) {
      return run_control(flags);
    } else if (demo->parsed()) {
      if (flags.output_dir) demo_outdir = *flags.output_dir;
      run_rossler_demo(demo_cfg, demo_outdir);
    }
  } catch (const fracctl::config_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const fracctl::singular_gramian_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSingular;
  } catch (const fracctl::io_error& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  } catch (const fracctl::domain_error& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const fracctl::convergence_error& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const std::overflow_error& err) {
    std::cerr << "numerical error: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const fracctl::dimension_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 1;
  }
}
