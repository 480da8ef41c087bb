// nchs: command line front end. Exit codes: 0 ok, 2 config, 3 solver, 4 check failed, 5 io.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>

#include "nchs/config.hpp"
#include "nchs/io.hpp"
#include "nchs/optimize.hpp"
#include "nchs/report.hpp"
#include "nchs/sensitivity.hpp"

using namespace nchs;

namespace {

constexpr int exit_config = 2, exit_solver = 3, exit_check = 4, exit_io = 5;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return exit_config;
    case ErrorCategory::solver: return exit_solver;
    case ErrorCategory::check_failed: return exit_check;
    case ErrorCategory::io: return exit_io;
  }
  return 1;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output.directory) / name).string();
}

RunConfig load(const std::string& path) {
  RunConfig cfg = load_config(path);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  return cfg;
}

int cmd_simulate(const std::string& cfg_path) {
  const RunConfig cfg = load(cfg_path);
  const Problem problem = make_problem(cfg);
  const AdmissibilityReport adm = initial_admissibility(problem.phi0, problem.model.laws(), &problem.model.kernel());
  for (const auto& m : adm.messages) fmt::print(stderr, "note: {}\n", m);
  Trajectory traj;
  try {
    traj = problem.solve(make_control(cfg.control, problem));
  } catch (const SimulationAborted& e) {
    Trajectory partial = e.partial();
    partial.config_hash = cfg.hash;
    save_trajectory(out_path(cfg, "partial_" + cfg.output.trajectory), partial);
    throw;
  }
  traj.config_hash = cfg.hash;
  const EnergyReport energy = energy_report(problem.model, traj);
  save_trajectory(out_path(cfg, cfg.output.trajectory), traj);
  write_diagnostics(out_path(cfg, cfg.output.diagnostics), traj, energy);
  write_phase_dumps(cfg.output.directory, traj, cfg.output.snapshot_times);
  double drift = 0.0, bound = 0.0, div = 0.0;
  const double m0 = mass(traj.snapshots.front().phi);
  for (const auto& s : traj.snapshots) {
    drift = std::max(drift, std::abs(mass(s.phi) - m0));
    bound = std::max(bound, bound_violation(s.phi));
    div = std::max(div, max_abs(divergence(s.u)));
  }
  fmt::print("simulate: {} steps, mass drift {:.3e}, bound violation {:.3e}, max div {:.3e}, energy residual l1 {:.3e}\n",
             traj.steps(), drift, bound, div, energy.residual_l1);
  return 0;
}

int cmd_optimize(const std::string& cfg_path) {
  const RunConfig cfg = load(cfg_path);
  const Problem problem = make_problem(cfg);
  const CostWeights weights = make_weights(cfg.optimize, problem);
  ControlField v0 = make_control(cfg.control, problem);
  attach_bounds(v0, cfg.optimize);
  const OptimizationResult res = projected_gradient_descent(problem, v0, weights, cfg.optimize.optimizer);
  Trajectory traj = res.last.trajectory;
  traj.config_hash = cfg.hash;
  save_control(out_path(cfg, cfg.output.control), res.v, problem.cfg.dt);
  save_trajectory(out_path(cfg, cfg.output.trajectory), traj);
  write_history(out_path(cfg, cfg.output.history), res.history);
  const auto& first = res.history.front();
  const auto& last = res.history.back();
  fmt::print("optimize: {} after {} iterations, f {:.6e} -> {:.6e} ({:.1f}% reduction), kkt {:.3e}\n",
             to_string(res.status), last.iteration, first.f, last.f,
             first.f > 0.0 ? 100.0 * (1.0 - last.f / first.f) : 0.0, last.kkt);
  return res.status == OptimizerStatus::line_search_failed ? exit_check : 0;
}

int cmd_grad_check(const std::string& cfg_path) {
  const RunConfig cfg = load(cfg_path);
  const Problem problem = make_problem(cfg);
  const CostWeights weights = make_weights(cfg.optimize, problem);
  const ControlField v = make_control(cfg.control, problem);
  const GradientEvaluation ev = reduced_gradient(problem, v, weights);
  std::vector<ControlField> dirs;
  for (int k = 0; k < cfg.checks.directions; ++k)
    dirs.push_back(random_control(problem.model.grid(), problem.steps(), problem.cfg.dt, 1.0,
                                  cfg.checks.seed + std::uint64_t(k)));
  const std::vector<double> fd = fd_gradient(problem, v, weights, dirs, cfg.checks.eps);
  double worst = 0.0;
  fmt::print("{:>4} {:>22} {:>22} {:>12}\n", "dir", "finite difference", "adjoint", "rel error");
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const double ad = dot(ev.gradient, dirs[k], problem.cfg.dt);
    const double rel = std::abs(fd[k] - ad) / std::max(std::abs(ad), 1e-300);
    worst = std::max(worst, rel);
    fmt::print("{:>4} {:>22.14e} {:>22.14e} {:>12.3e}\n", k, fd[k], ad, rel);
  }
  const bool ok = worst <= cfg.checks.tolerance;
  fmt::print("grad-check: {} directions, max relative error {:.3e} (tolerance {:.1e}): {}\n", dirs.size(), worst,
             cfg.checks.tolerance, ok ? "PASS" : "FAIL");
  return ok ? 0 : exit_check;
}

int cmd_lin_check(const std::string& cfg_path) {
  const RunConfig cfg = load(cfg_path);
  const Problem problem = make_problem(cfg);
  const ControlField v = make_control(cfg.control, problem);
  const ControlField h =
      random_control(problem.model.grid(), problem.steps(), problem.cfg.dt, 1.0, cfg.checks.seed);
  const TaylorReport rep = taylor_check(problem, v, h, cfg.checks.eps_list);
  fmt::print("{:>10} {:>14}\n", "eps", "remainder");
  for (const auto& r : rep.rows) fmt::print("{:>10.1e} {:>14.6e}\n", r.eps, r.remainder);
  const double first = rep.rows.front().remainder, last = rep.rows.back().remainder;
  const double ratio = first > 0.0 ? last / first : 0.0;
  const bool ok = rep.monotone && ratio <= cfg.checks.taylor_ratio;
  fmt::print("lin-check: monotone {}, r(last)/r(first) {:.3e} (limit {:.2f}): {}\n", rep.monotone ? "yes" : "no", ratio,
             cfg.checks.taylor_ratio, ok ? "PASS" : "FAIL");
  return ok ? 0 : exit_check;
}

int cmd_energy_report(const std::string& cfg_path, const std::string& traj_path) {
  const RunConfig cfg = load(cfg_path);
  const Problem problem = make_problem(cfg);
  const Trajectory traj = traj_path.empty() ? problem.solve(make_control(cfg.control, problem))
                                            : load_trajectory(traj_path);
  if (!(traj.grid == problem.model.grid())) throw ConfigError("energy-report: trajectory grid differs from the config");
  const EnergyReport energy = energy_report(problem.model, traj);
  write_diagnostics(out_path(cfg, cfg.output.diagnostics), traj, energy);
  fmt::print("energy-report: {} snapshots, residual l1 {:.6e}\n", traj.snapshots.size(), energy.residual_l1);
  return 0;
}

int cmd_validate_laws(const std::string& cfg_path, const std::string& law) {
  MaterialLaws laws;
  if (!cfg_path.empty()) {
    RunConfig cfg = load(cfg_path);
    cfg.validate_laws = false;
    laws = make_laws(cfg);
  } else {
    laws = laws_by_name(law);
  }
  const ValidationReport rep = validate(laws);
  for (const auto& c : rep.checks)
    fmt::print("{:<14} {:<5} worst s = {: .6f}  value = {: .6e}  {}\n", c.name, c.passed ? "pass" : "FAIL",
               c.worst_sample, c.worst_value, c.message);
  fmt::print("validate-laws: '{}' {}\n", laws.name, rep.all_passed() ? "all hypotheses hold" : "hypotheses violated");
  return rep.all_passed() ? 0 : exit_check;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Cahn-Hilliard-Navier-Stokes solver and optimal-control workbench"};
  app.require_subcommand(0, 1);
  std::string cfg_path, traj_path, law = "log-degenerate";

  auto* sim = app.add_subcommand("simulate", "Run the forward solver and write trajectory + diagnostics");
  sim->add_option("-c,--config", cfg_path, "YAML run configuration")->required();
  auto* opt = app.add_subcommand("optimize", "Projected-gradient minimization of the tracking cost");
  opt->add_option("-c,--config", cfg_path, "YAML run configuration")->required();
  auto* grad = app.add_subcommand("grad-check", "Finite differences against the adjoint gradient");
  grad->add_option("-c,--config", cfg_path, "YAML run configuration")->required();
  auto* lin = app.add_subcommand("lin-check", "Taylor remainder test of the linearized solver");
  lin->add_option("-c,--config", cfg_path, "YAML run configuration")->required();
  auto* energy = app.add_subcommand("energy-report", "Energy balance residuals of a trajectory");
  energy->add_option("-c,--config", cfg_path, "YAML run configuration")->required();
  energy->add_option("-t,--trajectory", traj_path, "Existing trajectory file (default: simulate)");
  auto* laws = app.add_subcommand("validate-laws", "Sample the constitutive hypotheses");
  laws->add_option("-c,--config", cfg_path, "YAML run configuration");
  laws->add_option("-l,--law", law, "Builtin law name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return exit_config;
  }

  try {
    if (*sim) return cmd_simulate(cfg_path);
    if (*opt) return cmd_optimize(cfg_path);
    if (*grad) return cmd_grad_check(cfg_path);
    if (*lin) return cmd_lin_check(cfg_path);
    if (*energy) return cmd_energy_report(cfg_path, traj_path);
    if (*laws) return cmd_validate_laws(cfg_path, law);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_io;
  }
  return exit_config;
}
