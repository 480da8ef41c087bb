#include "nchs/report.hpp"

#include <cmath>
#include <filesystem>
#include <fmt/format.h>

#include "nchs/io.hpp"

namespace nchs {

std::vector<std::string> diagnostics_columns() {
  return {"step", "t", "mass", "mass_drift", "bound_violation", "kinetic", "phase_energy",
          "diffusive_dissipation", "viscous_dissipation", "nonlocal_work", "korteweg_work", "control_work",
          "energy_residual", "max_div"};
}

std::vector<std::string> history_columns() {
  return {"iteration", "f", "velocity_tracking", "phase_tracking", "terminal_velocity", "terminal_phase",
          "control", "kkt_residual", "step", "trials", "wall_time"};
}

namespace {

std::string header(const char* schema, const std::vector<std::string>& cols) {
  std::string s = std::string(schema) + "\n";
  for (std::size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + cols[k];
  return s + "\n";
}

}  // namespace

std::string diagnostics_csv(const Trajectory& traj, const EnergyReport& energy) {
  if (energy.steps.size() != traj.snapshots.size()) throw SolverError("diagnostics: energy report length mismatch");
  std::string s = header(diagnostics_schema, diagnostics_columns());
  const double m0 = mass(traj.snapshots.front().phi);
  for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
    const auto& snap = traj.snapshots[n];
    const auto& e = energy.steps[n];
    const double m = mass(snap.phi);
    s += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                     n, snap.t, m, m - m0, bound_violation(snap.phi), e.kinetic, e.phase, e.diffusive_dissipation,
                     e.viscous_dissipation, e.nonlocal_work, e.korteweg_work, e.control_work, e.residual,
                     max_abs(divergence(snap.u)));
  }
  return s;
}

std::string history_csv(const std::vector<IterationRecord>& history) {
  std::string s = header(history_schema, history_columns());
  for (const auto& h : history)
    s += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.6f}\n", h.iteration, h.f,
                     h.terms.velocity_tracking, h.terms.phase_tracking, h.terms.terminal_velocity,
                     h.terms.terminal_phase, h.terms.control, h.kkt, h.step, h.trials, h.wall_time);
  return s;
}

std::string phase_dump(const ScalarField& phi, double t) {
  const Grid& g = phi.grid();
  std::string s = fmt::format("# t = {:.17g}\n# x y phi\n", t);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) s += fmt::format("{:.10g} {:.10g} {:.17g}\n", g.xc(i), g.yc(j), phi(i, j));
    s += "\n";
  }
  return s;
}

void write_diagnostics(const std::string& path, const Trajectory& traj, const EnergyReport& energy) {
  write_file_atomic(path, diagnostics_csv(traj, energy));
}

void write_history(const std::string& path, const std::vector<IterationRecord>& history) {
  write_file_atomic(path, history_csv(history));
}

std::vector<std::string> write_phase_dumps(const std::string& directory, const Trajectory& traj,
                                           const std::vector<double>& times) {
  std::vector<std::string> paths;
  if (traj.snapshots.empty()) return paths;
  for (double t : times) {
    const double idx = traj.dt > 0.0 ? std::round(t / traj.dt) : 0.0;
    const auto n = std::size_t(std::clamp(idx, 0.0, double(traj.snapshots.size() - 1)));
    const auto path = (std::filesystem::path(directory) / fmt::format("phi_{:06d}.dat", n)).string();
    write_file_atomic(path, phase_dump(traj.snapshots[n].phi, traj.snapshots[n].t));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace nchs
