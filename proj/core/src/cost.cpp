#include "nchs/cost.hpp"

#include <fmt/format.h>

namespace nchs {

void CostWeights::validate(const Grid& grid, int steps) const {
  for (double b : {beta1, beta2, beta3, beta4, gamma})
    if (!(b >= 0.0)) throw ConfigError("cost weights must be nonnegative");
  if (beta1 == 0.0 && beta2 == 0.0 && beta3 == 0.0 && beta4 == 0.0 && gamma == 0.0)
    throw ConfigError("cost weights: beta1..beta4 and gamma must not all vanish");
  const auto n = std::size_t(steps) + 1;
  if (beta1 > 0.0) {
    if (u_Q.size() != n) throw ConfigError(fmt::format("targets.u_Q: expected {} snapshots, got {}", n, u_Q.size()));
    for (const auto& t : u_Q)
      if (!(t.grid() == grid)) throw ConfigError("targets.u_Q: grid mismatch");
  }
  if (beta2 > 0.0) {
    if (phi_Q.size() != n)
      throw ConfigError(fmt::format("targets.phi_Q: expected {} snapshots, got {}", n, phi_Q.size()));
    for (const auto& t : phi_Q)
      if (!(t.grid() == grid)) throw ConfigError("targets.phi_Q: grid mismatch");
  }
  if (beta3 > 0.0 && !(u_Omega.grid() == grid)) throw ConfigError("targets.u_Omega: grid mismatch");
  if (beta4 > 0.0 && !(phi_Omega.grid() == grid)) throw ConfigError("targets.phi_Omega: grid mismatch");
}

namespace {

double time_weight(std::size_t n, std::size_t last) { return n == 0 || n == last ? 0.5 : 1.0; }

}  // namespace

CostBreakdown cost(const Trajectory& traj, const ControlField& v, const CostWeights& w) {
  const int steps = traj.steps();
  w.validate(traj.grid, steps);
  if (v.steps() != steps) throw SolverError("cost: control/trajectory step count mismatch");
  CostBreakdown c;
  const std::size_t last = traj.snapshots.size() - 1;
  const double dt = traj.dt;
  for (std::size_t n = 0; n <= last; ++n) {
    const auto& s = traj.snapshots[n];
    const double tw = time_weight(n, last) * dt;
    if (w.beta1 > 0.0) {
      const VectorField d = s.u - w.u_Q[n];
      c.velocity_tracking += 0.5 * w.beta1 * tw * dot(d, d);
    }
    if (w.beta2 > 0.0) {
      const ScalarField d = s.phi - w.phi_Q[n];
      c.phase_tracking += 0.5 * w.beta2 * tw * dot(d, d);
    }
  }
  if (w.beta3 > 0.0) {
    const VectorField d = traj.snapshots[last].u - w.u_Omega;
    c.terminal_velocity = 0.5 * w.beta3 * dot(d, d);
  }
  if (w.beta4 > 0.0) {
    const ScalarField d = traj.snapshots[last].phi - w.phi_Omega;
    c.terminal_phase = 0.5 * w.beta4 * dot(d, d);
  }
  if (w.gamma > 0.0) c.control = 0.5 * w.gamma * dot(v, v, dt);
  return c;
}

CostSources cost_sources(const Trajectory& traj, const CostWeights& w) {
  const int steps = traj.steps();
  w.validate(traj.grid, steps);
  const std::size_t last = traj.snapshots.size() - 1;
  CostSources src;
  for (std::size_t n = 0; n <= last; ++n) {
    const auto& s = traj.snapshots[n];
    const double tw = time_weight(n, last) * traj.dt;
    VectorField du(traj.grid);
    ScalarField dphi(traj.grid);
    if (w.beta1 > 0.0) du.axpy(w.beta1 * tw, s.u - w.u_Q[n]);
    if (w.beta2 > 0.0) dphi.axpy(w.beta2 * tw, s.phi - w.phi_Q[n]);
    if (n == last) {
      if (w.beta3 > 0.0) du.axpy(w.beta3, s.u - w.u_Omega);
      if (w.beta4 > 0.0) dphi.axpy(w.beta4, s.phi - w.phi_Omega);
    }
    src.du.push_back(std::move(du));
    src.dphi.push_back(std::move(dphi));
  }
  return src;
}

}  // namespace nchs
