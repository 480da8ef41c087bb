#pragma once

#include <vector>

#include "nchs/control.hpp"
#include "nchs/forward.hpp"

namespace nchs {

/// Weights and targets of the tracking functional
///   J = b1/2 int |u - uQ|^2 + b2/2 int |phi - phiQ|^2 + b3/2 |u(T) - uO|^2 + b4/2 |phi(T) - phiO|^2
///       + gamma/2 int |v|^2
/// Time integrals of the state terms use the trapezoid rule over snapshots; the control term is
/// exact for the piecewise-constant control.
struct CostWeights {
  double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0, beta4 = 0.0;
  double gamma = 0.0;
  std::vector<VectorField> u_Q;   ///< N+1 snapshots, or empty when beta1 = 0
  std::vector<ScalarField> phi_Q; ///< N+1 snapshots, or empty when beta2 = 0
  VectorField u_Omega;            ///< empty grid allowed when beta3 = 0
  ScalarField phi_Omega;          ///< empty grid allowed when beta4 = 0

  /// Throws ConfigError on negative weights, all-zero weights or target shape mismatch.
  void validate(const Grid& grid, int steps) const;
};

struct CostBreakdown {
  double velocity_tracking = 0.0;
  double phase_tracking = 0.0;
  double terminal_velocity = 0.0;
  double terminal_phase = 0.0;
  double control = 0.0;
  double total() const {
    return velocity_tracking + phase_tracking + terminal_velocity + terminal_phase + control;
  }
};

CostBreakdown cost(const Trajectory& traj, const ControlField& v, const CostWeights& w);

/// Representers of the state derivative of J: dJ = sum_n <du[n], du^n> + <dphi[n], dphi^n>.
struct CostSources {
  std::vector<VectorField> du;
  std::vector<ScalarField> dphi;
};

CostSources cost_sources(const Trajectory& traj, const CostWeights& w);

}  // namespace nchs
