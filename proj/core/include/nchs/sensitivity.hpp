#pragma once

#include <cstdint>
#include <vector>

#include "nchs/control.hpp"
#include "nchs/cost.hpp"
#include "nchs/forward.hpp"

namespace nchs {

struct LinSnapshot {
  double t = 0.0;
  VectorField xi;
  ScalarField eta;
};

/// Exact directional derivative of simulate() about traj in the control direction h.
/// Snapshot 0 is zero. Throws SolverError on step-count mismatch.
std::vector<LinSnapshot> solve_linearized(const Model& model, const Trajectory& traj, const ControlField& h,
                                          const SolverConfig& cfg);

struct AdjSnapshot {
  double t = 0.0;
  VectorField p;  ///< divergence free; p[n] (n < N) is the gradient representer for v^n
  ScalarField q;
};

/// Transpose of the linearized step sequence, swept backwards from the sources. Snapshot N
/// holds the terminal data: p = Leray projection of du[N], q = dphi[N]. The result satisfies
///   sum_n <du[n], xi^n> + <dphi[n], eta^n> = sum_{n<N} dt <p[n], h^n>
/// for every direction h, up to linear-solver round-off.
std::vector<AdjSnapshot> solve_adjoint(const Model& model, const Trajectory& traj, const CostSources& sources,
                                       const SolverConfig& cfg);
std::vector<AdjSnapshot> solve_adjoint(const Model& model, const Trajectory& traj, const CostWeights& weights,
                                       const SolverConfig& cfg);

/// The W-norm of a state perturbation:
///   max_n |du| + max_n |dphi|_H1 + (sum dt |grad du|^2)^1/2 + (sum dt |lap dphi|^2)^1/2
double state_norm(const Model& model, const std::vector<VectorField>& du, const std::vector<ScalarField>& dphi,
                  double dt);
double trajectory_distance(const Model& model, const Trajectory& a, const Trajectory& b);

struct TaylorRow {
  double eps = 0.0;
  double remainder = 0.0;  ///< |S(v + eps h) - S(v) - eps S'(v) h|_W / eps
};

struct TaylorReport {
  std::vector<TaylorRow> rows;
  bool monotone = true;  ///< remainders strictly decrease along eps (or are all zero)
};

/// eps_list must be decreasing. Forward solves for the different eps run concurrently.
TaylorReport taylor_check(const Problem& problem, const ControlField& v, const ControlField& h,
                          const std::vector<double>& eps_list);

/// |S(v2) - S(v1)|_W / |v2 - v1|_{L2(Q)}; 0 when the controls coincide.
double lipschitz_probe(const Problem& problem, const ControlField& v1, const ControlField& v2);

/// Smooth random control: each step and component is a sum of low sine modes with N(0,1)
/// amplitudes, scaled so that the control has L2(Q) norm `radius`.
ControlField random_control(const Grid& grid, int steps, double dt, double radius, std::uint64_t seed);

struct LipschitzEnsemble {
  std::vector<double> ratios;
  double max_over_min = 0.0;
};

/// Ratios over `pairs` random control pairs inside the ball of the given radius.
LipschitzEnsemble lipschitz_ensemble(const Problem& problem, int pairs, double radius, std::uint64_t seed);

}  // namespace nchs
