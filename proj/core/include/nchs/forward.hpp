#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "nchs/control.hpp"
#include "nchs/error.hpp"
#include "nchs/grid.hpp"
#include "nchs/material.hpp"
#include "nchs/nonlocal.hpp"
#include "nchs/operators.hpp"

namespace nchs {

struct SolverConfig {
  double dt = 1e-3;
  double T = 1e-2;
  double tol_div = 1e-10;
  double tol_bound = 1e-8;
  double tol_poisson = 1e-10;
  double cfl_safety = 1.0;
  /// Iterative-refinement sweeps allowed per sparse solve.
  int max_linear_iterations = 5;

  /// Number of steps N = T/dt. Throws ConfigError unless T is a whole multiple of dt.
  int steps() const;
  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Grid, laws and kernel together with the operators every step reuses. Copies share state.
class Model {
 public:
  Model(const Grid& grid, MaterialLaws laws, DiscreteKernel kernel);

  const Grid& grid() const;
  const MaterialLaws& laws() const;
  const DiscreteKernel& kernel() const;
  const ConvectionOperator& convection() const;
  const ViscousOperator& viscous() const;
  const PoissonSolver& poisson() const;
  const StreamfunctionBasis& streamfunction() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct StateSnapshot {
  double t = 0.0;
  VectorField u;
  ScalarField phi;
  ScalarField pi;
};

struct Trajectory {
  Grid grid;
  double dt = 0.0;
  std::vector<StateSnapshot> snapshots;  ///< N+1 states
  std::vector<VectorField> controls;     ///< N controls, v^n acts on step n -> n+1
  std::uint64_t config_hash = 0;

  int steps() const { return int(controls.size()); }
};

/// Thrown by simulate when a step fails; carries everything computed before the failure.
class SimulationAborted : public SolverError {
 public:
  SimulationAborted(const std::string& what, int step, std::shared_ptr<const Trajectory> partial)
      : SolverError(what), step_(step), partial_(std::move(partial)) {}
  int step() const { return step_; }
  const Trajectory& partial() const { return *partial_; }

 private:
  int step_;
  std::shared_ptr<const Trajectory> partial_;
};

/// One Cahn-Hilliard step with frozen coefficients:
///   (phi+ - phi)/dt + div(u avg(phi)) = div(lambda(phi) grad phi+) - div(m(phi) grad K*phi)
/// Throws SolverError on a bound violation max|phi+| > 1 + tol_bound.
ScalarField ch_step(const Model& model, const ScalarField& phi, const VectorField& u, const SolverConfig& cfg);

struct NsStepResult {
  VectorField u;
  ScalarField pi;
};

/// One momentum step, implicit in viscosity and pressure, explicit in convection and forcing:
///   (u+ - u)/dt + N(u,u) - V(nu(phi+)) u+ + grad pi+ = -avg(K*phi+) grad phi+ + v,  div u+ = 0.
/// Throws SolverError if the CFL number of u exceeds cfg.cfl_safety.
NsStepResult ns_step(const Model& model, const VectorField& u, const ScalarField& phi_next, const VectorField& v,
                     const SolverConfig& cfg);

/// Korteweg force -avg(K*phi) grad(phi) on interior faces.
VectorField korteweg_force(const Model& model, const ScalarField& phi);

/// Alternates ch_step (with u^n) and ns_step (with phi^{n+1}). Throws SimulationAborted.
Trajectory simulate(const Model& model, const VectorField& u0, const ScalarField& phi0, const ControlField& control,
                    const SolverConfig& cfg);

struct EnergyTerms {
  double t = 0.0;
  double kinetic = 0.0;             ///< 1/2 ||u||^2
  double phase = 0.0;               ///< 1/2 ||phi||^2
  double diffusive_dissipation = 0.0;  ///< int lambda(phi) |grad phi|^2
  double viscous_dissipation = 0.0;    ///< 2 ||sqrt(nu) D u||^2
  double nonlocal_work = 0.0;       ///< int m(phi) (grad K*phi) . grad phi
  double korteweg_work = 0.0;       ///< int (K*phi) u . grad phi
  double control_work = 0.0;        ///< <v, u>, v averaged over the two adjacent steps
  double residual = 0.0;            ///< zero at the first and last snapshot
};

struct EnergyReport {
  std::vector<EnergyTerms> steps;
  double residual_l1 = 0.0;  ///< sum over interior snapshots of |residual| dt
};

/// Residual of the energy balance
///   d/dt 1/2(|u|^2 + |phi|^2) + int lambda |grad phi|^2 + 2|sqrt(nu) Du|^2
///     = int m (grad K*phi).grad phi - int (K*phi) u.grad phi + <v,u>
/// with a centered time difference at each interior snapshot.
EnergyReport energy_report(const Model& model, const Trajectory& traj);

/// Everything fixed about a control problem except the control itself.
struct Problem {
  Model model;
  VectorField u0;
  ScalarField phi0;
  SolverConfig cfg;

  Trajectory solve(const ControlField& v) const { return simulate(model, u0, phi0, v, cfg); }
  int steps() const { return cfg.steps(); }
};

double mass(const ScalarField& phi);
double bound_violation(const ScalarField& phi);

}  // namespace nchs
