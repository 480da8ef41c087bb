#include "nchs/forward.hpp"

#include <cmath>
#include <fmt/format.h>

#include "scheme.hpp"

namespace nchs {

using namespace detail;

int SolverConfig::steps() const {
  if (!(dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (!(T >= dt)) throw ConfigError("time.T must be at least time.dt");
  const double n = T / dt;
  const long long k = std::llround(n);
  if (std::abs(n - double(k)) > 1e-9 * n) throw ConfigError("time.T must be an integer multiple of time.dt");
  return int(k);
}

void SolverConfig::validate() const {
  steps();
  if (!(tol_div > 0.0)) throw ConfigError("tolerances.div must be positive");
  if (!(tol_bound > 0.0)) throw ConfigError("tolerances.bound must be positive");
  if (!(tol_poisson > 0.0)) throw ConfigError("tolerances.poisson must be positive");
  if (!(cfl_safety > 0.0)) throw ConfigError("tolerances.cfl_safety must be positive");
  if (max_linear_iterations < 0) throw ConfigError("tolerances.max_linear_iterations must be >= 0");
}

struct Model::Impl {
  Grid grid;
  MaterialLaws laws;
  DiscreteKernel kernel;
  ConvectionOperator convection;
  ViscousOperator viscous;
  PoissonSolver poisson;
  StreamfunctionBasis streamfunction;

  Impl(const Grid& g, MaterialLaws l, DiscreteKernel k)
      : grid(g), laws(std::move(l)), kernel(std::move(k)), convection(g), viscous(g), poisson(g),
        streamfunction(g) {}
};

Model::Model(const Grid& grid, MaterialLaws laws, DiscreteKernel kernel) {
  require_same_grid(grid, kernel.grid(), "Model");
  impl_ = std::make_shared<const Impl>(grid, std::move(laws), std::move(kernel));
}

const Grid& Model::grid() const { return impl_->grid; }
const MaterialLaws& Model::laws() const { return impl_->laws; }
const DiscreteKernel& Model::kernel() const { return impl_->kernel; }
const ConvectionOperator& Model::convection() const { return impl_->convection; }
const ViscousOperator& Model::viscous() const { return impl_->viscous; }
const PoissonSolver& Model::poisson() const { return impl_->poisson; }
const StreamfunctionBasis& Model::streamfunction() const { return impl_->streamfunction; }

ScalarField ch_step(const Model& model, const ScalarField& phi, const VectorField& u, const SolverConfig& cfg) {
  require_same_grid(model.grid(), phi.grid(), "ch_step");
  const double dt = cfg.dt;
  const ChCoefficients c = ch_coefficients(model, phi);
  ScalarField rhs = phi;
  rhs.axpy(-dt, advect_scalar(u, phi, cfg.tol_div));
  rhs.axpy(-dt, divergence(masked(hadamard(c.mobility, c.nonlocal))));
  const SpdSolver solver(diffusion_system(c.diffusivity, dt), cfg.tol_poisson, cfg.max_linear_iterations);
  const Vector x = solver.solve(Eigen::Map<const Vector>(rhs.values().data(), Eigen::Index(rhs.size())));
  ScalarField next(model.grid());
  std::copy(x.begin(), x.end(), next.values().begin());
  if (!all_finite(next)) throw SolverError("ch_step: non-finite phase field");
  const double excess = bound_violation(next);
  if (excess > cfg.tol_bound)
    throw SolverError(fmt::format("ch_step: bound violation, max|phi| - 1 = {:.3e} > {:.1e}", excess, cfg.tol_bound));
  return next;
}

VectorField korteweg_force(const Model& model, const ScalarField& phi) {
  VectorField f = hadamard(center_to_face(conv_scalar(model.kernel(), phi)), gradient(phi));
  f *= -1.0;
  return masked(std::move(f));
}

NsStepResult ns_step(const Model& model, const VectorField& u, const ScalarField& phi_next, const VectorField& v,
                     const SolverConfig& cfg) {
  require_same_grid(model.grid(), u.grid(), "ns_step");
  require_same_grid(model.grid(), v.grid(), "ns_step");
  const double dt = cfg.dt;
  const double cfl = cfl_number(u, dt);
  if (cfl > cfg.cfl_safety)
    throw SolverError(fmt::format("ns_step: CFL violation, |u|dt/h = {:.3e} > {:.3e}", cfl, cfg.cfl_safety));

  VectorField q = u;
  q.axpy(-dt, model.convection().apply(u, u));
  q.axpy(dt, korteweg_force(model, phi_next));
  q.axpy(dt, masked(v));

  const ScalarField nu = cell_law(model.laws(), LawId::viscosity, phi_next);
  const SparseMatrix y = momentum_system(model, nu, dt);
  const StokesSolver stokes(model.streamfunction(), y, cfg.tol_poisson, cfg.max_linear_iterations);
  NsStepResult out;
  out.u = stokes.solve(q);

  // q - Y u+ is a discrete gradient by Galerkin orthogonality; it equals dt grad(pi).
  const VectorField residual = masked(q - unflatten(model.grid(), y * flatten(out.u)));
  out.pi = model.poisson().solve(divergence(residual));
  out.pi *= 1.0 / dt;
  if (!all_finite(out.u)) throw SolverError("ns_step: non-finite velocity");
  return out;
}

Trajectory simulate(const Model& model, const VectorField& u0, const ScalarField& phi0, const ControlField& control,
                    const SolverConfig& cfg) {
  cfg.validate();
  const int n_steps = control.steps();
  if (n_steps != cfg.steps())
    throw ConfigError(fmt::format("simulate: control has {} steps, time grid has {}", n_steps, cfg.steps()));
  require_same_grid(model.grid(), u0.grid(), "simulate");
  require_same_grid(model.grid(), phi0.grid(), "simulate");

  const AdmissibilityReport adm = initial_admissibility(phi0, model.laws());
  if (!adm.admissible)
    throw SolverError("simulate: initial phase field is not admissible" +
                      (adm.messages.empty() ? std::string() : " (" + adm.messages.front() + ")"));
  if (max_abs(divergence(u0)) > cfg.tol_div) throw SolverError("simulate: initial velocity is not divergence free");

  auto traj = std::make_shared<Trajectory>();
  traj->grid = model.grid();
  traj->dt = cfg.dt;
  traj->snapshots.push_back({0.0, masked(u0), phi0, ScalarField(model.grid())});
  for (int n = 0; n < n_steps; ++n) {
    try {
      const StateSnapshot& cur = traj->snapshots.back();
      ScalarField phi = ch_step(model, cur.phi, cur.u, cfg);
      NsStepResult ns = ns_step(model, cur.u, phi, control.values[std::size_t(n)], cfg);
      traj->controls.push_back(control.values[std::size_t(n)]);
      traj->snapshots.push_back({(n + 1) * cfg.dt, std::move(ns.u), std::move(phi), std::move(ns.pi)});
    } catch (const Error& e) {
      throw SimulationAborted(fmt::format("step {}: {}", n, e.what()), n, traj);
    }
  }
  return std::move(*traj);
}

namespace {

double face_sum(const VectorField& a, const VectorField& b, const VectorField& c) {
  const Grid& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) s += xface_weight(g, i) * a.x(i, j) * b.x(i, j) * c.x(i, j);
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) s += yface_weight(g, j) * a.y(i, j) * b.y(i, j) * c.y(i, j);
  return s * g.cell_volume();
}

}  // namespace

EnergyReport energy_report(const Model& model, const Trajectory& traj) {
  EnergyReport rep;
  const auto& snaps = traj.snapshots;
  const MaterialLaws& laws = model.laws();
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    const StateSnapshot& s = snaps[n];
    EnergyTerms e;
    e.t = s.t;
    e.kinetic = 0.5 * dot(s.u, s.u);
    e.phase = 0.5 * dot(s.phi, s.phi);
    const VectorField avg = center_to_face(s.phi);
    const VectorField g = gradient(s.phi);
    e.diffusive_dissipation = face_sum(face_law(laws, LawId::diffusivity, avg), g, g);
    e.viscous_dissipation = model.viscous().dissipation(cell_law(laws, LawId::viscosity, s.phi), s.u);
    e.nonlocal_work = face_sum(face_law(laws, LawId::mobility, avg), conv_grad(model.kernel(), s.phi), g);
    e.korteweg_work = face_sum(center_to_face(conv_scalar(model.kernel(), s.phi)), s.u, g);
    if (!traj.controls.empty()) {
      VectorField v(traj.grid);
      int count = 0;
      if (n > 0) v += traj.controls[n - 1], ++count;
      if (n < traj.controls.size()) v += traj.controls[n], ++count;
      v *= 1.0 / count;
      e.control_work = dot(masked(std::move(v)), s.u);
    }
    rep.steps.push_back(e);
  }
  for (std::size_t n = 1; n + 1 < snaps.size(); ++n) {
    EnergyTerms& e = rep.steps[n];
    const double before = rep.steps[n - 1].kinetic + rep.steps[n - 1].phase;
    const double after = rep.steps[n + 1].kinetic + rep.steps[n + 1].phase;
    e.residual = (after - before) / (2.0 * traj.dt) + e.diffusive_dissipation + e.viscous_dissipation -
                 e.nonlocal_work + e.korteweg_work - e.control_work;
    rep.residual_l1 += std::abs(e.residual) * traj.dt;
  }
  return rep;
}

double mass(const ScalarField& phi) { return mean(phi); }

double bound_violation(const ScalarField& phi) { return std::max(0.0, max_abs(phi) - 1.0); }

}  // namespace nchs
