#include "nchs/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nchs/parallel.hpp"
#include "scheme.hpp"

namespace nchs {

using namespace detail;

namespace {

Vector as_vector(const ScalarField& f) { return Eigen::Map<const Vector>(f.values().data(), Eigen::Index(f.size())); }

ScalarField as_field(const Grid& g, const Vector& x) {
  ScalarField f(g);
  std::copy(x.begin(), x.end(), f.values().begin());
  return f;
}

void check_shapes(const Trajectory& traj, int steps, const char* where) {
  if (traj.snapshots.size() != traj.controls.size() + 1) throw SolverError(std::string(where) + ": malformed trajectory");
  if (steps != traj.steps()) throw SolverError(std::string(where) + ": trajectory/control step count mismatch");
}

// Frozen data of step n -> n+1, shared by the tangent and its transpose.
struct StepData {
  ChCoefficients ch;
  VectorField diffusivity_d1, mobility_d1;
  VectorField grad_next;  // grad phi^{n+1}
  VectorField avg_kernel_next;  // avg(K * phi^{n+1})
  ScalarField viscosity_d1;  // nu'(phi^{n+1})
  SpdSolver diffusion;
  StokesSolver stokes;

  StepData(const Model& model, const StateSnapshot& cur, const StateSnapshot& next, const SolverConfig& cfg)
      : ch(ch_coefficients(model, cur.phi)),
        diffusivity_d1(face_law_derivative(model.laws(), LawId::diffusivity_d1, ch.avg)),
        mobility_d1(face_law_derivative(model.laws(), LawId::mobility_d1, ch.avg)),
        grad_next(gradient(next.phi)),
        avg_kernel_next(center_to_face(conv_scalar(model.kernel(), next.phi))),
        viscosity_d1(cell_law_derivative(model.laws(), LawId::viscosity_d1, next.phi)),
        diffusion(diffusion_system(ch.diffusivity, cfg.dt), cfg.tol_poisson, cfg.max_linear_iterations),
        stokes(model.streamfunction(),
               momentum_system(model, cell_law(model.laws(), LawId::viscosity, next.phi), cfg.dt), cfg.tol_poisson,
               cfg.max_linear_iterations) {}
};

}  // namespace

std::vector<LinSnapshot> solve_linearized(const Model& model, const Trajectory& traj, const ControlField& h,
                                          const SolverConfig& cfg) {
  check_shapes(traj, h.steps(), "solve_linearized");
  const Grid& g = model.grid();
  const double dt = cfg.dt;
  std::vector<LinSnapshot> out;
  out.push_back({traj.snapshots[0].t, VectorField(g), ScalarField(g)});
  for (int n = 0; n < traj.steps(); ++n) {
    const StateSnapshot& cur = traj.snapshots[std::size_t(n)];
    const StateSnapshot& next = traj.snapshots[std::size_t(n) + 1];
    const StepData d(model, cur, next, cfg);
    const VectorField& xi = out.back().xi;
    const ScalarField& eta = out.back().eta;

    // Cahn-Hilliard half step.
    const VectorField eta_avg = center_to_face(eta);
    ScalarField rhs = eta;
    rhs.axpy(-dt, advect_scalar_unchecked(cur.u, eta));
    rhs.axpy(-dt, advect_scalar_unchecked(xi, cur.phi));
    VectorField flux = hadamard(hadamard(d.mobility_d1, eta_avg), d.ch.nonlocal);
    flux += hadamard(d.ch.mobility, conv_grad(model.kernel(), eta));
    flux -= hadamard(hadamard(d.diffusivity_d1, eta_avg), d.grad_next);
    rhs.axpy(-dt, divergence(masked(std::move(flux))));
    ScalarField eta_next = as_field(g, d.diffusion.solve(as_vector(rhs)));

    // Momentum half step.
    VectorField q = xi;
    q.axpy(-dt, model.convection().apply(xi, cur.u));
    q.axpy(-dt, model.convection().apply(cur.u, xi));
    VectorField force = hadamard(center_to_face(conv_scalar(model.kernel(), eta_next)), d.grad_next);
    force += hadamard(d.avg_kernel_next, gradient(eta_next));
    q.axpy(-dt, masked(std::move(force)));
    q.axpy(dt, masked(h.values[std::size_t(n)]));
    q.axpy(dt, model.viscous().apply(hadamard(d.viscosity_d1, eta_next), next.u));
    VectorField xi_next = d.stokes.solve(q);

    out.push_back({next.t, std::move(xi_next), std::move(eta_next)});
  }
  return out;
}

std::vector<AdjSnapshot> solve_adjoint(const Model& model, const Trajectory& traj, const CostSources& src,
                                       const SolverConfig& cfg) {
  const int steps = traj.steps();
  check_shapes(traj, steps, "solve_adjoint");
  if (src.du.size() != traj.snapshots.size() || src.dphi.size() != traj.snapshots.size())
    throw SolverError("solve_adjoint: source count mismatch");
  const Grid& g = model.grid();
  const double dt = cfg.dt;
  std::vector<AdjSnapshot> out(traj.snapshots.size());
  const auto last = std::size_t(steps);
  out[last] = {traj.snapshots[last].t, leray_project(src.du[last], model.poisson()), src.dphi[last]};

  // a_u, a_phi: accumulated sensitivities of J to u^{n+1}, phi^{n+1}.
  VectorField a_u = src.du[last];
  ScalarField a_phi = src.dphi[last];
  for (int n = steps - 1; n >= 0; --n) {
    const StateSnapshot& cur = traj.snapshots[std::size_t(n)];
    const StateSnapshot& next = traj.snapshots[std::size_t(n) + 1];
    const StepData d(model, cur, next, cfg);

    // Transpose of the momentum half step.
    const VectorField s = d.stokes.solve(a_u);
    ScalarField b = a_phi;
    b.axpy(dt, hadamard(d.viscosity_d1, model.viscous().coefficient_transpose(s, next.u)));
    b.axpy(-dt, conv_scalar(model.kernel(), center_to_face_transpose(masked(hadamard(s, d.grad_next)))));
    b.axpy(dt, divergence(masked(hadamard(d.avg_kernel_next, s))));

    // Transpose of the Cahn-Hilliard half step.
    const ScalarField sigma = as_field(g, d.diffusion.solve(as_vector(b)));
    const VectorField gs = gradient(sigma);
    VectorField to_avg = hadamard(cur.u, gs);
    to_avg += hadamard(hadamard(d.mobility_d1, d.ch.nonlocal), gs);
    to_avg -= hadamard(hadamard(d.diffusivity_d1, d.grad_next), gs);
    ScalarField a_phi_prev = sigma;
    a_phi_prev.axpy(dt, center_to_face_transpose(masked(std::move(to_avg))));
    a_phi_prev.axpy(-dt, conv_grad_dot(model.kernel(), masked(hadamard(d.ch.mobility, gs))));
    a_phi_prev += src.dphi[std::size_t(n)];

    VectorField a_u_prev = s;
    a_u_prev.axpy(-dt, model.convection().transpose_first(cur.u, s));
    a_u_prev.axpy(-dt, model.convection().transpose_second(cur.u, s));
    a_u_prev.axpy(dt, masked(hadamard(gs, d.ch.avg)));
    a_u_prev += src.du[std::size_t(n)];

    out[std::size_t(n)] = {cur.t, s, a_phi_prev};
    a_u = std::move(a_u_prev);
    a_phi = std::move(a_phi_prev);
  }
  return out;
}

std::vector<AdjSnapshot> solve_adjoint(const Model& model, const Trajectory& traj, const CostWeights& weights,
                                       const SolverConfig& cfg) {
  return solve_adjoint(model, traj, cost_sources(traj, weights), cfg);
}

double state_norm(const Model& model, const std::vector<VectorField>& du, const std::vector<ScalarField>& dphi,
                  double dt) {
  const Grid& g = model.grid();
  const ScalarField unit_nu(g, 1.0);
  double max_u = 0.0, max_phi = 0.0, grad_u = 0.0, lap_phi = 0.0;
  for (std::size_t n = 0; n < du.size(); ++n) {
    max_u = std::max(max_u, norm(du[n]));
    const double h1 = std::sqrt(dot(dphi[n], dphi[n]) + dot(gradient(dphi[n]), gradient(dphi[n])));
    max_phi = std::max(max_phi, h1);
    // For divergence-free no-slip fields 2|Du|^2 = |grad u|^2.
    grad_u += dt * model.viscous().dissipation(unit_nu, du[n]);
    const ScalarField lap = laplacian_neumann(dphi[n]);
    lap_phi += dt * dot(lap, lap);
  }
  return max_u + max_phi + std::sqrt(std::max(grad_u, 0.0)) + std::sqrt(lap_phi);
}

double trajectory_distance(const Model& model, const Trajectory& a, const Trajectory& b) {
  if (a.snapshots.size() != b.snapshots.size()) throw SolverError("trajectory_distance: length mismatch");
  std::vector<VectorField> du;
  std::vector<ScalarField> dphi;
  for (std::size_t n = 0; n < a.snapshots.size(); ++n) {
    du.push_back(a.snapshots[n].u - b.snapshots[n].u);
    dphi.push_back(a.snapshots[n].phi - b.snapshots[n].phi);
  }
  return state_norm(model, du, dphi, a.dt);
}

TaylorReport taylor_check(const Problem& problem, const ControlField& v, const ControlField& h,
                          const std::vector<double>& eps_list) {
  for (std::size_t k = 1; k < eps_list.size(); ++k)
    if (!(eps_list[k] < eps_list[k - 1])) throw ConfigError("taylor_check: eps list must be decreasing");
  const Trajectory base = problem.solve(v);
  const auto lin = solve_linearized(problem.model, base, h, problem.cfg);
  TaylorReport rep;
  rep.rows.resize(eps_list.size());
  parallel_for(int(eps_list.size()), [&](int k) {
    const double eps = eps_list[std::size_t(k)];
    ControlField vp = v;
    vp.axpy(eps, h);
    const Trajectory pert = problem.solve(vp);
    std::vector<VectorField> du;
    std::vector<ScalarField> dphi;
    for (std::size_t n = 0; n < base.snapshots.size(); ++n) {
      VectorField a = pert.snapshots[n].u - base.snapshots[n].u;
      a.axpy(-eps, lin[n].xi);
      ScalarField b = pert.snapshots[n].phi - base.snapshots[n].phi;
      b.axpy(-eps, lin[n].eta);
      du.push_back(std::move(a));
      dphi.push_back(std::move(b));
    }
    rep.rows[std::size_t(k)] = {eps, state_norm(problem.model, du, dphi, problem.cfg.dt) / eps};
  });
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    if (!(rep.rows[k].remainder < rep.rows[k - 1].remainder) &&
        !(rep.rows[k].remainder == 0.0 && rep.rows[k - 1].remainder == 0.0))
      rep.monotone = false;
  return rep;
}

double lipschitz_probe(const Problem& problem, const ControlField& v1, const ControlField& v2) {
  ControlField diff = v2;
  diff.axpy(-1.0, v1);
  const double denom = norm(diff, problem.cfg.dt);
  if (denom == 0.0) return 0.0;
  return trajectory_distance(problem.model, problem.solve(v2), problem.solve(v1)) / denom;
}

ControlField random_control(const Grid& grid, int steps, double dt, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double pi = std::numbers::pi;
  ControlField c = ControlField::zeros(grid, steps);
  constexpr int modes = 3;
  for (auto& v : c.values) {
    double ax[modes][modes], ay[modes][modes];
    for (auto& row : ax)
      for (double& a : row) a = normal(rng);
    for (auto& row : ay)
      for (double& a : row) a = normal(rng);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i <= grid.nx(); ++i) {
        const double x = i * grid.hx() / grid.lx(), y = grid.yc(j) / grid.ly();
        double s = 0.0;
        for (int k = 0; k < modes; ++k)
          for (int l = 0; l < modes; ++l) s += ax[k][l] * std::sin((k + 1) * pi * x) * std::sin((l + 1) * pi * y);
        v.x(i, j) = s;
      }
    for (int j = 0; j <= grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const double x = grid.xc(i) / grid.lx(), y = j * grid.hy() / grid.ly();
        double s = 0.0;
        for (int k = 0; k < modes; ++k)
          for (int l = 0; l < modes; ++l) s += ay[k][l] * std::sin((k + 1) * pi * x) * std::sin((l + 1) * pi * y);
        v.y(i, j) = s;
      }
  }
  const double nrm = norm(c, dt);
  if (nrm > 0.0) c *= radius / nrm;
  return c;
}

LipschitzEnsemble lipschitz_ensemble(const Problem& problem, int pairs, double radius, std::uint64_t seed) {
  const Grid& g = problem.model.grid();
  const int steps = problem.steps();
  LipschitzEnsemble ens;
  ens.ratios.resize(std::size_t(std::max(pairs, 0)));
  parallel_for(pairs, [&](int k) {
    // Both members lie inside the ball: radii drawn in (0.2, 1) * radius.
    std::mt19937_64 rng(seed + 7919u * std::uint64_t(k));
    std::uniform_real_distribution<double> frac(0.2, 1.0);
    const ControlField v1 = random_control(g, steps, problem.cfg.dt, frac(rng) * radius, rng());
    const ControlField v2 = random_control(g, steps, problem.cfg.dt, frac(rng) * radius, rng());
    ens.ratios[std::size_t(k)] = lipschitz_probe(problem, v1, v2);
  });
  if (!ens.ratios.empty()) {
    const auto [lo, hi] = std::minmax_element(ens.ratios.begin(), ens.ratios.end());
    ens.max_over_min = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  }
  return ens;
}

}  // namespace nchs
