#include <doctest.h>

#include "nchs/cost.hpp"
#include "nchs/initial.hpp"
#include "nchs/sensitivity.hpp"
#include "support.hpp"

using namespace nchs;
using namespace nchs::test;

namespace {

Problem small_problem(int n, int steps, double dt = 1e-3, double amplitude = 50.0) {
  Grid g(n, n, 1.0, 1.0);
  Kernel k;
  k.amplitude = amplitude;
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.T = dt * steps;
  return Problem{Model(g, builtin_log_mobility({0.5, 1.5}), DiscreteKernel::build(k, g)), vortex(g, 0.05), stripe(g), cfg};
}

CostWeights random_weights(const Problem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Grid& g = p.model.grid();
  CostWeights w;
  w.beta1 = 1.0, w.beta2 = 2.0, w.beta3 = 0.5, w.beta4 = 0.7, w.gamma = 1e-2;
  for (int n = 0; n <= p.steps(); ++n) {
    w.u_Q.push_back(random_solenoidal(g, rng));
    w.phi_Q.push_back(random_scalar(g, rng, 0.5));
  }
  w.u_Omega = random_solenoidal(g, rng);
  w.phi_Omega = random_scalar(g, rng, 0.5);
  return w;
}

double pairing(const std::vector<LinSnapshot>& lin, const CostSources& src) {
  double s = 0.0;
  for (std::size_t n = 0; n < lin.size(); ++n) s += dot(src.du[n], lin[n].xi) + dot(src.dphi[n], lin[n].eta);
  return s;
}

}  // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("linearized response is linear in the direction") {
  const Problem p = small_problem(8, 4);
  const ControlField v = random_control(p.model.grid(), 4, p.cfg.dt, 0.5, 1);
  const ControlField h = random_control(p.model.grid(), 4, p.cfg.dt, 1.0, 2);
  const Trajectory tr = p.solve(v);
  const auto a = solve_linearized(p.model, tr, h, p.cfg);
  ControlField h2 = h;
  h2 *= -2.5;
  const auto b = solve_linearized(p.model, tr, h2, p.cfg);
  const auto z = solve_linearized(p.model, tr, ControlField::zeros(p.model.grid(), 4), p.cfg);
  for (std::size_t n = 0; n < a.size(); ++n) {
    CHECK(max_diff(b[n].eta, -2.5 * a[n].eta) < 1e-13 * std::max(1.0, max_abs(b[n].eta)));
    CHECK(max_diff(b[n].xi, -2.5 * a[n].xi) < 1e-13 * std::max(1.0, max_abs(b[n].xi)));
    CHECK(max_abs(z[n].eta) == 0.0);
    CHECK(max_abs(z[n].xi) == 0.0);
  }
  CHECK(max_abs(a[0].xi) == 0.0);
  CHECK(max_abs(a.back().xi) > 0.0);
}

TEST_CASE("adjoint is the transpose of the linearization") {
  const Problem p = small_problem(8, 5);
  const Grid& g = p.model.grid();
  const ControlField v = random_control(g, 5, p.cfg.dt, 0.5, 3);
  const Trajectory tr = p.solve(v);
  const CostSources src = cost_sources(tr, random_weights(p, 4));
  const auto adj = solve_adjoint(p.model, tr, src, p.cfg);
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const ControlField h = random_control(g, 5, p.cfg.dt, 1.0, seed);
    const double lhs = pairing(solve_linearized(p.model, tr, h, p.cfg), src);
    double rhs = 0.0;
    for (int n = 0; n < 5; ++n) rhs += p.cfg.dt * dot(adj[n].p, h.values[n]);
    CHECK(rel(lhs, rhs) < 1e-9);
  }
  for (int n = 0; n < 5; ++n) CHECK(max_abs(divergence(adj[n].p)) < 1e-10);
}

TEST_CASE("adjoint against a dense Jacobian on a 4x4 grid") {
  // Assemble J column by column from unit controls and compare J^T s with the adjoint.
  // A weak kernel: at 4^2 the strong one pushes the stripe out of [-1, 1].
  const Problem p = small_problem(4, 3, 1e-3, 2.0);
  const Grid& g = p.model.grid();
  const Trajectory tr = p.solve(random_control(g, 3, p.cfg.dt, 0.3, 8));
  const CostSources src = cost_sources(tr, random_weights(p, 9));
  const auto adj = solve_adjoint(p.model, tr, src, p.cfg);
  double worst = 0.0, scale = 0.0;
  for (int n = 0; n < 3; ++n) {
    ControlField e = ControlField::zeros(g, 3);
    const std::size_t nxf = g.xface_count(), nyf = g.yface_count();
    for (std::size_t f = 0; f < nxf + nyf; ++f) {
      auto& slot = f < nxf ? e.values[n].xs()[f] : e.values[n].ys()[f - nxf];
      slot = 1.0;
      const double col = pairing(solve_linearized(p.model, tr, e, p.cfg), src);
      slot = 0.0;
      const double w = (f < nxf ? xface_weight(g, int(f % (g.nx() + 1))) : yface_weight(g, int((f - nxf) / g.nx())));
      const double pv = f < nxf ? adj[n].p.xs()[f] : adj[n].p.ys()[f - nxf];
      const double from_adjoint = p.cfg.dt * w * g.cell_volume() * pv;
      worst = std::max(worst, std::abs(col - from_adjoint));
      scale = std::max(scale, std::abs(col));
    }
  }
  CHECK(scale > 0.0);
  CHECK(worst < 1e-9 * scale);
}

TEST_CASE("terminal adjoint data") {
  const Problem p = small_problem(8, 3);
  const Trajectory tr = p.solve(ControlField::zeros(p.model.grid(), 3));
  const CostWeights w = random_weights(p, 10);
  const CostSources src = cost_sources(tr, w);
  const auto adj = solve_adjoint(p.model, tr, w, p.cfg);
  REQUIRE(adj.size() == 4);
  CHECK(max_diff(adj[3].q, src.dphi[3]) == 0.0);
  CHECK(max_diff(adj[3].p, leray_project(src.du[3])) < 1e-14);
}

TEST_CASE("Taylor remainders shrink with eps") {
  const Problem p = small_problem(8, 5);
  const Grid& g = p.model.grid();
  const TaylorReport rep = taylor_check(p, random_control(g, 5, p.cfg.dt, 0.5, 11),
                                        random_control(g, 5, p.cfg.dt, 1.0, 12), {1e-2, 1e-3, 1e-4});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.monotone);
  CHECK(rep.rows[2].remainder <= 0.2 * rep.rows[0].remainder);
}

TEST_CASE("random controls") {
  Grid g(8, 8, 1.0, 1.0);
  const ControlField a = random_control(g, 4, 0.01, 0.7, 3);
  CHECK(norm(a, 0.01) == doctest::Approx(0.7).epsilon(1e-12));
  const ControlField b = random_control(g, 4, 0.01, 0.7, 3);
  for (int n = 0; n < 4; ++n) CHECK(a.values[n] == b.values[n]);
  const ControlField c = random_control(g, 4, 0.01, 0.7, 4);
  CHECK_FALSE(a.values[0] == c.values[0]);
}

TEST_CASE("Lipschitz probe") {
  const Problem p = small_problem(8, 4);
  const Grid& g = p.model.grid();
  const ControlField v = random_control(g, 4, p.cfg.dt, 0.5, 13);
  CHECK(lipschitz_probe(p, v, v) == 0.0);
  CHECK(lipschitz_probe(p, v, random_control(g, 4, p.cfg.dt, 0.5, 14)) > 0.0);
  const LipschitzEnsemble ens = lipschitz_ensemble(p, 4, 1.0, 15);
  CHECK(ens.ratios.size() == 4);
  CHECK(ens.max_over_min >= 1.0);
}

TEST_CASE("state norm of a zero perturbation") {
  const Problem p = small_problem(6, 2);
  const Grid& g = p.model.grid();
  std::vector<VectorField> du(3, VectorField(g));
  std::vector<ScalarField> dphi(3, ScalarField(g));
  CHECK(state_norm(p.model, du, dphi, p.cfg.dt) == 0.0);
  dphi[1] = ScalarField(g, 1.0);
  // Constant phase perturbation: H1 norm equals the L2 norm of 1 over the unit square.
  CHECK(state_norm(p.model, du, dphi, p.cfg.dt) == doctest::Approx(1.0));
}

}

TEST_SUITE("cost") {

TEST_CASE("control cost closed form") {
  const Problem p = small_problem(8, 4, 0.01);
  const Grid& g = p.model.grid();
  const Trajectory tr = p.solve(ControlField::zeros(g, 4));
  ControlField one = ControlField::zeros(g, 4);
  for (auto& f : one.values) f = VectorField(g, 1.0);
  CostWeights w;
  w.gamma = 1.0;
  // gamma/2 * T * (|1|^2 on x faces + |1|^2 on y faces) = T * lx * ly.
  CHECK(cost(tr, one, w).control == doctest::Approx(p.cfg.T * g.area()).epsilon(1e-14));
  CHECK(cost(tr, one, w).total() == cost(tr, one, w).control);
}

TEST_CASE("tracking terms use the trapezoid rule in time") {
  Grid g(6, 6, 1.0, 1.0);
  Kernel k;
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 0.3;
  const Problem p{Model(g, builtin_log_mobility(), DiscreteKernel::build(k, g)), VectorField(g), pure_phase(g, 1.0), cfg};
  const Trajectory tr = p.solve(ControlField::zeros(g, 3));
  CostWeights w;
  w.beta2 = 2.0, w.beta4 = 4.0;
  w.phi_Q.assign(4, ScalarField(g));
  w.phi_Omega = ScalarField(g, 0.5);
  const CostBreakdown c = cost(tr, ControlField::zeros(g, 3), w);
  CHECK(c.phase_tracking == doctest::Approx(0.5 * 2.0 * cfg.T).epsilon(1e-14));
  CHECK(c.terminal_phase == doctest::Approx(0.5 * 4.0 * 0.25).epsilon(1e-14));
  CHECK(c.velocity_tracking == 0.0);
}

TEST_CASE("weight validation") {
  Grid g(6, 6, 1.0, 1.0);
  CostWeights w;
  CHECK_THROWS_AS(w.validate(g, 3), ConfigError);
  w.beta2 = 1.0;
  CHECK_THROWS_AS(w.validate(g, 3), ConfigError);
  w.phi_Q.assign(4, ScalarField(g));
  CHECK_NOTHROW(w.validate(g, 3));
  w.gamma = -1.0;
  CHECK_THROWS_AS(w.validate(g, 3), ConfigError);
}

TEST_CASE("cost sources are the state gradient of the cost") {
  const Problem p = small_problem(6, 3);
  const Grid& g = p.model.grid();
  const CostWeights w = random_weights(p, 20);
  const ControlField v = ControlField::zeros(g, 3);
  const Trajectory tr = p.solve(v);
  const CostSources src = cost_sources(tr, w);
  std::mt19937_64 rng(21);
  Trajectory moved = tr;
  std::vector<ScalarField> dphi;
  std::vector<VectorField> du;
  const double eps = 1e-6;
  for (std::size_t n = 0; n < moved.snapshots.size(); ++n) {
    dphi.push_back(random_scalar(g, rng));
    du.push_back(random_vector(g, rng));
  }
  double lin = 0.0;
  for (std::size_t n = 0; n < moved.snapshots.size(); ++n) {
    lin += dot(src.du[n], du[n]) + dot(src.dphi[n], dphi[n]);
    moved.snapshots[n].phi.axpy(eps, dphi[n]);
    moved.snapshots[n].u.axpy(eps, du[n]);
  }
  Trajectory back = tr;
  for (std::size_t n = 0; n < back.snapshots.size(); ++n) {
    back.snapshots[n].phi.axpy(-eps, dphi[n]);
    back.snapshots[n].u.axpy(-eps, du[n]);
  }
  const double fd = (cost(moved, v, w).total() - cost(back, v, w).total()) / (2 * eps);
  CHECK(rel(fd, lin) < 1e-7);
}

}
