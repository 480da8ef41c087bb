#include <doctest.h>

#include "nchs/initial.hpp"
#include "nchs/optimize.hpp"
#include "support.hpp"

using namespace nchs;
using namespace nchs::test;

namespace {

Problem problem(int n, int steps, double dt) {
  Grid g(n, n, 1.0, 1.0);
  Kernel k;
  k.amplitude = 50.0;
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.T = dt * steps;
  return Problem{Model(g, builtin_log_mobility({0.1, 0.1}), DiscreteKernel::build(k, g)), VectorField(g), stripe(g), cfg};
}

ControlField random_box(const Grid& g, int steps, std::mt19937_64& rng, double lo, double hi) {
  ControlField v = ControlField::zeros(g, steps);
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& f : v.values) {
    for (auto& x : f.xs()) x = d(rng);
    for (auto& x : f.ys()) x = d(rng);
  }
  return v;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("box projection clamps, is idempotent and nonexpansive") {
  std::mt19937_64 rng(1);
  Grid g(6, 6, 1.0, 1.0);
  ControlField w = random_box(g, 3, rng, -3.0, 3.0);
  w.set_box(-1.0, 0.5);
  const ControlField p = project_box(w);
  for (const auto& f : p.values) {
    for (double x : f.xs()) CHECK((x >= -1.0 && x <= 0.5));
    for (double x : f.ys()) CHECK((x >= -1.0 && x <= 0.5));
  }
  const ControlField pp = project_box(p);
  for (int n = 0; n < 3; ++n) CHECK(pp.values[n] == p.values[n]);
  ControlField inside = random_box(g, 3, rng, -0.9, 0.4);
  inside.set_box(-1.0, 0.5);
  const ControlField pi = project_box(inside);
  for (int n = 0; n < 3; ++n) CHECK(pi.values[n] == inside.values[n]);
  for (int t = 0; t < 10; ++t) {
    ControlField a = random_box(g, 3, rng, -3.0, 3.0), b = random_box(g, 3, rng, -3.0, 3.0);
    a.set_box(-1.0, 0.5);
    b.set_box(-1.0, 0.5);
    ControlField pa = project_box(a), d = project_box(b);
    d.axpy(-1.0, pa);
    ControlField raw = b;
    raw.axpy(-1.0, a);
    CHECK(norm(d, 0.1) <= norm(raw, 0.1) + 1e-15);
  }
  CHECK_THROWS_AS(w.set_box(1.0, 0.0), ConfigError);
}

TEST_CASE("KKT residual trivial cases") {
  Grid g(5, 5, 1.0, 1.0);
  ControlField v = ControlField::zeros(g, 2);
  v.set_box(-1.0, 1.0);
  CHECK(kkt_residual(v, ControlField::zeros(g, 2), 1.0, 0.1) == 0.0);
  // At the upper bound with the gradient pushing outward.
  for (auto& f : v.values) f = VectorField(g, 1.0);
  ControlField gneg = ControlField::zeros(g, 2);
  for (auto& f : gneg.values) f = VectorField(g, -2.0);
  CHECK(kkt_residual(v, gneg, 1.0, 0.1) == 0.0);
  CHECK(kkt_residual(v, gneg, 1.0, 0.1) == kkt_residual(v, gneg, 0.3, 0.1));
}

TEST_CASE("KKT residual vanishes exactly when no feasible direction violates the inequality") {
  std::mt19937_64 rng(2);
  Grid g(5, 5, 1.0, 1.0);
  const double dt = 0.1;
  // v sits at the bounds on some samples; g is built to satisfy the variational inequality.
  ControlField v = random_box(g, 2, rng, -1.0, 1.0);
  v.set_box(-1.0, 1.0);
  ControlField gr = ControlField::zeros(g, 2);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> mag(0.1, 1.0);
  for (std::size_t n = 0; n < 2; ++n)
    for (int comp = 0; comp < 2; ++comp) {
      auto vs = comp ? v.values[n].ys() : v.values[n].xs();
      auto gs = comp ? gr.values[n].ys() : gr.values[n].xs();
      for (std::size_t k = 0; k < vs.size(); ++k) {
        const int c = pick(rng);
        if (c == 0) vs[k] = 1.0, gs[k] = -mag(rng);
        if (c == 1) vs[k] = -1.0, gs[k] = mag(rng);
        if (c == 2) gs[k] = 0.0;
      }
    }
  auto violating = [&](const ControlField& grad) {
    for (int t = 0; t < 1000; ++t) {
      // Move a few samples only: a full random w is dominated by the satisfied samples.
      ControlField w = ControlField::zeros(g, 2);
      for (int m = 0; m < 3; ++m) {
        const std::size_t n = std::size_t(rng() % 2);
        auto xs = w.values[n].xs();
        auto vx = v.values[n].xs();
        const std::size_t k = std::size_t(rng() % xs.size());
        xs[k] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng) - vx[k];
      }
      if (dot(grad, w, dt) < -1e-14) return true;
    }
    return false;
  };
  CHECK(kkt_residual(v, gr, 1.0, dt) < 1e-15);
  CHECK_FALSE(violating(gr));
  // Flip one active sample to push inward: the residual and the oracle both detect it.
  ControlField bad = gr;
  for (std::size_t k = 0; k < v.values[0].xs().size(); ++k)
    if (v.values[0].xs()[k] == 1.0) {
      bad.values[0].xs()[k] = 0.5;
      break;
    }
  CHECK(kkt_residual(v, bad, 1.0, dt) > 1e-3);
  CHECK(violating(bad));
}

TEST_CASE("pure control cost converges immediately or to zero") {
  const Problem p = problem(8, 3, 1e-3);
  const Grid& g = p.model.grid();
  CostWeights w;
  w.gamma = 1.0;
  OptimizerConfig opt;
  opt.kkt_tolerance = 1e-12;
  ControlField v0 = ControlField::zeros(g, 3);
  v0.set_box(-1.0, 1.0);
  const OptimizationResult at_opt = projected_gradient_descent(p, v0, w, opt);
  CHECK(at_opt.status == OptimizerStatus::converged);
  CHECK(at_opt.history.size() == 1);
  CHECK(at_opt.history[0].iteration == 0);

  std::mt19937_64 rng(3);
  ControlField v1 = random_box(g, 3, rng, -2.0, 2.0);
  v1.set_box(-1.0, 1.0);
  const OptimizationResult r = projected_gradient_descent(p, v1, w, opt);
  CHECK(r.status == OptimizerStatus::converged);
  CHECK(r.history.back().f < 1e-20);
  for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].f < r.history[k - 1].f);
}

TEST_CASE("finite differences are exact for a quadratic cost") {
  const Problem p = problem(6, 3, 1e-3);
  const Grid& g = p.model.grid();
  CostWeights w;
  w.gamma = 0.3;
  const ControlField v = random_control(g, 3, p.cfg.dt, 1.0, 4);
  const ControlField h = random_control(g, 3, p.cfg.dt, 1.0, 5);
  const std::vector<double> fd = fd_gradient(p, v, w, {h}, 1e-3);
  CHECK(fd[0] == doctest::Approx(0.3 * dot(v, h, p.cfg.dt)).epsilon(1e-10));
}

TEST_CASE("adjoint gradient matches finite differences") {
  const Problem p = problem(8, 5, 1e-3);
  const Grid& g = p.model.grid();
  std::mt19937_64 rng(6);
  CostWeights w;
  w.beta1 = 1.0, w.beta2 = 1.0, w.beta3 = 1.0, w.beta4 = 1.0, w.gamma = 1e-2;
  for (int n = 0; n <= 5; ++n) {
    w.u_Q.push_back(random_solenoidal(g, rng));
    w.phi_Q.push_back(random_scalar(g, rng, 0.5));
  }
  w.u_Omega = random_solenoidal(g, rng);
  w.phi_Omega = random_scalar(g, rng, 0.5);
  const ControlField v = random_control(g, 5, p.cfg.dt, 0.5, 7);
  const GradientEvaluation ev = reduced_gradient(p, v, w);
  CHECK(ev.cost.total() == doctest::Approx(reduced_cost(p, v, w)).epsilon(1e-15));
  std::vector<ControlField> dirs;
  for (std::uint64_t s = 0; s < 5; ++s) dirs.push_back(random_control(g, 5, p.cfg.dt, 1.0, 100 + s));
  const std::vector<double> fd = fd_gradient(p, v, w, dirs, 1e-5);
  for (std::size_t k = 0; k < dirs.size(); ++k) CHECK(rel(fd[k], dot(ev.gradient, dirs[k], p.cfg.dt)) <= 1e-6);
}

TEST_CASE("projected gradient descends monotonically on a tracking problem") {
  const Problem p = problem(8, 5, 0.05);
  const Grid& g = p.model.grid();
  ControlField ref = random_control(g, 5, p.cfg.dt, 1.0, 8);
  const Trajectory target = p.solve(ref);
  CostWeights w;
  w.beta1 = 10.0, w.beta2 = 1.0, w.gamma = 1e-2;
  for (const auto& s : target.snapshots) {
    w.u_Q.push_back(s.u);
    w.phi_Q.push_back(s.phi);
  }
  ControlField v0 = ControlField::zeros(g, 5);
  v0.set_box(-1.0, 1.0);
  OptimizerConfig opt;
  opt.max_iterations = 8;
  const OptimizationResult r = projected_gradient_descent(p, v0, w, opt);
  REQUIRE(r.history.size() >= 2);
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    CHECK(r.history[k].f < r.history[k - 1].f);
    CHECK(r.history[k].step > 0.0);
  }
  CHECK(r.history.back().f < 0.5 * r.history.front().f);
  CHECK(r.history.back().f == doctest::Approx(r.last.cost.total()).epsilon(1e-15));
  CHECK(to_string(r.status).size() > 0);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig o;
  CHECK_NOTHROW(o.validate());
  o.armijo = 1.5;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.backtrack = 0.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
}

TEST_CASE("inactive gradient ignores clamped samples") {
  Grid g(4, 4, 1.0, 1.0);
  ControlField v = ControlField::zeros(g, 1);
  v.set_box(-1.0, 1.0);
  ControlField gr = ControlField::zeros(g, 1);
  v.values[0].xs()[3] = 1.0;
  gr.values[0].xs()[3] = -5.0;
  gr.values[0].ys()[2] = 0.25;
  CHECK(inactive_gradient_max(v, gr, 1e-6) == 0.25);
}

}
