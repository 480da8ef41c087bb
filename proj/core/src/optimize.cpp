#include "nchs/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nchs/parallel.hpp"

namespace nchs {

GradientEvaluation reduced_gradient(const Problem& problem, const ControlField& v, const CostWeights& weights) {
  GradientEvaluation ev;
  ev.trajectory = problem.solve(v);
  ev.cost = cost(ev.trajectory, v, weights);
  ev.adjoint = solve_adjoint(problem.model, ev.trajectory, weights, problem.cfg);
  ev.gradient = ControlField::zeros(problem.model.grid(), v.steps());
  ev.gradient.lower = v.lower;
  ev.gradient.upper = v.upper;
  for (int n = 0; n < v.steps(); ++n) {
    VectorField& g = ev.gradient.values[std::size_t(n)];
    g = ev.adjoint[std::size_t(n)].p;
    g.axpy(weights.gamma, v.values[std::size_t(n)]);
  }
  return ev;
}

double reduced_cost(const Problem& problem, const ControlField& v, const CostWeights& weights) {
  return cost(problem.solve(v), v, weights).total();
}

ControlField project_box(const ControlField& w) {
  ControlField out = w;
  if (!w.bounded()) return out;
  w.check_bounds();
  for (std::size_t n = 0; n < out.values.size(); ++n) {
    auto clamp = [](std::span<double> v, std::span<const double> lo, std::span<const double> hi) {
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::clamp(v[k], lo[k], hi[k]);
    };
    clamp(out.values[n].xs(), w.lower[n].xs(), w.upper[n].xs());
    clamp(out.values[n].ys(), w.lower[n].ys(), w.upper[n].ys());
  }
  return out;
}

double kkt_residual(const ControlField& v, const ControlField& g, double s, double dt) {
  ControlField trial = v;
  trial.axpy(-s, g);
  ControlField diff = v;
  diff.axpy(-1.0, project_box(trial));
  return norm(diff, dt);
}

double inactive_gradient_max(const ControlField& v, const ControlField& g, double clamp_tol) {
  double worst = 0.0;
  for (std::size_t n = 0; n < v.values.size(); ++n) {
    auto scan = [&](std::span<const double> x, std::span<const double> gx, const VectorField* lo,
                    const VectorField* hi, bool xcomp) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        if (lo) {
          const double l = xcomp ? lo->xs()[k] : lo->ys()[k];
          const double h = xcomp ? hi->xs()[k] : hi->ys()[k];
          if (!(x[k] > l + clamp_tol && x[k] < h - clamp_tol)) continue;
        }
        worst = std::max(worst, std::abs(gx[k]));
      }
    };
    const VectorField* lo = v.bounded() ? &v.lower[n] : nullptr;
    const VectorField* hi = v.bounded() ? &v.upper[n] : nullptr;
    scan(v.values[n].xs(), g.values[n].xs(), lo, hi, true);
    scan(v.values[n].ys(), g.values[n].ys(), lo, hi, false);
  }
  return worst;
}

void OptimizerConfig::validate() const {
  if (max_iterations < 0) throw ConfigError("optimizer.max_iterations must be >= 0");
  if (!(initial_step > 0.0)) throw ConfigError("optimizer.initial_step must be positive");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ConfigError("optimizer.armijo must lie in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("optimizer.backtrack must lie in (0,1)");
  if (!(kkt_tolerance > 0.0)) throw ConfigError("optimizer.kkt_tolerance must be positive");
  if (!(kkt_step > 0.0)) throw ConfigError("optimizer.kkt_step must be positive");
  if (max_trials < 1) throw ConfigError("optimizer.max_trials must be >= 1");
}

std::string to_string(OptimizerStatus s) {
  switch (s) {
    case OptimizerStatus::converged: return "converged";
    case OptimizerStatus::max_iterations: return "max-iterations";
    case OptimizerStatus::line_search_failed: return "line-search-failed";
  }
  return "unknown";
}

OptimizationResult projected_gradient_descent(const Problem& problem, const ControlField& v0,
                                              const CostWeights& weights, const OptimizerConfig& opt) {
  opt.validate();
  const double dt = problem.cfg.dt;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  OptimizationResult res;
  res.v = project_box(v0);
  res.last = reduced_gradient(problem, res.v, weights);
  double kkt = kkt_residual(res.v, res.last.gradient, opt.kkt_step, dt);
  res.history.push_back({0, res.last.cost.total(), res.last.cost, kkt, 0.0, 0, elapsed()});
  if (kkt <= opt.kkt_tolerance) {
    res.status = OptimizerStatus::converged;
    return res;
  }

  double step = opt.initial_step;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double f = res.last.cost.total();
    const ControlField& g = res.last.gradient;
    bool accepted = false;
    int trials = 0;
    ControlField v_new;
    GradientEvaluation ev;
    for (double s = step; trials < opt.max_trials; s *= opt.backtrack) {
      ++trials;
      ControlField trial = res.v;
      trial.axpy(-s, g);
      trial = project_box(trial);
      ControlField d = trial;
      d.axpy(-1.0, res.v);
      const double slope = dot(g, d, dt);
      if (slope >= 0.0) break;  // projected direction is not a descent direction: stationary
      const CostBreakdown c = cost(problem.solve(trial), trial, weights);
      if (c.total() <= f + opt.armijo * slope) {
        v_new = std::move(trial);
        step = s;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = OptimizerStatus::line_search_failed;
      return res;
    }
    ev = reduced_gradient(problem, v_new, weights);
    if (opt.barzilai_borwein) {
      ControlField sv = v_new, yv = ev.gradient;
      sv.axpy(-1.0, res.v);
      yv.axpy(-1.0, res.last.gradient);
      const double sy = dot(sv, yv, dt);
      if (sy > 0.0) step = dot(sv, sv, dt) / sy;
    }
    res.v = std::move(v_new);
    res.last = std::move(ev);
    kkt = kkt_residual(res.v, res.last.gradient, opt.kkt_step, dt);
    res.history.push_back({it, res.last.cost.total(), res.last.cost, kkt, step, trials, elapsed()});
    if (kkt <= opt.kkt_tolerance) {
      res.status = OptimizerStatus::converged;
      return res;
    }
  }
  res.status = OptimizerStatus::max_iterations;
  return res;
}

std::vector<double> fd_gradient(const Problem& problem, const ControlField& v, const CostWeights& weights,
                                const std::vector<ControlField>& directions, double eps) {
  if (!(eps > 0.0)) throw ConfigError("fd_gradient: eps must be positive");
  std::vector<double> out(directions.size());
  parallel_for(int(directions.size()), [&](int k) {
    ControlField plus = v, minus = v;
    plus.axpy(eps, directions[std::size_t(k)]);
    minus.axpy(-eps, directions[std::size_t(k)]);
    out[std::size_t(k)] =
        (reduced_cost(problem, plus, weights) - reduced_cost(problem, minus, weights)) / (2.0 * eps);
  });
  return out;
}

}  // namespace nchs
