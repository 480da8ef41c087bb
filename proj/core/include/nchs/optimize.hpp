#pragma once

#include <string>
#include <vector>

#include "nchs/control.hpp"
#include "nchs/cost.hpp"
#include "nchs/forward.hpp"
#include "nchs/sensitivity.hpp"

namespace nchs {

/// One evaluation of the reduced functional f(v) = J(S(v), v) and its gradient.
struct GradientEvaluation {
  CostBreakdown cost;
  ControlField gradient;  ///< gamma v + p, one face field per step
  Trajectory trajectory;
  std::vector<AdjSnapshot> adjoint;
};

GradientEvaluation reduced_gradient(const Problem& problem, const ControlField& v, const CostWeights& weights);
double reduced_cost(const Problem& problem, const ControlField& v, const CostWeights& weights);

/// Componentwise clamp into [lower, upper]; identity for unbounded controls.
ControlField project_box(const ControlField& w);

/// |v - project_box(v - s g)| in L2(Q).
double kkt_residual(const ControlField& v, const ControlField& g, double s, double dt);

/// max |g| over samples whose control lies strictly inside the box by more than clamp_tol.
double inactive_gradient_max(const ControlField& v, const ControlField& g, double clamp_tol);

struct OptimizerConfig {
  int max_iterations = 50;
  double initial_step = 1.0;
  double armijo = 1e-4;       ///< sufficient-decrease slope sigma in (0,1)
  double backtrack = 0.5;     ///< step reduction factor in (0,1)
  double kkt_tolerance = 1e-8;
  double kkt_step = 1.0;      ///< s in the KKT residual
  int max_trials = 30;        ///< backtracking steps allowed per iteration
  bool barzilai_borwein = true;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double f = 0.0;
  CostBreakdown terms;
  double kkt = 0.0;
  double step = 0.0;  ///< accepted step (0 for the initial iterate)
  int trials = 0;
  double wall_time = 0.0;  ///< seconds since start
};

enum class OptimizerStatus { converged, max_iterations, line_search_failed };
std::string to_string(OptimizerStatus s);

struct OptimizationResult {
  ControlField v;
  GradientEvaluation last;  ///< evaluation at v
  std::vector<IterationRecord> history;
  OptimizerStatus status = OptimizerStatus::max_iterations;
};

/// v+ = project_box(v - s grad f(v)) with Armijo backtracking
///   f(v+) <= f(v) + sigma <grad f(v), v+ - v>
/// and a Barzilai-Borwein first trial step. v0 is projected on entry.
OptimizationResult projected_gradient_descent(const Problem& problem, const ControlField& v0,
                                              const CostWeights& weights, const OptimizerConfig& opt);

/// Central differences (f(v + eps h) - f(v - eps h)) / (2 eps), one per direction.
std::vector<double> fd_gradient(const Problem& problem, const ControlField& v, const CostWeights& weights,
                                const std::vector<ControlField>& directions, double eps);

}  // namespace nchs
