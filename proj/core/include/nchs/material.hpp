#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nchs/grid.hpp"

namespace nchs {

class DiscreteKernel;

using Law = std::function<double(double)>;

/// Constitutive bundle: degenerate mobility m, singular potential F, viscosity nu and the
/// derived diffusivity lambda = m F'', Kirchhoff transform B = int_0^s lambda and the
/// entropy function M with m M'' = 1, M(0) = M'(0) = 0.
///
/// Every derivative the tangent and adjoint solvers consume is an explicit member.
/// F and F' are optional (the evolution never needs them).
struct MaterialLaws {
  std::string name;

  Law mobility, mobility_d1, mobility_d2;
  Law potential, potential_d1;  // optional
  Law potential_d2, potential_d3;
  Law diffusivity, diffusivity_d1, diffusivity_d2;
  Law kirchhoff;
  Law entropy, entropy_d1;
  Law viscosity, viscosity_d1, viscosity_d2;

  double alpha0 = 0.0;  ///< lambda >= alpha0
  double c0 = 0.0;      ///< F'' >= c0
  double nu1 = 0.0;     ///< nu >= nu1
  double delta_eval = 1e-9;
  /// Set for bundles known to violate the mobility hypotheses (regression baselines).
  bool violates_degeneracy = false;
};

/// Two-fluid viscosity, linear in the phase field: nu(-1) = minus, nu(1) = plus.
struct ViscosityLaw {
  double minus = 1.0;
  double plus = 1.0;
};

/// m(s) = 1 - s^2 with F(s) = (1+s)ln(1+s) + (1-s)ln(1-s).
MaterialLaws builtin_log_mobility(ViscosityLaw viscosity = {});

/// m = 1, F(s) = (s^2-1)^2/4 + c s^2/2. Non-degenerate baseline; fails H1 by construction.
MaterialLaws constant_mobility_quartic(double c = 2.0, ViscosityLaw viscosity = {});

/// Builtin bundle by config name ("log-degenerate", "constant-mobility-quartic").
MaterialLaws laws_by_name(const std::string& name, ViscosityLaw viscosity = {});
std::vector<std::string> builtin_law_names();

enum class LawId {
  mobility, mobility_d1, mobility_d2,
  potential, potential_d1, potential_d2, potential_d3,
  diffusivity, diffusivity_d1, diffusivity_d2,
  kirchhoff, entropy, entropy_d1,
  viscosity, viscosity_d1, viscosity_d2,
};

/// True for laws that blow up at +-1 and are therefore clamped to [-1+delta, 1-delta].
bool is_singular(LawId id);

/// Evaluates a law at clamp(s, -1, 1), or clamp(s, -1+delta_eval, 1-delta_eval) for the
/// singular ones. Throws SolverError for non-finite s or a law missing from the bundle.
double eval_clamped(const MaterialLaws& laws, LawId id, double s);

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  double worst_sample = 0.0;  ///< s at which the largest violation (or smallest margin) occurred
  double worst_value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
  const HypothesisCheck* find(const std::string& name) const;
};

/// Samples the hypotheses on uniform grids of [-1,1] and (-1+delta, 1-delta).
/// Never throws; n_samples is raised to 100 if smaller.
ValidationReport validate(const MaterialLaws& laws, int n_samples = 1001, double tail_width = 0.1);

/// F'(phi) - K*phi, the nonlocal chemical potential (diagnostic only).
ScalarField chemical_potential(const ScalarField& phi, const DiscreteKernel& kernel,
                               const MaterialLaws& laws);

struct AdmissibilityReport {
  bool admissible = true;
  double max_abs = 0.0;
  double bound_excess = 0.0;         ///< max(|phi0|) - 1, clipped at 0
  std::optional<double> potential_integral;  ///< sum of F(phi0) * cell volume
  double entropy_integral = 0.0;     ///< sum of M(phi0) * cell volume
  double boundary_flux_residual = 0.0;  ///< max |[grad B - m grad K*phi].n| on the wall
  std::vector<std::string> messages;
};

/// Checks |phi0| <= 1, integrability of F(phi0) and M(phi0), and reports the wall flux
/// residual of the compatibility condition (a warning, not a failure).
AdmissibilityReport initial_admissibility(const ScalarField& phi0, const MaterialLaws& laws,
                                          const DiscreteKernel* kernel = nullptr);

}  // namespace nchs
