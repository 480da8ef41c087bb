#include "nchs/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nchs/error.hpp"
#include "nchs/nonlocal.hpp"

namespace nchs {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void attach_viscosity(MaterialLaws& laws, ViscosityLaw v) {
  const double mid = 0.5 * (v.minus + v.plus);
  const double slope = 0.5 * (v.plus - v.minus);
  laws.viscosity = [=](double s) { return mid + slope * s; };
  laws.viscosity_d1 = [=](double) { return slope; };
  laws.viscosity_d2 = [](double) { return 0.0; };
  laws.nu1 = std::min(v.minus, v.plus);
}

const Law& select(const MaterialLaws& laws, LawId id) {
  switch (id) {
    case LawId::mobility: return laws.mobility;
    case LawId::mobility_d1: return laws.mobility_d1;
    case LawId::mobility_d2: return laws.mobility_d2;
    case LawId::potential: return laws.potential;
    case LawId::potential_d1: return laws.potential_d1;
    case LawId::potential_d2: return laws.potential_d2;
    case LawId::potential_d3: return laws.potential_d3;
    case LawId::diffusivity: return laws.diffusivity;
    case LawId::diffusivity_d1: return laws.diffusivity_d1;
    case LawId::diffusivity_d2: return laws.diffusivity_d2;
    case LawId::kirchhoff: return laws.kirchhoff;
    case LawId::entropy: return laws.entropy;
    case LawId::entropy_d1: return laws.entropy_d1;
    case LawId::viscosity: return laws.viscosity;
    case LawId::viscosity_d1: return laws.viscosity_d1;
    case LawId::viscosity_d2: return laws.viscosity_d2;
  }
  throw SolverError("eval_clamped: unknown law");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = a + (b - a) * k / (n - 1);
  return s;
}

}  // namespace

MaterialLaws builtin_log_mobility(ViscosityLaw viscosity) {
  MaterialLaws l;
  l.name = "log-degenerate";
  l.mobility = [](double s) { return 1.0 - s * s; };
  l.mobility_d1 = [](double s) { return -2.0 * s; };
  l.mobility_d2 = [](double) { return -2.0; };
  l.potential = [](double s) { return xlogx(1.0 + s) + xlogx(1.0 - s); };
  l.potential_d1 = [](double s) { return std::log(1.0 + s) - std::log(1.0 - s); };
  l.potential_d2 = [](double s) { return 2.0 / (1.0 - s * s); };
  l.potential_d3 = [](double s) {
    const double d = 1.0 - s * s;
    return 4.0 * s / (d * d);
  };
  // m F'' = (1 - s^2) * 2 / (1 - s^2) = 2.
  l.diffusivity = [](double) { return 2.0; };
  l.diffusivity_d1 = [](double) { return 0.0; };
  l.diffusivity_d2 = [](double) { return 0.0; };
  l.kirchhoff = [](double s) { return 2.0 * s; };
  // M(s) = s artanh(s) + ln(1 - s^2)/2, which equals F(s)/2 and is finite at +-1.
  l.entropy = [](double s) { return 0.5 * (xlogx(1.0 + s) + xlogx(1.0 - s)); };
  l.entropy_d1 = [](double s) { return std::atanh(s); };
  l.alpha0 = 2.0;
  l.c0 = 2.0;
  attach_viscosity(l, viscosity);
  return l;
}

MaterialLaws constant_mobility_quartic(double c, ViscosityLaw viscosity) {
  if (!(c > 1.0)) throw ConfigError("constant-mobility-quartic: convexity constant must exceed 1");
  MaterialLaws l;
  l.name = "constant-mobility-quartic";
  l.mobility = [](double) { return 1.0; };
  l.mobility_d1 = [](double) { return 0.0; };
  l.mobility_d2 = [](double) { return 0.0; };
  l.potential = [c](double s) { return 0.25 * (s * s - 1.0) * (s * s - 1.0) + 0.5 * c * s * s; };
  l.potential_d1 = [c](double s) { return s * s * s - s + c * s; };
  l.potential_d2 = [c](double s) { return 3.0 * s * s - 1.0 + c; };
  l.potential_d3 = [](double s) { return 6.0 * s; };
  l.diffusivity = [c](double s) { return 3.0 * s * s - 1.0 + c; };
  l.diffusivity_d1 = [](double s) { return 6.0 * s; };
  l.diffusivity_d2 = [](double) { return 6.0; };
  l.kirchhoff = [c](double s) { return s * s * s + (c - 1.0) * s; };
  l.entropy = [](double s) { return 0.5 * s * s; };
  l.entropy_d1 = [](double s) { return s; };
  l.alpha0 = c - 1.0;
  l.c0 = c - 1.0;
  l.violates_degeneracy = true;
  attach_viscosity(l, viscosity);
  return l;
}

std::vector<std::string> builtin_law_names() { return {"log-degenerate", "constant-mobility-quartic"}; }

MaterialLaws laws_by_name(const std::string& name, ViscosityLaw viscosity) {
  if (name == "log-degenerate") return builtin_log_mobility(viscosity);
  if (name == "constant-mobility-quartic") return constant_mobility_quartic(2.0, viscosity);
  std::string valid;
  for (const auto& n : builtin_law_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown material law '" + name + "' (valid: " + valid + ")");
}

bool is_singular(LawId id) {
  switch (id) {
    case LawId::potential:
    case LawId::potential_d1:
    case LawId::potential_d2:
    case LawId::potential_d3:
    case LawId::entropy:
    case LawId::entropy_d1:
      return true;
    default:
      return false;
  }
}

double eval_clamped(const MaterialLaws& laws, LawId id, double s) {
  if (!std::isfinite(s)) throw SolverError("eval_clamped: non-finite argument");
  const Law& f = select(laws, id);
  if (!f) throw SolverError("eval_clamped: law not provided by bundle '" + laws.name + "'");
  const double edge = is_singular(id) ? 1.0 - laws.delta_eval : 1.0;
  return f(std::clamp(s, -edge, edge));
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate(const MaterialLaws& laws, int n_samples, double tail_width) {
  ValidationReport report;
  n_samples = std::max(n_samples, 100);
  if (n_samples % 2 == 0) ++n_samples;  // keep s = 0 on the closed grid
  const double delta = laws.delta_eval;
  const auto closed = linspace(-1.0, 1.0, n_samples);
  const auto open = linspace(-1.0 + delta, 1.0 - delta, n_samples);

  auto missing = [&](const char* name, std::initializer_list<const Law*> needed) {
    for (const Law* f : needed) {
      if (!*f) {
        report.checks.push_back({name, false, 0.0, 0.0, "law not provided"});
        return true;
      }
    }
    return false;
  };

  // H1: m >= 0, m = 0 exactly at +-1, monotone tails.
  if (!missing("H1", {&laws.mobility})) {
    HypothesisCheck c{"H1", true, 0.0, 0.0, ""};
    const double scale = std::max({1.0, std::abs(laws.mobility(0.0))});
    for (double s : {-1.0, 1.0}) {
      const double m = laws.mobility(s);
      if (std::abs(m) > 1e-12 * scale && c.passed) {
        c = {"H1", false, s, m, "m(s)=0 iff s=+-1 violated: m(+-1) != 0"};
      }
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < closed.size(); ++k) {
      const double m = laws.mobility(closed[k]);
      if (m < worst) {
        worst = m;
        if (c.passed) {
          c.worst_sample = closed[k];
          c.worst_value = m;
        }
      }
      if (!(m > 0.0) && c.passed) c = {"H1", false, closed[k], m, "m must be positive on (-1,1)"};
    }
    for (std::size_t k = 1; k < closed.size() && c.passed; ++k) {
      const double a = closed[k - 1], b = closed[k];
      const double ma = laws.mobility(a), mb = laws.mobility(b);
      const double tol = 1e-14 * scale;
      if (b >= 1.0 - tail_width && a >= 1.0 - tail_width && mb > ma + tol)
        c = {"H1", false, b, mb - ma, "m not nonincreasing near +1"};
      if (b <= -1.0 + tail_width && mb < ma - tol)
        c = {"H1", false, b, mb - ma, "m not nondecreasing near -1"};
    }
    report.checks.push_back(c);
  }

  // H3 (blow-up direction of F'' toward the pure phases).
  if (!missing("H3", {&laws.potential_d2})) {
    HypothesisCheck c{"H3", true, 0.0, 0.0, ""};
    for (std::size_t k = 1; k < open.size() && c.passed; ++k) {
      const double a = open[k - 1], b = open[k];
      const double fa = laws.potential_d2(a), fb = laws.potential_d2(b);
      const double tol = 1e-12 * std::max(std::abs(fa), std::abs(fb));
      if (a >= 1.0 - tail_width && fb < fa - tol) c = {"H3", false, b, fb - fa, "F'' decreasing near +1"};
      if (b <= -1.0 + tail_width && fb > fa + tol) c = {"H3", false, b, fb - fa, "F'' increasing near -1"};
    }
    report.checks.push_back(c);
  }

  // H4: F'' >= c0 > 0 on (-1,1).
  if (!missing("H4", {&laws.potential_d2})) {
    HypothesisCheck c{"H4", laws.c0 > 0.0, 0.0, std::numeric_limits<double>::infinity(), ""};
    if (!c.passed) c.message = "c0 must be positive";
    for (double s : open) {
      const double v = laws.potential_d2(s);
      if (v < c.worst_value) {
        c.worst_value = v;
        c.worst_sample = s;
      }
    }
    if (!(c.worst_value >= laws.c0)) {
      c.passed = false;
      c.message = "F''(s) >= c0 violated";
    }
    report.checks.push_back(c);
  }

  // H5: lambda >= alpha0 > 0 on [-1,1].
  if (!missing("H5", {&laws.diffusivity})) {
    HypothesisCheck c{"H5", laws.alpha0 > 0.0, 0.0, std::numeric_limits<double>::infinity(), ""};
    if (!c.passed) c.message = "alpha0 must be positive";
    for (double s : closed) {
      const double v = laws.diffusivity(s);
      if (v < c.worst_value) {
        c.worst_value = v;
        c.worst_sample = s;
      }
    }
    if (!(c.worst_value >= laws.alpha0)) {
      c.passed = false;
      c.message = "lambda(s) >= alpha0 violated";
    }
    report.checks.push_back(c);
  }

  // V: nu >= nu1 > 0 on [-1,1].
  if (!missing("V", {&laws.viscosity})) {
    HypothesisCheck c{"V", laws.nu1 > 0.0, 0.0, std::numeric_limits<double>::infinity(), ""};
    if (!c.passed) c.message = "nu1 must be positive";
    for (double s : closed) {
      const double v = laws.viscosity(s);
      if (v < c.worst_value) {
        c.worst_value = v;
        c.worst_sample = s;
      }
    }
    if (!(c.worst_value >= laws.nu1)) {
      c.passed = false;
      c.message = "nu(s) >= nu1 violated";
    }
    report.checks.push_back(c);
  }

  // lambda = m F'' on the open interval.
  if (!missing("lambda=mF''", {&laws.mobility, &laws.potential_d2, &laws.diffusivity})) {
    HypothesisCheck c{"lambda=mF''", true, 0.0, 0.0, ""};
    for (double s : open) {
      const double lam = laws.diffusivity(s);
      const double err = std::abs(laws.mobility(s) * laws.potential_d2(s) - lam) / std::max(1.0, std::abs(lam));
      if (err > c.worst_value) {
        c.worst_value = err;
        c.worst_sample = s;
      }
    }
    if (c.worst_value > 1e-10) {
      c.passed = false;
      c.message = "m F'' != lambda";
    }
    report.checks.push_back(c);
  }

  // B(0) = 0 and B' = lambda.
  if (!missing("B", {&laws.kirchhoff, &laws.diffusivity})) {
    HypothesisCheck c{"B", true, 0.0, 0.0, ""};
    const double h = 1e-4;
    double lam2 = 0.0;
    if (laws.diffusivity_d2)
      for (double s : closed) lam2 = std::max(lam2, std::abs(laws.diffusivity_d2(s)));
    if (std::abs(laws.kirchhoff(0.0)) > 1e-14) c = {"B", false, 0.0, laws.kirchhoff(0.0), "B(0) != 0"};
    for (double s : linspace(-1.0 + h, 1.0 - h, n_samples)) {
      if (!c.passed) break;
      const double fd = (laws.kirchhoff(s + h) - laws.kirchhoff(s - h)) / (2.0 * h);
      const double err = std::abs(fd - laws.diffusivity(s));
      const double tol = 10.0 * h * h * lam2 + 1e-8 * std::max(1.0, std::abs(laws.kirchhoff(s)));
      if (err > c.worst_value) {
        c.worst_value = err;
        c.worst_sample = s;
      }
      if (err > tol) {
        c.passed = false;
        c.message = "B' != lambda";
      }
    }
    report.checks.push_back(c);
  }

  // M(0) = M'(0) = 0 and m M'' = 1, M'' by differencing M'.
  if (!missing("M", {&laws.entropy, &laws.entropy_d1, &laws.mobility})) {
    HypothesisCheck c{"M", true, 0.0, 0.0, ""};
    if (std::abs(laws.entropy(0.0)) > 1e-14 || std::abs(laws.entropy_d1(0.0)) > 1e-14)
      c = {"M", false, 0.0, laws.entropy(0.0), "M(0) or M'(0) nonzero"};
    const double h = 1e-5;
    for (double s : linspace(-0.99, 0.99, n_samples)) {
      if (!c.passed) break;
      const double m2 = (laws.entropy_d1(s + h) - laws.entropy_d1(s - h)) / (2.0 * h);
      const double err = std::abs(laws.mobility(s) * m2 - 1.0);
      if (err > c.worst_value) {
        c.worst_value = err;
        c.worst_sample = s;
      }
      if (err > 1e-5) {
        c.passed = false;
        c.message = "m M'' != 1";
      }
    }
    report.checks.push_back(c);
  }

  return report;
}

ScalarField chemical_potential(const ScalarField& phi, const DiscreteKernel& kernel, const MaterialLaws& laws) {
  if (!laws.potential_d1) throw SolverError("chemical_potential: F' not provided by bundle '" + laws.name + "'");
  ScalarField mu = conv_scalar(kernel, phi);
  mu *= -1.0;
  for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += eval_clamped(laws, LawId::potential_d1, phi[k]);
  return mu;
}

AdmissibilityReport initial_admissibility(const ScalarField& phi0, const MaterialLaws& laws,
                                          const DiscreteKernel* kernel) {
  AdmissibilityReport r;
  const Grid& g = phi0.grid();
  if (!all_finite(phi0)) {
    r.admissible = false;
    r.messages.push_back("phi0 has non-finite entries");
    return r;
  }
  r.max_abs = max_abs(phi0);
  r.bound_excess = std::max(0.0, r.max_abs - 1.0);
  if (r.bound_excess > 0.0) {
    r.admissible = false;
    r.messages.push_back("bound violation: max|phi0| = " + std::to_string(r.max_abs) + " > 1");
  }

  // Pure-phase cells use the laws' own values at +-1, not the singular clamp.
  if (laws.potential) {
    double s = 0.0;
    for (double v : phi0.values()) s += laws.potential(std::clamp(v, -1.0, 1.0));
    r.potential_integral = s * g.cell_volume();
    if (!std::isfinite(*r.potential_integral)) {
      r.admissible = false;
      r.messages.push_back("F(phi0) not integrable");
    }
  }
  if (laws.entropy) {
    double s = 0.0;
    for (double v : phi0.values()) s += laws.entropy(std::clamp(v, -1.0, 1.0));
    r.entropy_integral = s * g.cell_volume();
    if (!std::isfinite(r.entropy_integral)) {
      r.admissible = false;
      r.messages.push_back("M(phi0) not integrable");
    }
  }

  // The Neumann closure makes the discrete normal derivative of B vanish on the wall, so
  // the compatibility residual reduces to the nonlocal part m(phi0) (grad K * phi0).n.
  if (kernel != nullptr) {
    const VectorField gk = conv_grad(*kernel, phi0);
    double res = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      res = std::max(res, std::abs(eval_clamped(laws, LawId::mobility, phi0(0, j)) * gk.x(0, j)));
      res = std::max(res, std::abs(eval_clamped(laws, LawId::mobility, phi0(g.nx() - 1, j)) * gk.x(g.nx(), j)));
    }
    for (int i = 0; i < g.nx(); ++i) {
      res = std::max(res, std::abs(eval_clamped(laws, LawId::mobility, phi0(i, 0)) * gk.y(i, 0)));
      res = std::max(res, std::abs(eval_clamped(laws, LawId::mobility, phi0(i, g.ny() - 1)) * gk.y(i, g.ny())));
    }
    r.boundary_flux_residual = res;
    if (res > 1e-6) r.messages.push_back("warning: compatibility flux residual " + std::to_string(res));
  }
  return r;
}

}  // namespace nchs
