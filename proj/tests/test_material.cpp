#include <doctest.h>

#include <cmath>
#include <limits>

#include "nchs/error.hpp"
#include "nchs/material.hpp"
#include "nchs/nonlocal.hpp"
#include "support.hpp"

using namespace nchs;

TEST_SUITE("material") {

TEST_CASE("log-degenerate pair closed forms") {
  const MaterialLaws l = builtin_log_mobility();
  CHECK(l.mobility(0.0) == 1.0);
  CHECK(l.mobility(1.0) == 0.0);
  CHECK(l.mobility(-1.0) == 0.0);
  // lambda = (1 - s^2) * 2 / (1 - s^2) = 2, so B(s) = 2 s.
  CHECK(l.diffusivity(0.3) == doctest::Approx(2.0));
  CHECK(l.kirchhoff(0.5) == doctest::Approx(1.0));
  CHECK(l.potential_d2(0.5) == doctest::Approx(2.0 / 0.75));
  CHECK(l.entropy(0.0) == 0.0);
  CHECK(l.entropy_d1(0.0) == 0.0);
  // M(s) = ((1+s) ln(1+s) + (1-s) ln(1-s)) / 2 solves (1 - s^2) M'' = 1 with M(0) = M'(0) = 0.
  for (double s : {-0.9, -0.4, 0.25, 0.7}) {
    const double m = 0.5 * ((1 + s) * std::log1p(s) + (1 - s) * std::log1p(-s));
    CHECK(l.entropy(s) == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("derivative members agree with finite differences") {
  const MaterialLaws l = builtin_log_mobility({0.5, 2.0});
  const double h = 1e-6;
  auto fd = [&](const Law& f, double s) { return (f(s + h) - f(s - h)) / (2 * h); };
  for (double s : {-0.6, 0.1, 0.8}) {
    CHECK(l.mobility_d1(s) == doctest::Approx(fd(l.mobility, s)).epsilon(1e-7));
    CHECK(l.mobility_d2(s) == doctest::Approx(fd(l.mobility_d1, s)).epsilon(1e-7));
    CHECK(l.potential_d3(s) == doctest::Approx(fd(l.potential_d2, s)).epsilon(1e-6));
    CHECK(l.viscosity_d1(s) == doctest::Approx(fd(l.viscosity, s)).epsilon(1e-7));
    CHECK(l.entropy_d1(s) == doctest::Approx(fd(l.entropy, s)).epsilon(1e-7));
  }
  CHECK(l.viscosity(-1.0) == doctest::Approx(0.5));
  CHECK(l.viscosity(1.0) == doctest::Approx(2.0));
}

TEST_CASE("builtin pair passes every hypothesis") {
  const ValidationReport rep = validate(builtin_log_mobility());
  CHECK(rep.all_passed());
  for (const char* name : {"H1", "H3", "H4", "H5", "V"}) CHECK(rep.find(name) != nullptr);
}

TEST_CASE("constant mobility fails the degeneracy hypothesis") {
  const MaterialLaws l = constant_mobility_quartic();
  CHECK(l.violates_degeneracy);
  const ValidationReport rep = validate(l);
  CHECK_FALSE(rep.all_passed());
  REQUIRE(rep.find("H1") != nullptr);
  CHECK_FALSE(rep.find("H1")->passed);
}

TEST_CASE("diffusivity vanishing at the origin fails the lower bound") {
  MaterialLaws l = builtin_log_mobility();
  l.diffusivity = [](double s) { return s * s; };
  l.alpha0 = 0.0;
  const ValidationReport rep = validate(l);
  const HypothesisCheck* h5 = rep.find("H5");
  REQUIRE(h5 != nullptr);
  CHECK_FALSE(h5->passed);
  CHECK(std::abs(h5->worst_sample) < 1e-2);
}

TEST_CASE("eval_clamped keeps singular laws finite") {
  const MaterialLaws l = builtin_log_mobility();
  CHECK(eval_clamped(l, LawId::mobility, 1.5) == 0.0);
  CHECK(eval_clamped(l, LawId::mobility, -3.0) == 0.0);
  const double f2 = eval_clamped(l, LawId::potential_d2, 1.0);
  CHECK(std::isfinite(f2));
  CHECK(f2 == doctest::Approx(l.potential_d2(1.0 - l.delta_eval)));
  CHECK(is_singular(LawId::potential_d2));
  CHECK_FALSE(is_singular(LawId::mobility));
  CHECK_THROWS_AS(eval_clamped(l, LawId::mobility, std::nan("")), SolverError);
  CHECK_THROWS_AS(eval_clamped(l, LawId::potential_d1, std::numeric_limits<double>::infinity()), SolverError);
}

TEST_CASE("laws by name") {
  CHECK(laws_by_name("log-degenerate").name == "log-degenerate");
  CHECK_THROWS_AS(laws_by_name("cubic"), ConfigError);
  CHECK(builtin_law_names().size() == 2);
}

TEST_CASE("chemical potential against a direct sum") {
  Grid g(6, 5, 1.0, 1.0);
  Kernel k;
  k.amplitude = 3.0;
  const DiscreteKernel dk = DiscreteKernel::build(k, g);
  const MaterialLaws l = builtin_log_mobility();
  ScalarField zero(g);
  CHECK(max_abs(chemical_potential(zero, dk, l)) == 0.0);
  ScalarField half(g, 0.5);
  const ScalarField conv = test::direct_conv(k, 0.0, half);
  ScalarField mu = chemical_potential(half, dk, l);
  for (std::size_t c = 0; c < mu.size(); ++c)
    CHECK(mu[c] == doctest::Approx(std::log(1.5 / 0.5) - conv[c]).epsilon(1e-12));
}

TEST_CASE("initial admissibility") {
  Grid g(8, 8, 1.0, 1.0);
  const MaterialLaws l = builtin_log_mobility();
  ScalarField phi(g, 0.2);
  AdmissibilityReport ok = initial_admissibility(phi, l);
  CHECK(ok.admissible);
  CHECK(ok.entropy_integral > 0.0);
  REQUIRE(ok.potential_integral.has_value());
  phi(3, 3) = 1.2;
  AdmissibilityReport bad = initial_admissibility(phi, l);
  CHECK_FALSE(bad.admissible);
  CHECK(bad.bound_excess == doctest::Approx(0.2));
  // Pure phases are admissible: F and M stay integrable at +-1.
  CHECK(initial_admissibility(ScalarField(g, 1.0), l).admissible);
}

}
