#include <doctest.h>

#include "nchs/error.hpp"
#include "support.hpp"

using namespace nchs;
using namespace nchs::test;

namespace {

Kernel make_kernel(KernelFamily f, double amp = 1.3, double len = 0.15) {
  Kernel k;
  k.family = f;
  k.amplitude = amp;
  k.length = len;
  return k;
}

}  // namespace

TEST_SUITE("nonlocal") {

TEST_CASE("FFT convolution matches the direct sum for every family") {
  std::mt19937_64 rng(1);
  Grid g(9, 6, 1.2, 0.7);
  ScalarField phi = random_scalar(g, rng);
  for (auto f : {KernelFamily::gaussian, KernelFamily::exp_decay, KernelFamily::regularized_newtonian}) {
    CAPTURE(to_string(f));
    const Kernel k = make_kernel(f);
    const DiscreteKernel dk = DiscreteKernel::build(k, g);
    const double rr = dk.core_radius();
    const ScalarField direct = direct_conv(k, rr, phi);
    CHECK(max_diff(conv_scalar(dk, phi), direct) < 1e-12 * std::max(1.0, max_abs(direct)));
    const VectorField dgrad = direct_conv_grad(k, rr, phi);
    CHECK(max_diff(conv_grad(dk, phi), dgrad) < 1e-12 * std::max(1.0, max_abs(dgrad)));
  }
}

TEST_CASE("center gradient matches the direct sum") {
  std::mt19937_64 rng(2);
  Grid g(7, 8, 1.0, 1.0);
  const Kernel k = make_kernel(KernelFamily::gaussian, 2.0, 0.2);
  const DiscreteKernel dk = DiscreteKernel::build(k, g);
  ScalarField phi = random_scalar(g, rng);
  CenterGradient cg = conv_grad_center(dk, phi);
  double err = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double sx = 0.0, sy = 0.0;
      for (int l = 0; l < g.ny(); ++l)
        for (int m = 0; m < g.nx(); ++m) {
          const double dx = g.xc(i) - g.xc(m), dy = g.yc(j) - g.yc(l);
          sx += kernel_dx(k, dx, dy, 0.0) * phi(m, l);
          sy += kernel_dx(k, dy, dx, 0.0) * phi(m, l);
        }
      err = std::max({err, std::abs(cg.x(i, j) - sx * g.cell_volume()), std::abs(cg.y(i, j) - sy * g.cell_volume())});
    }
  CHECK(err < 1e-12);
}

TEST_CASE("convolution is self-adjoint") {
  Grid g(16, 16, 1.0, 1.0);
  for (auto f : {KernelFamily::gaussian, KernelFamily::exp_decay, KernelFamily::regularized_newtonian})
    CHECK(self_adjointness_check(DiscreteKernel::build(make_kernel(f), g), 20) < 1e-12);
}

TEST_CASE("an asymmetric table is caught by the self-adjointness check") {
  Grid g(6, 6, 1.0, 1.0);
  OffsetTable t{11, 11, 5, 5, std::vector<double>(121, 0.0)};
  t.values[5 * 11 + 6] = 1.0;  // K(+hx, 0) != K(-hx, 0)
  CHECK(self_adjointness_check(DiscreteKernel::from_scalar_table(g, t), 10) > 1e-3);
}

TEST_CASE("conv_grad_dot is minus the transpose of conv_grad") {
  std::mt19937_64 rng(3);
  Grid g(16, 16, 1.0, 1.0);
  const DiscreteKernel dk = DiscreteKernel::build(make_kernel(KernelFamily::exp_decay), g);
  for (int t = 0; t < 10; ++t) {
    VectorField w = random_vector(g, rng);
    ScalarField chi = random_scalar(g, rng);
    const double a = dot(conv_grad_dot(dk, w), chi), b = -dot(w, conv_grad(dk, chi));
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), norm(w) * norm(chi)));
  }
}

TEST_CASE("conv_grad_dot direct quadrature on a small grid") {
  std::mt19937_64 rng(4);
  Grid g(5, 4, 1.0, 0.8);
  const Kernel k = make_kernel(KernelFamily::gaussian);
  const DiscreteKernel dk = DiscreteKernel::build(k, g);
  VectorField w = random_vector(g, rng);
  ScalarField out = conv_grad_dot(dk, w);
  const double vol = g.cell_volume();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      for (int l = 0; l < g.ny(); ++l)
        for (int m = 0; m <= g.nx(); ++m)
          s += xface_weight(g, m) * kernel_dx(k, g.xc(i) - m * g.hx(), g.yc(j) - g.yc(l), 0.0) * w.x(m, l);
      for (int l = 0; l <= g.ny(); ++l)
        for (int m = 0; m < g.nx(); ++m)
          s += yface_weight(g, l) * kernel_dx(k, g.yc(j) - l * g.hy(), g.xc(i) - g.xc(m), 0.0) * w.y(m, l);
      CHECK(out(i, j) == doctest::Approx(s * vol).epsilon(1e-11));
    }
}

TEST_CASE("unknown kernel family lists the valid ones") {
  try {
    kernel_family_from_string("cauchy");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("gaussian") != std::string::npos);
    CHECK(msg.find("exp-decay") != std::string::npos);
    CHECK(msg.find("regularized-newtonian") != std::string::npos);
  }
  CHECK(kernel_family_from_string("exp-decay") == KernelFamily::exp_decay);
}

TEST_CASE("regularized newtonian core radius defaults to half the mesh size") {
  Grid g(10, 20, 1.0, 1.0);
  CHECK(DiscreteKernel::build(make_kernel(KernelFamily::regularized_newtonian), g).core_radius() ==
        doctest::Approx(0.025));
}

TEST_CASE("admissibility probe estimates are resolution independent for the gaussian") {
  const RefinementReport rep =
      admissibility_refinement(make_kernel(KernelFamily::gaussian, 1.0, 0.1), Grid(16, 16, 1.0, 1.0),
                               Grid(32, 32, 1.0, 1.0), {2.0, 4.0}, 10);
  REQUIRE(rep.relative_change.size() == 2);
  CHECK(rep.coarse[0].estimate > 0.0);
  CHECK(rep.relative_change[0] <= 0.25);
  CHECK(rep.stable == (rep.relative_change[0] <= 0.25 && rep.relative_change[1] <= 0.25));
}

}
