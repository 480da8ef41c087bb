#include <doctest.h>

#include <Eigen/Dense>

#include "nchs/initial.hpp"
#include "support.hpp"

using namespace nchs;
using namespace nchs::test;

TEST_SUITE("operators") {

TEST_CASE("grid indexing and face weights") {
  Grid g(5, 4, 2.0, 1.5);
  CHECK(g.cell_count() == 20);
  CHECK(g.xface_count() == 24);
  CHECK(g.yface_count() == 25);
  CHECK(g.cell(4, 2) == 14);
  CHECK(xface_weight(g, 0) == 0.5);
  CHECK(xface_weight(g, 2) == 1.0);
  CHECK(yface_weight(g, 4) == 0.5);
  VectorField one(g, 1.0);
  // Half-weighted boundary faces make the face quadrature of a constant exact.
  CHECK(dot(one, one) == doctest::Approx(2.0 * g.area()).epsilon(1e-14));
  CHECK_THROWS_AS(Grid(0, 3, 1.0, 1.0), Error);
}

TEST_CASE("summation by parts on no-slip fields") {
  std::mt19937_64 rng(7);
  Grid g(16, 12, 1.0, 0.75);
  for (int t = 0; t < 20; ++t) {
    ScalarField phi = random_scalar(g, rng);
    VectorField w = random_vector(g, rng);
    w.zero_boundary();
    const double lhs = dot(gradient(phi), w), rhs = -dot(phi, divergence(w));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * norm(phi) * norm(w) / g.hx());
  }
}

TEST_CASE("Neumann laplacian matches the 5-point stencil") {
  std::mt19937_64 rng(3);
  Grid g(7, 6, 1.4, 0.9);
  ScalarField phi = random_scalar(g, rng);
  ScalarField lap = laplacian_neumann(phi);
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      if (i > 0) s += (phi(i - 1, j) - phi(i, j)) / hx2;
      if (i + 1 < g.nx()) s += (phi(i + 1, j) - phi(i, j)) / hx2;
      if (j > 0) s += (phi(i, j - 1) - phi(i, j)) / hy2;
      if (j + 1 < g.ny()) s += (phi(i, j + 1) - phi(i, j)) / hy2;
      CHECK(lap(i, j) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("Poisson round trip") {
  std::mt19937_64 rng(11);
  for (auto [nx, ny] : {std::pair{16, 16}, {9, 14}}) {
    Grid g(nx, ny, 1.0, 1.3);
    PoissonSolver poisson(g);
    ScalarField rhs = random_scalar(g, rng);
    const double m = mean(rhs);
    for (auto& v : rhs.values()) v -= m;
    ScalarField p = poisson.solve(rhs);
    CHECK(std::abs(mean(p)) < 1e-12);
    CHECK(max_diff(laplacian_neumann(p), rhs) < 1e-9 * max_abs(rhs));
    ScalarField bad(g, 1.0);
    CHECK_THROWS_AS(poisson.solve(bad), SolverError);
  }
}

TEST_CASE("Leray projection is an orthogonal projector") {
  std::mt19937_64 rng(5);
  Grid g(12, 10, 1.0, 1.0);
  VectorField w = random_vector(g, rng);
  VectorField pw = leray_project(w);
  CHECK(max_abs(divergence(pw)) < 1e-11);
  CHECK(max_diff(leray_project(pw), pw) < 1e-12);
  CHECK(std::abs(dot(w - pw, pw)) < 1e-12 * norm(w) * norm(w));
}

TEST_CASE("streamfunction velocities are solenoidal with zero wall flux") {
  Grid g(8, 6, 1.0, 0.8);
  StreamfunctionBasis basis(g);
  std::mt19937_64 rng(2);
  Vector psi = Vector::Random(basis.size());
  VectorField u = basis.velocity(psi);
  CHECK(max_abs(divergence(u)) < 1e-12);
  for (int j = 0; j < g.ny(); ++j) CHECK(u.x(0, j) == 0.0);
  for (int i = 0; i < g.nx(); ++i) CHECK(u.y(i, g.ny()) == 0.0);
  CHECK(max_abs(divergence(vortex(g, 0.3))) < 1e-13);
}

TEST_CASE("scalar advection is skew-symmetric for solenoidal velocity") {
  std::mt19937_64 rng(13);
  Grid g(16, 16, 1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    VectorField u = random_solenoidal(g, rng);
    ScalarField a = random_scalar(g, rng), b = random_scalar(g, rng);
    const double s = dot(advect_scalar(u, a), b) + dot(a, advect_scalar(u, b));
    CHECK(std::abs(s) < 1e-10 * max_abs(u) * norm(a) * norm(b) / g.hx());
  }
  VectorField u(g);
  u.x(3, 3) = 1.0;
  CHECK_THROWS_AS(advect_scalar(u, ScalarField(g)), SolverError);
}

TEST_CASE("momentum convection is skew in its last two slots") {
  std::mt19937_64 rng(17);
  Grid g(10, 12, 1.0, 1.2);
  ConvectionOperator conv(g);
  for (int t = 0; t < 10; ++t) {
    VectorField a = random_solenoidal(g, rng);
    VectorField b = random_vector(g, rng), c = random_vector(g, rng);
    b.zero_boundary();
    c.zero_boundary();
    const double s = dot(conv.apply(a, b), c) + dot(conv.apply(a, c), b);
    CHECK(std::abs(s) < 1e-10 * norm(a) * norm(b) * norm(c) / (g.hx() * g.cell_volume()));
  }
}

TEST_CASE("convection transposes match a Euclidean pairing") {
  std::mt19937_64 rng(19);
  Grid g(6, 5, 1.0, 1.0);
  ConvectionOperator conv(g);
  VectorField a = random_vector(g, rng), b = random_vector(g, rng), s = random_vector(g, rng);
  auto euclid = [](const VectorField& x, const VectorField& y) { return flatten(x).dot(flatten(y)); };
  const double val = euclid(conv.apply(a, b), s);
  CHECK(euclid(conv.transpose_first(b, s), a) == doctest::Approx(val).epsilon(1e-12));
  CHECK(euclid(conv.transpose_second(a, s), b) == doctest::Approx(val).epsilon(1e-12));
}

TEST_CASE("viscous operator with constant viscosity is the vector laplacian away from walls") {
  Grid g(16, 16, 1.0, 1.0);
  ViscousOperator visc(g);
  const double nu = 0.7;
  VectorField u = vortex(g, 1.0);
  VectorField vu = visc.apply(ScalarField(g, nu), u);
  const double hx2 = g.hx() * g.hx(), hy2 = g.hy() * g.hy();
  double err = 0.0, scale = 0.0;
  for (int j = 2; j < g.ny() - 2; ++j)
    for (int i = 2; i < g.nx() - 1; ++i) {
      const double lap = (u.x(i + 1, j) - 2 * u.x(i, j) + u.x(i - 1, j)) / hx2 +
                         (u.x(i, j + 1) - 2 * u.x(i, j) + u.x(i, j - 1)) / hy2;
      err = std::max(err, std::abs(vu.x(i, j) - nu * lap));
      scale = std::max(scale, std::abs(nu * lap));
    }
  CHECK(err < 1e-10 * scale);
}

TEST_CASE("viscous operator is symmetric and dissipative") {
  std::mt19937_64 rng(23);
  Grid g(8, 7, 1.0, 1.0);
  ViscousOperator visc(g);
  ScalarField nu(g);
  for (auto& v : nu.values()) v = 0.5 + std::uniform_real_distribution<double>(0, 1)(rng);
  SparseMatrix m = visc.matrix(nu);
  CHECK((Eigen::MatrixXd(m) - Eigen::MatrixXd(m.transpose())).cwiseAbs().maxCoeff() < 1e-10);
  VectorField u = random_vector(g, rng);
  u.zero_boundary();
  CHECK(visc.dissipation(nu, u) > 0.0);
  CHECK(visc.dissipation(nu, u) == doctest::Approx(-flatten(u).dot(m * flatten(u)) * g.cell_volume()).epsilon(1e-10));
  // coefficient_transpose is the derivative in the cell viscosities.
  VectorField a = random_vector(g, rng);
  ScalarField dnu = random_scalar(g, rng);
  const double lin = flatten(a).dot(flatten(visc.apply(dnu, u)));
  double tr = 0.0;
  ScalarField ct = visc.coefficient_transpose(a, u);
  for (std::size_t k = 0; k < ct.size(); ++k) tr += ct[k] * dnu[k];
  CHECK(tr == doctest::Approx(lin).epsilon(1e-12));
}

TEST_CASE("center_to_face transpose on interior faces") {
  std::mt19937_64 rng(29);
  Grid g(6, 4, 1.0, 1.0);
  ScalarField phi = random_scalar(g, rng);
  VectorField w = random_vector(g, rng);
  VectorField cf = center_to_face(phi);
  double lhs = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) lhs += cf.x(i, j) * w.x(i, j);
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) lhs += cf.y(i, j) * w.y(i, j);
  ScalarField t = center_to_face_transpose(w);
  double rhs = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) rhs += t[k] * phi[k];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  CHECK(cf.x(0, 1) == phi(0, 1));
}

TEST_CASE("Stokes solve returns solenoidal velocity and absorbs gradients") {
  std::mt19937_64 rng(31);
  Grid g(10, 10, 1.0, 1.0);
  ViscousOperator visc(g);
  StreamfunctionBasis basis(g);
  const double dt = 0.01;
  const SparseMatrix v = visc.matrix(ScalarField(g, 1.0));
  SparseMatrix eye(v.rows(), v.cols());
  eye.setIdentity();
  StokesSolver stokes(basis, SparseMatrix(eye - dt * v));
  VectorField q = random_vector(g, rng);
  VectorField u = stokes.solve(q);
  CHECK(max_abs(divergence(u)) < 1e-12);
  VectorField grad_only = gradient(random_scalar(g, rng));
  CHECK(max_abs(stokes.solve(grad_only)) < 1e-12);
}

}
