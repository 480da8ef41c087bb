#include "nchs/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "nchs/error.hpp"

namespace nchs {

Vector flatten(const VectorField& w) {
  const auto xs = w.xs();
  const auto ys = w.ys();
  Vector v(xs.size() + ys.size());
  std::copy(xs.begin(), xs.end(), v.data());
  std::copy(ys.begin(), ys.end(), v.data() + xs.size());
  return v;
}

VectorField unflatten(const Grid& g, const Vector& v) {
  VectorField w(g);
  auto xs = w.xs();
  auto ys = w.ys();
  std::copy(v.data(), v.data() + xs.size(), xs.begin());
  std::copy(v.data() + xs.size(), v.data() + xs.size() + ys.size(), ys.begin());
  return w;
}

ScalarField divergence(const VectorField& w) {
  const Grid& g = w.grid();
  ScalarField d(g);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      d(i, j) = (w.x(i + 1, j) - w.x(i, j)) * ihx + (w.y(i, j + 1) - w.y(i, j)) * ihy;
  return d;
}

VectorField gradient(const ScalarField& phi) {
  const Grid& g = phi.grid();
  VectorField w(g);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) w.x(i, j) = (phi(i, j) - phi(i - 1, j)) * ihx;
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) w.y(i, j) = (phi(i, j) - phi(i, j - 1)) * ihy;
  return w;
}

ScalarField laplacian_neumann(const ScalarField& phi) { return divergence(gradient(phi)); }

VectorField center_to_face(const ScalarField& phi) {
  const Grid& g = phi.grid();
  const int nx = g.nx(), ny = g.ny();
  VectorField w(g);
  for (int j = 0; j < ny; ++j) {
    w.x(0, j) = phi(0, j);
    for (int i = 1; i < nx; ++i) w.x(i, j) = 0.5 * (phi(i - 1, j) + phi(i, j));
    w.x(nx, j) = phi(nx - 1, j);
  }
  for (int i = 0; i < nx; ++i) {
    w.y(i, 0) = phi(i, 0);
    for (int j = 1; j < ny; ++j) w.y(i, j) = 0.5 * (phi(i, j - 1) + phi(i, j));
    w.y(i, ny) = phi(i, ny - 1);
  }
  return w;
}

ScalarField center_to_face_transpose(const VectorField& w) {
  const Grid& g = w.grid();
  ScalarField s(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) {
      s(i - 1, j) += 0.5 * w.x(i, j);
      s(i, j) += 0.5 * w.x(i, j);
    }
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      s(i, j - 1) += 0.5 * w.y(i, j);
      s(i, j) += 0.5 * w.y(i, j);
    }
  return s;
}

ScalarField advect_scalar_unchecked(const VectorField& u, const ScalarField& phi) {
  require_same_grid(u.grid(), phi.grid(), "advect_scalar");
  VectorField flux = center_to_face(phi);
  const auto us = u.xs();
  const auto vs = u.ys();
  auto fx = flux.xs();
  auto fy = flux.ys();
  for (std::size_t k = 0; k < fx.size(); ++k) fx[k] *= us[k];
  for (std::size_t k = 0; k < fy.size(); ++k) fy[k] *= vs[k];
  flux.zero_boundary();
  return divergence(flux);
}

namespace {

void check_divergence_free(const VectorField& u, double tol_div, const char* where) {
  const double d = max_abs(divergence(u));
  if (d > 10.0 * tol_div)
    throw SolverError(std::string(where) + ": velocity not divergence-free (||div u||_inf = " +
                      std::to_string(d) + ")");
}

}  // namespace

ScalarField advect_scalar(const VectorField& u, const ScalarField& phi, double tol_div) {
  check_divergence_free(u, tol_div, "advect_scalar");
  return advect_scalar_unchecked(u, phi);
}

// ---------------------------------------------------------------------------
// Convection

ConvectionOperator::ConvectionOperator(const Grid& grid) : grid_(grid) {
  const int nx = grid.nx(), ny = grid.ny();
  const auto nxf = std::uint32_t(grid.xface_count());
  auto X = [&](int i, int j) { return std::uint32_t(grid.xface(i, j)); };
  auto Y = [&](int i, int j) { return nxf + std::uint32_t(grid.yface(i, j)); };
  // out += coef * (a0 + a1) * (b0 + b1)
  auto add = [&](std::uint32_t out, double coef, std::uint32_t a0, std::uint32_t a1, std::uint32_t b0,
                 std::uint32_t b1) {
    for (auto a : {a0, a1})
      for (auto b : {b0, b1}) terms_.push_back({out, a, b, coef});
  };
  const double cx = 0.25 / grid.hx(), cy = 0.25 / grid.hy();

  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const auto o = X(i, j);
      add(o, cx, X(i, j), X(i + 1, j), X(i, j), X(i + 1, j));
      add(o, -cx, X(i - 1, j), X(i, j), X(i - 1, j), X(i, j));
      if (j + 1 < ny) add(o, cy, Y(i - 1, j + 1), Y(i, j + 1), X(i, j), X(i, j + 1));
      if (j > 0) add(o, -cy, Y(i - 1, j), Y(i, j), X(i, j - 1), X(i, j));
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto o = Y(i, j);
      add(o, cy, Y(i, j), Y(i, j + 1), Y(i, j), Y(i, j + 1));
      add(o, -cy, Y(i, j - 1), Y(i, j), Y(i, j - 1), Y(i, j));
      if (i + 1 < nx) add(o, cx, X(i + 1, j - 1), X(i + 1, j), Y(i, j), Y(i + 1, j));
      if (i > 0) add(o, -cx, X(i, j - 1), X(i, j), Y(i - 1, j), Y(i, j));
    }
}

VectorField ConvectionOperator::apply(const VectorField& a, const VectorField& b) const {
  require_same_grid(grid_, a.grid(), "ConvectionOperator");
  require_same_grid(grid_, b.grid(), "ConvectionOperator");
  const Vector av = flatten(a), bv = flatten(b);
  Vector out = Vector::Zero(av.size());
  for (const Term& t : terms_) out[t.out] += t.coef * av[t.a] * bv[t.b];
  return unflatten(grid_, out);
}

VectorField ConvectionOperator::transpose_first(const VectorField& b, const VectorField& s) const {
  const Vector bv = flatten(b), sv = flatten(s);
  Vector out = Vector::Zero(bv.size());
  for (const Term& t : terms_) out[t.a] += t.coef * bv[t.b] * sv[t.out];
  return unflatten(grid_, out);
}

VectorField ConvectionOperator::transpose_second(const VectorField& a, const VectorField& s) const {
  const Vector av = flatten(a), sv = flatten(s);
  Vector out = Vector::Zero(av.size());
  for (const Term& t : terms_) out[t.b] += t.coef * av[t.a] * sv[t.out];
  return unflatten(grid_, out);
}

VectorField advect_velocity(const VectorField& u, double tol_div) {
  check_divergence_free(u, tol_div, "advect_velocity");
  return ConvectionOperator(u.grid()).apply(u, u);
}

// ---------------------------------------------------------------------------
// Viscous stress

ViscousOperator::ViscousOperator(const Grid& grid) : grid_(grid) {
  const int nx = grid.nx(), ny = grid.ny();
  const int ncell = int(grid.cell_count());
  const int nxf = int(grid.xface_count());
  const int nfaces = nxf + int(grid.yface_count());
  const int ncorner = (nx + 1) * (ny + 1);
  const double ihx = 1.0 / grid.hx(), ihy = 1.0 / grid.hy();
  auto X = [&](int i, int j) { return int(grid.xface(i, j)); };
  auto Y = [&](int i, int j) { return nxf + int(grid.yface(i, j)); };
  auto corner = [&](int i, int j) { return 2 * ncell + j * (nx + 1) + i; };

  std::vector<Eigen::Triplet<double>> s, w;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = int(grid.cell(i, j));
      s.emplace_back(c, X(i + 1, j), ihx);
      s.emplace_back(c, X(i, j), -ihx);
      s.emplace_back(ncell + c, Y(i, j + 1), ihy);
      s.emplace_back(ncell + c, Y(i, j), -ihy);
      w.emplace_back(c, c, 2.0);
      w.emplace_back(ncell + c, c, 2.0);
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int r = corner(i, j);
      // du/dy with the reflected ghost u(i,-1) = -u(i,0) at the wall
      if (j == 0) {
        if (i > 0 && i < nx) s.emplace_back(r, X(i, 0), 2.0 * ihy);
      } else if (j == ny) {
        if (i > 0 && i < nx) s.emplace_back(r, X(i, ny - 1), -2.0 * ihy);
      } else if (i > 0 && i < nx) {
        s.emplace_back(r, X(i, j), ihy);
        s.emplace_back(r, X(i, j - 1), -ihy);
      }
      // dv/dx likewise
      if (i == 0) {
        if (j > 0 && j < ny) s.emplace_back(r, Y(0, j), 2.0 * ihx);
      } else if (i == nx) {
        if (j > 0 && j < ny) s.emplace_back(r, Y(nx - 1, j), -2.0 * ihx);
      } else if (j > 0 && j < ny) {
        s.emplace_back(r, Y(i, j), ihx);
        s.emplace_back(r, Y(i - 1, j), -ihx);
      }
      // corner viscosity: mean of the adjacent cells; wall corners carry half weight
      const bool wall = (i == 0 || i == nx || j == 0 || j == ny);
      int count = 0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && ci < nx && cj >= 0 && cj < ny) ++count;
        }
      const double weight = wall ? 0.5 : 1.0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && ci < nx && cj >= 0 && cj < ny)
            w.emplace_back(r, int(grid.cell(ci, cj)), weight / count);
        }
    }
  strain_.resize(2 * ncell + ncorner, nfaces);
  strain_.setFromTriplets(s.begin(), s.end());
  weights_.resize(2 * ncell + ncorner, ncell);
  weights_.setFromTriplets(w.begin(), w.end());
}

Vector ViscousOperator::stress_weights(const ScalarField& nu) const {
  require_same_grid(grid_, nu.grid(), "ViscousOperator");
  return weights_ * Eigen::Map<const Vector>(nu.values().data(), Eigen::Index(nu.size()));
}

VectorField ViscousOperator::apply(const ScalarField& nu, const VectorField& u) const {
  require_same_grid(grid_, u.grid(), "ViscousOperator");
  const Vector d = stress_weights(nu);
  const Vector e = strain_ * flatten(u);
  const Vector out = -(strain_.transpose() * d.cwiseProduct(e));
  return unflatten(grid_, out);
}

SparseMatrix ViscousOperator::matrix(const ScalarField& nu) const {
  const Vector d = stress_weights(nu);
  SparseMatrix m = -(strain_.transpose() * d.asDiagonal() * strain_);
  m.makeCompressed();
  return m;
}

ScalarField ViscousOperator::coefficient_transpose(const VectorField& a, const VectorField& z) const {
  const Vector ea = strain_ * flatten(a);
  const Vector ez = strain_ * flatten(z);
  const Vector g = -(weights_.transpose() * ea.cwiseProduct(ez));
  ScalarField out(grid_);
  std::copy(g.data(), g.data() + g.size(), out.values().begin());
  return out;
}

double ViscousOperator::dissipation(const ScalarField& nu, const VectorField& u) const {
  const Vector d = stress_weights(nu);
  const Vector e = strain_ * flatten(u);
  return d.dot(e.cwiseProduct(e)) * grid_.cell_volume();
}

VectorField viscous_term(const ScalarField& phi, const VectorField& u, const MaterialLaws& laws) {
  ScalarField nu(phi.grid());
  for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = eval_clamped(laws, LawId::viscosity, phi[k]);
  return ViscousOperator(phi.grid()).apply(nu, u);
}

// ---------------------------------------------------------------------------
// Pressure Poisson

PoissonSolver::PoissonSolver(const Grid& grid)
    : grid_(grid), dct_(std::make_unique<detail::CosineTransform2D>(grid.nx(), grid.ny())) {
  const int nx = grid.nx(), ny = grid.ny();
  eigenvalues_.resize(grid.cell_count());
  const double hx2 = grid.hx() * grid.hx(), hy2 = grid.hy() * grid.hy();
  for (int l = 0; l < ny; ++l)
    for (int k = 0; k < nx; ++k)
      eigenvalues_[grid.cell(k, l)] = -(2.0 - 2.0 * std::cos(std::numbers::pi * k / nx)) / hx2 -
                                      (2.0 - 2.0 * std::cos(std::numbers::pi * l / ny)) / hy2;
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

ScalarField PoissonSolver::solve(const ScalarField& rhs) const {
  require_same_grid(grid_, rhs.grid(), "poisson_pressure");
  const double scale = std::max(1.0, max_abs(rhs));
  const double m = mean(rhs);
  if (!(std::abs(m) <= 1e-10 * scale))
    throw SolverError("poisson_pressure: incompatible right-hand side (mean " + std::to_string(m) + ")");

  const std::size_t n = rhs.size();
  auto a = detail::alloc_real(n);
  auto b = detail::alloc_real(n);
  std::copy(rhs.values().begin(), rhs.values().end(), a.get());
  dct_->forward(a.get(), b.get());
  b[0] = 0.0;
  const double norm = 1.0 / (4.0 * double(n));
  for (std::size_t k = 1; k < n; ++k) b[k] *= norm / eigenvalues_[k];
  dct_->backward(b.get(), a.get());

  ScalarField x(grid_);
  std::copy(a.get(), a.get() + n, x.values().begin());
  const double xm = mean(x);
  for (double& v : x.values()) v -= xm;
  if (!all_finite(x)) throw SolverError("poisson_pressure: non-finite solution");
  return x;
}

ScalarField poisson_pressure(const ScalarField& rhs) { return PoissonSolver(rhs.grid()).solve(rhs); }

VectorField leray_project(const VectorField& w, const PoissonSolver& poisson) {
  VectorField out = w;
  out.zero_boundary();
  const ScalarField p = poisson.solve(divergence(out));
  out -= gradient(p);
  return out;
}

VectorField leray_project(const VectorField& w) { return leray_project(w, PoissonSolver(w.grid())); }

// ---------------------------------------------------------------------------
// Divergence-free basis and solves

StreamfunctionBasis::StreamfunctionBasis(const Grid& grid) : grid_(grid) {
  const int nx = grid.nx(), ny = grid.ny();
  const int nxf = int(grid.xface_count());
  const double ihx = 1.0 / grid.hx(), ihy = 1.0 / grid.hy();
  auto col = [&](int i, int j) { return (j - 1) * (nx - 1) + (i - 1); };
  auto interior = [&](int i, int j) { return i > 0 && i < nx && j > 0 && j < ny; };
  std::vector<Eigen::Triplet<double>> t;
  // u = d psi / dy, v = -d psi / dx
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const int r = int(grid.xface(i, j));
      if (interior(i, j + 1)) t.emplace_back(r, col(i, j + 1), ihy);
      if (interior(i, j)) t.emplace_back(r, col(i, j), -ihy);
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int r = nxf + int(grid.yface(i, j));
      if (interior(i + 1, j)) t.emplace_back(r, col(i + 1, j), -ihx);
      if (interior(i, j)) t.emplace_back(r, col(i, j), ihx);
    }
  curl_.resize(nxf + int(grid.yface_count()), (nx - 1) * (ny - 1));
  curl_.setFromTriplets(t.begin(), t.end());
}

VectorField StreamfunctionBasis::velocity(const Vector& psi) const { return unflatten(grid_, curl_ * psi); }

SpdSolver::SpdSolver(SparseMatrix matrix, double tol, int max_refinements)
    : matrix_(std::move(matrix)), tol_(tol), max_refinements_(max_refinements) {
  factor_.compute(matrix_);
  if (factor_.info() != Eigen::Success) throw SolverError("linear solve: factorization failed");
}

Vector SpdSolver::solve(const Vector& b) const {
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  Vector x = factor_.solve(b);
  Vector r = b - matrix_ * x;
  for (int k = 0; k < max_refinements_ && r.norm() > tol_ * bnorm; ++k) {
    x += factor_.solve(r);
    r = b - matrix_ * x;
  }
  if (!x.allFinite() || r.norm() > tol_ * bnorm)
    throw SolverError("linear solve did not converge (relative residual " + std::to_string(r.norm() / bnorm) + ")");
  return x;
}

StokesSolver::StokesSolver(const StreamfunctionBasis& basis, const SparseMatrix& face_system, double tol,
                           int max_refinements)
    : basis_(&basis),
      solver_(SparseMatrix(basis.curl().transpose() * face_system * basis.curl()), tol, max_refinements) {}

VectorField StokesSolver::solve(const VectorField& q) const {
  const Vector rhs = basis_->curl().transpose() * flatten(q);
  return basis_->velocity(solver_.solve(rhs));
}

}  // namespace nchs
