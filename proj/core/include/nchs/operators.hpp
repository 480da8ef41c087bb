#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <vector>

#include "nchs/grid.hpp"
#include "nchs/material.hpp"

namespace nchs {

namespace detail {
class CosineTransform2D;
}

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Faces flattened as [x faces..., y faces...]; the layout every sparse face operator uses.
Vector flatten(const VectorField& w);
VectorField unflatten(const Grid& g, const Vector& v);

/// Face-difference divergence at cell centers.
ScalarField divergence(const VectorField& w);

/// Two-point face gradient; boundary faces are zero (homogeneous Neumann ghost cells).
VectorField gradient(const ScalarField& phi);

/// divergence(gradient(phi)): the 5-point Neumann Laplacian.
ScalarField laplacian_neumann(const ScalarField& phi);

/// Arithmetic mean of the two neighbouring cells on interior faces, adjacent cell value on
/// boundary faces.
VectorField center_to_face(const ScalarField& phi);

/// Transpose of center_to_face restricted to interior faces: each interior face sends half
/// of its value to each neighbour. Boundary faces are ignored.
ScalarField center_to_face_transpose(const VectorField& w);

/// div(u * avg(phi)) with zero flux through the wall, i.e. u . grad(phi) in conservative form.
/// Throws SolverError if ||div u||_inf exceeds 10 * tol_div.
ScalarField advect_scalar(const VectorField& u, const ScalarField& phi, double tol_div = 1e-10);
/// Same stencil without the divergence precondition (tangent/adjoint use).
ScalarField advect_scalar_unchecked(const VectorField& u, const ScalarField& phi);

/// Bilinear convection N(a, b) ~ div(a (x) b) on the momentum control volumes. With div a = 0
/// and no-slip b, c it satisfies <N(a,b), c> = -<N(a,c), b>, hence <N(a,b), b> = 0.
class ConvectionOperator {
 public:
  explicit ConvectionOperator(const Grid& grid);

  const Grid& grid() const { return grid_; }
  VectorField apply(const VectorField& a, const VectorField& b) const;
  /// Gradient with respect to a of sum_o s_o N(a,b)_o (Euclidean transpose in a).
  VectorField transpose_first(const VectorField& b, const VectorField& s) const;
  /// Gradient with respect to b of sum_o s_o N(a,b)_o.
  VectorField transpose_second(const VectorField& a, const VectorField& s) const;

 private:
  struct Term {
    std::uint32_t out, a, b;
    double coef;
  };
  Grid grid_;
  std::vector<Term> terms_;
};

/// (u . grad) u in skew-symmetric conservative form. Checks the divergence precondition.
VectorField advect_velocity(const VectorField& u, double tol_div = 1e-10);

/// 2 div(nu D u) with reflected ghost velocities for no-slip walls, written as -S^T diag(d(nu)) S
/// where S maps face velocities to (e_xx, e_yy at cells; du/dy + dv/dx at corners).
class ViscousOperator {
 public:
  explicit ViscousOperator(const Grid& grid);

  const Grid& grid() const { return grid_; }
  VectorField apply(const ScalarField& nu, const VectorField& u) const;
  SparseMatrix matrix(const ScalarField& nu) const;
  /// Gradient with respect to the cell viscosities of sum a_f (V(nu) z)_f.
  ScalarField coefficient_transpose(const VectorField& a, const VectorField& z) const;
  /// 2 ||sqrt(nu) D u||^2 as produced by the stencil, i.e. -<V(nu) u, u>.
  double dissipation(const ScalarField& nu, const VectorField& u) const;

 private:
  Vector stress_weights(const ScalarField& nu) const;
  Grid grid_;
  SparseMatrix strain_;   // rows: exx cells, eyy cells, shear corners
  SparseMatrix weights_;  // cell viscosity -> stress weights
};

VectorField viscous_term(const ScalarField& phi, const VectorField& u, const MaterialLaws& laws);

/// Homogeneous-Neumann Poisson solver on cell centers via cosine transforms. Exact up to
/// round-off for the 5-point Laplacian; returns the zero-mean solution.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Grid& grid);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;

  const Grid& grid() const { return grid_; }
  /// Throws SolverError if |mean(rhs)| > 1e-10 * max(1, max|rhs|).
  ScalarField solve(const ScalarField& rhs) const;

 private:
  Grid grid_;
  std::unique_ptr<detail::CosineTransform2D> dct_;
  std::vector<double> eigenvalues_;
};

ScalarField poisson_pressure(const ScalarField& rhs);

/// Orthogonal projection (face inner product) onto discretely divergence-free no-slip fields.
VectorField leray_project(const VectorField& w, const PoissonSolver& poisson);
VectorField leray_project(const VectorField& w);

/// Discrete curl of a corner streamfunction with psi = 0 on the wall. Its range is exactly
/// the set of divergence-free fields with zero boundary faces.
class StreamfunctionBasis {
 public:
  explicit StreamfunctionBasis(const Grid& grid);
  const Grid& grid() const { return grid_; }
  const SparseMatrix& curl() const { return curl_; }
  int size() const { return int(curl_.cols()); }
  VectorField velocity(const Vector& psi) const;

 private:
  Grid grid_;
  SparseMatrix curl_;
};

/// Sparse Cholesky (LDL^T) solve with residual-driven iterative refinement. Throws
/// SolverError if factorization fails or the relative residual stays above tol after
/// max_refinements correction sweeps.
class SpdSolver {
 public:
  SpdSolver(SparseMatrix matrix, double tol = 1e-10, int max_refinements = 5);
  Vector solve(const Vector& b) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
  Eigen::SimplicialLDLT<SparseMatrix> factor_;
  double tol_;
  int max_refinements_;
};

/// Solves the implicit Stokes-type system (I - dt V(nu)) u + dt grad(pi) = q, div u = 0,
/// u = 0 on the wall, by a Galerkin solve in the streamfunction basis. The solve operator
/// R = C (C^T Y C)^{-1} C^T is symmetric, so the same object serves forward and transpose.
class StokesSolver {
 public:
  /// face_system is Y = I - dt V(nu) on flattened faces.
  StokesSolver(const StreamfunctionBasis& basis, const SparseMatrix& face_system, double tol = 1e-10,
               int max_refinements = 5);
  VectorField solve(const VectorField& q) const;

 private:
  const StreamfunctionBasis* basis_;
  SpdSolver solver_;
};

}  // namespace nchs
