#pragma once

// Pieces of the time step shared by the forward, tangent and adjoint sweeps.

#include "nchs/forward.hpp"

namespace nchs::detail {

/// Law applied at every face (clamped arguments).
VectorField face_law(const MaterialLaws& laws, LawId id, const VectorField& s);
ScalarField cell_law(const MaterialLaws& laws, LawId id, const ScalarField& s);
/// Derivative law with the clamp differentiated too: zero where |s| > 1.
VectorField face_law_derivative(const MaterialLaws& laws, LawId id, const VectorField& s);
ScalarField cell_law_derivative(const MaterialLaws& laws, LawId id, const ScalarField& s);

VectorField hadamard(VectorField a, const VectorField& b);
ScalarField hadamard(ScalarField a, const ScalarField& b);
VectorField masked(VectorField w);

/// I - dt div(diag(c) grad) on cells; c is read on interior faces only.
SparseMatrix diffusion_system(const VectorField& c, double dt);
/// I - dt V(nu) on flattened faces.
SparseMatrix momentum_system(const Model& model, const ScalarField& nu, double dt);

double cfl_number(const VectorField& u, double dt);

/// Frozen quantities of the Cahn-Hilliard half step at phi^n.
struct ChCoefficients {
  VectorField avg;         // face average of phi^n
  VectorField diffusivity; // lambda(avg)
  VectorField mobility;    // m(avg)
  VectorField nonlocal;    // grad K * phi^n on faces
};
ChCoefficients ch_coefficients(const Model& model, const ScalarField& phi);

}  // namespace nchs::detail
