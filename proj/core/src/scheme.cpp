#include "scheme.hpp"

#include <algorithm>
#include <cmath>

namespace nchs::detail {

namespace {

template <class F>
void for_each_face(VectorField& w, F&& f) {
  for (double& x : w.xs()) x = f(x);
  for (double& y : w.ys()) y = f(y);
}

double clamp_derivative(const MaterialLaws& laws, LawId id, double s) {
  return std::abs(s) > 1.0 ? 0.0 : eval_clamped(laws, id, s);
}

}  // namespace

VectorField face_law(const MaterialLaws& laws, LawId id, const VectorField& s) {
  VectorField out = s;
  for_each_face(out, [&](double x) { return eval_clamped(laws, id, x); });
  return out;
}

ScalarField cell_law(const MaterialLaws& laws, LawId id, const ScalarField& s) {
  ScalarField out = s;
  for (double& x : out.values()) x = eval_clamped(laws, id, x);
  return out;
}

VectorField face_law_derivative(const MaterialLaws& laws, LawId id, const VectorField& s) {
  VectorField out = s;
  for_each_face(out, [&](double x) { return clamp_derivative(laws, id, x); });
  return out;
}

ScalarField cell_law_derivative(const MaterialLaws& laws, LawId id, const ScalarField& s) {
  ScalarField out = s;
  for (double& x : out.values()) x = clamp_derivative(laws, id, x);
  return out;
}

VectorField hadamard(VectorField a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  auto ax = a.xs();
  auto ay = a.ys();
  for (std::size_t k = 0; k < ax.size(); ++k) ax[k] *= b.xs()[k];
  for (std::size_t k = 0; k < ay.size(); ++k) ay[k] *= b.ys()[k];
  return a;
}

ScalarField hadamard(ScalarField a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  return a;
}

VectorField masked(VectorField w) {
  w.zero_boundary();
  return w;
}

SparseMatrix diffusion_system(const VectorField& c, double dt) {
  const Grid& g = c.grid();
  const int nx = g.nx(), ny = g.ny();
  const double ax = dt / (g.hx() * g.hx()), ay = dt / (g.hy() * g.hy());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * g.cell_count());
  for (std::size_t k = 0; k < g.cell_count(); ++k) t.emplace_back(int(k), int(k), 1.0);
  auto couple = [&](std::size_t a, std::size_t b, double w) {
    t.emplace_back(int(a), int(a), w);
    t.emplace_back(int(b), int(b), w);
    t.emplace_back(int(a), int(b), -w);
    t.emplace_back(int(b), int(a), -w);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) couple(g.cell(i - 1, j), g.cell(i, j), ax * c.x(i, j));
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) couple(g.cell(i, j - 1), g.cell(i, j), ay * c.y(i, j));
  SparseMatrix m(int(g.cell_count()), int(g.cell_count()));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix momentum_system(const Model& model, const ScalarField& nu, double dt) {
  const auto n = Eigen::Index(model.grid().xface_count() + model.grid().yface_count());
  SparseMatrix id(n, n);
  id.setIdentity();
  return SparseMatrix(id - dt * model.viscous().matrix(nu));
}

double cfl_number(const VectorField& u, double dt) {
  const Grid& g = u.grid();
  return max_abs(u) * dt / std::min(g.hx(), g.hy());
}

ChCoefficients ch_coefficients(const Model& model, const ScalarField& phi) {
  ChCoefficients c;
  c.avg = center_to_face(phi);
  c.diffusivity = face_law(model.laws(), LawId::diffusivity, c.avg);
  c.mobility = face_law(model.laws(), LawId::mobility, c.avg);
  c.nonlocal = conv_grad(model.kernel(), phi);
  return c;
}

}  // namespace nchs::detail
