#include "nchs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nchs/error.hpp"

namespace nchs {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 4 || ny < 4) throw ConfigError("grid: nx and ny must be >= 4");
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw ConfigError("grid: lx and ly must be positive and finite");
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw SolverError(std::string(where) + ": grid mismatch");
}

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), values_(grid.cell_count(), value) {}

ScalarField& ScalarField::operator+=(const ScalarField& other) { return axpy(1.0, other); }
ScalarField& ScalarField::operator-=(const ScalarField& other) { return axpy(-1.0, other); }

ScalarField& ScalarField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same_grid(grid_, x.grid_, "ScalarField::axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

VectorField::VectorField(const Grid& grid, double value)
    : grid_(grid), x_(grid.xface_count(), value), y_(grid.yface_count(), value) {}

VectorField& VectorField::operator+=(const VectorField& other) { return axpy(1.0, other); }
VectorField& VectorField::operator-=(const VectorField& other) { return axpy(-1.0, other); }

VectorField& VectorField::operator*=(double a) {
  for (double& v : x_) v *= a;
  for (double& v : y_) v *= a;
  return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& x) {
  require_same_grid(grid_, x.grid_, "VectorField::axpy");
  for (std::size_t k = 0; k < x_.size(); ++k) x_[k] += a * x.x_[k];
  for (std::size_t k = 0; k < y_.size(); ++k) y_[k] += a * x.y_[k];
  return *this;
}

void VectorField::zero_boundary() {
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int j = 0; j < ny; ++j) {
    x(0, j) = 0.0;
    x(nx, j) = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    y(i, 0) = 0.0;
    y(i, ny) = 0.0;
  }
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

double xface_weight(const Grid& g, int i) { return (i == 0 || i == g.nx()) ? 0.5 : 1.0; }
double yface_weight(const Grid& g, int j) { return (j == 0 || j == g.ny()) ? 0.5 : 1.0; }

double dot(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s * a.grid().cell_volume();
}

double dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid(), "dot");
  const Grid& g = a.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) s += xface_weight(g, i) * a.x(i, j) * b.x(i, j);
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) s += yface_weight(g, j) * a.y(i, j) * b.y(i, j);
  return s * g.cell_volume();
}

double norm(const ScalarField& a) { return std::sqrt(dot(a, a)); }
double norm(const VectorField& a) { return std::sqrt(dot(a, a)); }

double max_abs(const ScalarField& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const VectorField& a) {
  double m = 0.0;
  for (double v : a.xs()) m = std::max(m, std::abs(v));
  for (double v : a.ys()) m = std::max(m, std::abs(v));
  return m;
}

double sum(const ScalarField& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return s;
}

double mean(const ScalarField& a) { return sum(a) / double(a.size()); }

bool all_finite(const ScalarField& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const VectorField& a) {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(a.xs().begin(), a.xs().end(), finite) &&
         std::all_of(a.ys().begin(), a.ys().end(), finite);
}

}  // namespace nchs
