#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nchs {

/// Uniform MAC grid on [0,lx] x [0,ly].
///
/// Scalars live at cell centers (i,j), 0 <= i < nx, 0 <= j < ny. The x velocity
/// component lives on vertical faces x = i*hx (0 <= i <= nx), the y component on
/// horizontal faces y = j*hy (0 <= j <= ny). Storage is row-major with j slow.
class Grid {
 public:
  Grid() = default;
  Grid(int nx, int ny, double lx, double ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / nx_; }
  double hy() const { return ly_ / ny_; }
  double cell_volume() const { return hx() * hy(); }
  double area() const { return lx_ * ly_; }

  std::size_t cell_count() const { return std::size_t(nx_) * ny_; }
  std::size_t xface_count() const { return std::size_t(nx_ + 1) * ny_; }
  std::size_t yface_count() const { return std::size_t(nx_) * (ny_ + 1); }

  std::size_t cell(int i, int j) const { return std::size_t(j) * nx_ + i; }
  std::size_t xface(int i, int j) const { return std::size_t(j) * (nx_ + 1) + i; }
  std::size_t yface(int i, int j) const { return std::size_t(j) * nx_ + i; }

  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  double lx_ = 0.0;
  double ly_ = 0.0;
};

/// Throws SolverError when two operands live on different grids.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[grid_.cell(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.cell(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double a);
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x);

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid, double value = 0.0);

  const Grid& grid() const { return grid_; }

  double& x(int i, int j) { return x_[grid_.xface(i, j)]; }
  double x(int i, int j) const { return x_[grid_.xface(i, j)]; }
  double& y(int i, int j) { return y_[grid_.yface(i, j)]; }
  double y(int i, int j) const { return y_[grid_.yface(i, j)]; }

  std::span<double> xs() { return x_; }
  std::span<const double> xs() const { return x_; }
  std::span<double> ys() { return y_; }
  std::span<const double> ys() const { return y_; }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double a);
  VectorField& axpy(double a, const VectorField& x);

  /// Zeroes the faces that lie on the boundary (no-slip / no-penetration).
  void zero_boundary();

  friend bool operator==(const VectorField&, const VectorField&) = default;

 private:
  Grid grid_;
  std::vector<double> x_;
  std::vector<double> y_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Quadrature weight of a face relative to the cell volume: 1 inside, 1/2 on the boundary.
double xface_weight(const Grid& g, int i);
double yface_weight(const Grid& g, int j);

/// Cell-centered L2 inner product (midpoint rule).
double dot(const ScalarField& a, const ScalarField& b);
/// Face L2 inner product; boundary faces carry half weight (trapezoid rule normal to the wall).
double dot(const VectorField& a, const VectorField& b);
double norm(const ScalarField& a);
double norm(const VectorField& a);
double max_abs(const ScalarField& a);
double max_abs(const VectorField& a);
double mean(const ScalarField& a);
double sum(const ScalarField& a);
bool all_finite(const ScalarField& a);
bool all_finite(const VectorField& a);

}  // namespace nchs
