#pragma once

#include <vector>

#include "nchs/grid.hpp"

namespace nchs {

/// Piecewise-constant-in-time face control v^0..v^{N-1} with optional componentwise box
/// bounds. Bounds are stored per step; an empty bound list means unbounded.
struct ControlField {
  std::vector<VectorField> values;
  std::vector<VectorField> lower, upper;

  static ControlField zeros(const Grid& grid, int steps);

  int steps() const { return int(values.size()); }
  bool bounded() const { return !lower.empty(); }
  /// Constant bounds lo <= v <= hi on every face and step. Throws ConfigError if lo > hi.
  void set_box(double lo, double hi);
  /// Throws ConfigError if the bounds are malformed (shape, lower > upper).
  void check_bounds() const;

  ControlField& axpy(double a, const ControlField& x);
  ControlField& operator*=(double a);
};

/// L2(Q) inner product sum_n dt <a^n, b^n>_faces.
double dot(const ControlField& a, const ControlField& b, double dt);
double norm(const ControlField& a, double dt);

}  // namespace nchs
