#include "nchs/control.hpp"

#include <cmath>
#include <string>

#include "nchs/error.hpp"

namespace nchs {

ControlField ControlField::zeros(const Grid& grid, int steps) {
  ControlField c;
  c.values.assign(std::size_t(std::max(steps, 0)), VectorField(grid));
  return c;
}

void ControlField::set_box(double lo, double hi) {
  if (!(lo <= hi)) throw ConfigError("control bounds: lower bound exceeds upper bound");
  lower.clear();
  upper.clear();
  for (const auto& v : values) {
    lower.emplace_back(v.grid(), lo);
    upper.emplace_back(v.grid(), hi);
  }
}

void ControlField::check_bounds() const {
  if (!bounded()) return;
  if (lower.size() != values.size() || upper.size() != values.size())
    throw ConfigError("control bounds: expected one bound field per step");
  for (std::size_t n = 0; n < values.size(); ++n) {
    auto check = [&](std::span<const double> lo, std::span<const double> hi) {
      for (std::size_t k = 0; k < lo.size(); ++k)
        if (!(lo[k] <= hi[k])) throw ConfigError("control bounds: lower > upper at step " + std::to_string(n));
    };
    check(lower[n].xs(), upper[n].xs());
    check(lower[n].ys(), upper[n].ys());
  }
}

ControlField& ControlField::axpy(double a, const ControlField& x) {
  if (x.values.size() != values.size()) throw SolverError("control axpy: step count mismatch");
  for (std::size_t n = 0; n < values.size(); ++n) values[n].axpy(a, x.values[n]);
  return *this;
}

ControlField& ControlField::operator*=(double a) {
  for (auto& v : values) v *= a;
  return *this;
}

double dot(const ControlField& a, const ControlField& b, double dt) {
  if (a.values.size() != b.values.size()) throw SolverError("control dot: step count mismatch");
  double s = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) s += dot(a.values[n], b.values[n]);
  return s * dt;
}

double norm(const ControlField& a, double dt) { return std::sqrt(dot(a, a, dt)); }

}  // namespace nchs
