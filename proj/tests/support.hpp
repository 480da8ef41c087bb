#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "nchs/forward.hpp"
#include "nchs/grid.hpp"
#include "nchs/nonlocal.hpp"
#include "nchs/operators.hpp"

namespace nchs::test {

inline ScalarField random_scalar(const Grid& g, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  ScalarField f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

inline VectorField random_vector(const Grid& g, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> d(-amp, amp);
  VectorField w(g);
  for (auto& v : w.xs()) v = d(rng);
  for (auto& v : w.ys()) v = d(rng);
  return w;
}

inline VectorField random_solenoidal(const Grid& g, std::mt19937_64& rng) {
  return leray_project(random_vector(g, rng));
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }
inline double max_diff(const VectorField& a, const VectorField& b) { return max_abs(a - b); }

/// Brute-force (K * phi) and (grad K * phi) from the analytic profile.
inline double kernel_at(const Kernel& k, double dx, double dy, double rr) {
  return k.profile(std::hypot(dx, dy), rr);
}

inline double kernel_dx(const Kernel& k, double dx, double dy, double rr) {
  const double r = std::hypot(dx, dy);
  return r == 0.0 ? 0.0 : k.profile_d1(r, rr) * dx / r;
}

inline ScalarField direct_conv(const Kernel& k, double rr, const ScalarField& phi) {
  const Grid& g = phi.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      for (int l = 0; l < g.ny(); ++l)
        for (int m = 0; m < g.nx(); ++m) s += kernel_at(k, g.xc(i) - g.xc(m), g.yc(j) - g.yc(l), rr) * phi(m, l);
      out(i, j) = s * g.cell_volume();
    }
  return out;
}

inline VectorField direct_conv_grad(const Kernel& k, double rr, const ScalarField& phi) {
  const Grid& g = phi.grid();
  VectorField out(g);
  auto sum_at = [&](double x, double y, bool along_x) {
    double s = 0.0;
    for (int l = 0; l < g.ny(); ++l)
      for (int m = 0; m < g.nx(); ++m) {
        const double dx = x - g.xc(m), dy = y - g.yc(l);
        s += (along_x ? kernel_dx(k, dx, dy, rr) : kernel_dx(k, dy, dx, rr)) * phi(m, l);
      }
    return s * g.cell_volume();
  };
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) out.x(i, j) = sum_at(i * g.hx(), g.yc(j), true);
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out.y(i, j) = sum_at(g.xc(i), j * g.hy(), false);
  return out;
}

}  // namespace nchs::test
