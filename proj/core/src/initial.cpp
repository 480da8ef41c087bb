#include "nchs/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nchs/error.hpp"
#include "nchs/operators.hpp"

namespace nchs {

ScalarField stripe(const Grid& grid, const StripeSpec& spec) {
  if (!(spec.amplitude >= 0.0 && spec.amplitude <= 1.0)) throw ConfigError("stripe: amplitude must lie in [0,1]");
  if (!(spec.interface > 0.0)) throw ConfigError("stripe: interface width must be positive");
  ScalarField phi(grid);
  const double pi = std::numbers::pi;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const double centre =
          grid.ly() * (0.5 + spec.perturbation * std::sin(2.0 * pi * spec.wavenumber * grid.xc(i) / grid.lx()));
      const double d = spec.half_width * grid.ly() - std::abs(grid.yc(j) - centre);
      phi(i, j) = spec.amplitude * std::tanh(d / spec.interface);
    }
  return phi;
}

ScalarField pure_phase(const Grid& grid, double sign) { return ScalarField(grid, sign < 0.0 ? -1.0 : 1.0); }

ScalarField random_seeded(const Grid& grid, std::uint64_t seed, double mean, double amplitude) {
  if (std::abs(mean) + std::abs(amplitude) > 1.0) throw ConfigError("random-seeded: |mean| + amplitude must be <= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField phi(grid);
  for (double& v : phi.values()) v = mean + amplitude * dist(rng);
  return phi;
}

VectorField vortex(const Grid& grid, double amplitude) {
  const StreamfunctionBasis basis(grid);
  Vector psi(basis.size());
  const double pi = std::numbers::pi;
  for (int j = 1; j < grid.ny(); ++j)
    for (int i = 1; i < grid.nx(); ++i) {
      const double sx = std::sin(pi * i / grid.nx()), sy = std::sin(pi * j / grid.ny());
      psi[(j - 1) * (grid.nx() - 1) + (i - 1)] = amplitude * sx * sx * sy * sy;
    }
  return basis.velocity(psi);
}

}  // namespace nchs
