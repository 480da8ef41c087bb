#pragma once

#include <cstdint>

#include "nchs/grid.hpp"

namespace nchs {

/// A band of phase +amplitude (outside -amplitude) around y = ly/2 whose centreline carries
/// a sinusoidal perturbation; tanh profile of thickness `interface`.
struct StripeSpec {
  double amplitude = 0.8;
  double half_width = 0.25;   ///< fraction of ly
  double interface = 0.05;    ///< tanh length scale, absolute
  double perturbation = 0.05; ///< centreline displacement, fraction of ly
  int wavenumber = 1;
};

ScalarField stripe(const Grid& grid, const StripeSpec& spec = {});
ScalarField pure_phase(const Grid& grid, double sign);
/// Uniform noise mean +- amplitude from std::mt19937_64(seed).
ScalarField random_seeded(const Grid& grid, std::uint64_t seed, double mean = 0.0, double amplitude = 0.5);

/// Discrete curl of the corner streamfunction amplitude * sin^2(pi x/lx) sin^2(pi y/ly):
/// exactly divergence free and zero on the wall.
VectorField vortex(const Grid& grid, double amplitude);

}  // namespace nchs
