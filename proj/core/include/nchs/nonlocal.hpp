#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nchs/grid.hpp"

namespace nchs {

enum class KernelFamily { gaussian, exp_decay, regularized_newtonian };

std::string to_string(KernelFamily f);
/// Throws ConfigError listing the valid families.
KernelFamily kernel_family_from_string(const std::string& name);

/// Radial interaction kernel K(x) = profile(|x|).
///   gaussian               a exp(-r^2 / (2 l^2))
///   exp-decay              a exp(-r / l)
///   regularized-newtonian  -a ln(max(r, r_reg) / l)
struct Kernel {
  KernelFamily family = KernelFamily::gaussian;
  double amplitude = 1.0;
  double length = 0.1;
  /// Core radius of the regularized Newtonian kernel; defaults to min(hx, hy)/2 at build time.
  std::optional<double> r_reg;

  double profile(double r, double rr) const;
  double profile_d1(double r, double rr) const;
};

/// A dense table indexed by lattice offsets, row-major with y slow.
struct OffsetTable {
  int nx = 0, ny = 0;          ///< table extents
  int origin_x = 0, origin_y = 0;  ///< index of the zero offset
  std::vector<double> values;
  double at(int dx, int dy) const { return values[std::size_t(dy + origin_y) * nx + (dx + origin_x)]; }
};

/// Sampled K and grad K on the grid's offset lattices (premultiplied by the cell volume),
/// with FFT plans for linear (zero-extended, non-periodic) convolution over the domain.
///
/// Tables:
///   scalar        K(x_c - y_c) for cell-to-cell offsets, (2nx-1) x (2ny-1)
///   grad_center   dK/dx, dK/dy for the same offsets
///   grad_xface    dK/dx from cells to x faces, offsets ((k - 1/2) hx, l hy)
///   grad_yface    dK/dy from cells to y faces, offsets (k hx, (l - 1/2) hy)
class DiscreteKernel {
 public:
  static DiscreteKernel build(const Kernel& kernel, const Grid& grid);
  /// A kernel from an explicit cell-to-cell table (gradient tables zero). Used to probe the
  /// checks with deliberately broken tables.
  static DiscreteKernel from_scalar_table(const Grid& grid, OffsetTable table);

  const Grid& grid() const;
  const std::optional<Kernel>& kernel() const;
  double core_radius() const;
  const OffsetTable& scalar_table() const;
  const OffsetTable& grad_center_x() const;
  const OffsetTable& grad_center_y() const;
  const OffsetTable& grad_xface() const;
  const OffsetTable& grad_yface() const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

struct CenterGradient {
  ScalarField x, y;
};

/// (K * phi)(x_i) = sum_j K(x_i - x_j) phi_j hx hy.
ScalarField conv_scalar(const DiscreteKernel& dk, const ScalarField& phi);
/// (grad K * phi) sampled on faces: x component on x faces, y component on y faces.
VectorField conv_grad(const DiscreteKernel& dk, const ScalarField& phi);
/// (grad K * phi) sampled at cell centers.
CenterGradient conv_grad_center(const DiscreteKernel& dk, const ScalarField& phi);
/// (grad K .* w)(x_c) = sum over faces f of grad K(x_c - y_f) . w_f times the face
/// quadrature weight. Satisfies <conv_grad_dot(w), chi> = -<w, conv_grad(chi)> exactly.
ScalarField conv_grad_dot(const DiscreteKernel& dk, const VectorField& w);

/// max over random pairs of |<K*a, b> - <a, K*b>| / (||a|| ||b||).
double self_adjointness_check(const DiscreteKernel& dk, int trials, std::uint64_t seed = 1);

struct ProbeEstimate {
  double p = 2.0;
  double estimate = 0.0;  ///< max over trials of ||D(grad K * psi)||_p / ||psi||_p
};

/// Empirical constants of the second-derivative bound for grad K * psi, using smooth random
/// fields psi (low cosine modes) so that the estimates are resolution independent.
std::vector<ProbeEstimate> admissibility_probe(const DiscreteKernel& dk, const std::vector<double>& p_list,
                                               int trials, std::uint64_t seed = 1);

struct RefinementReport {
  std::vector<ProbeEstimate> coarse, fine;
  std::vector<double> relative_change;
  bool stable = false;  ///< every relative change <= tolerance
};

RefinementReport admissibility_refinement(const Kernel& kernel, const Grid& coarse, const Grid& fine,
                                          const std::vector<double>& p_list, int trials,
                                          std::uint64_t seed = 1, double tolerance = 0.25);

}  // namespace nchs
