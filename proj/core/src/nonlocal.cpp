#include "nchs/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "nchs/error.hpp"

namespace nchs {

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::exp_decay: return "exp-decay";
    case KernelFamily::regularized_newtonian: return "regularized-newtonian";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "exp-decay") return KernelFamily::exp_decay;
  if (name == "regularized-newtonian") return KernelFamily::regularized_newtonian;
  throw ConfigError("unknown kernel family '" + name + "' (valid: gaussian, exp-decay, regularized-newtonian)");
}

double Kernel::profile(double r, double rr) const {
  switch (family) {
    case KernelFamily::gaussian: return amplitude * std::exp(-r * r / (2.0 * length * length));
    case KernelFamily::exp_decay: return amplitude * std::exp(-r / length);
    case KernelFamily::regularized_newtonian: return -amplitude * std::log(std::max(r, rr) / length);
  }
  return 0.0;
}

double Kernel::profile_d1(double r, double rr) const {
  switch (family) {
    case KernelFamily::gaussian: return -amplitude * r / (length * length) * std::exp(-r * r / (2.0 * length * length));
    case KernelFamily::exp_decay: return -amplitude / length * std::exp(-r / length);
    // The default core radius sits exactly on the nearest face offset; take the outer slope there.
    case KernelFamily::regularized_newtonian: return r >= rr * (1.0 - 1e-12) ? -amplitude / r : 0.0;
  }
  return 0.0;
}

namespace {

// out[o] = sum_i T[o - i + (Ni - 1)] in[i] on 2D row-major arrays, by zero-padded FFT.
// The table spans every offset between an output and an input point, so the circular
// convolution of size (No + Ni - 1) never wraps.
class ToeplitzOperator {
 public:
  ToeplitzOperator(int in_nx, int in_ny, int out_nx, int out_ny, const OffsetTable& table)
      : in_nx_(in_nx), in_ny_(in_ny), out_nx_(out_nx), out_ny_(out_ny),
        fft_(out_nx + in_nx - 1, out_ny + in_ny - 1) {
    const int lx = fft_.px(), ly = fft_.py();
    if (table.nx != lx || table.ny != ly) throw SolverError("ToeplitzOperator: table extent mismatch");
    auto buf = detail::alloc_real(fft_.real_size());
    forward_spectrum_ = detail::alloc_complex(fft_.spectral_size());
    reverse_spectrum_ = detail::alloc_complex(fft_.spectral_size());
    std::copy(table.values.begin(), table.values.end(), buf.get());
    fft_.forward(buf.get(), forward_spectrum_.get());
    for (int ty = 0; ty < ly; ++ty)
      for (int tx = 0; tx < lx; ++tx)
        buf[std::size_t(ty) * lx + tx] = table.values[std::size_t(ly - 1 - ty) * lx + (lx - 1 - tx)];
    fft_.forward(buf.get(), reverse_spectrum_.get());
  }

  void apply(const double* in, double* out) const {
    run(in, in_nx_, in_ny_, out, out_nx_, out_ny_, forward_spectrum_.get());
  }
  void apply_transpose(const double* in, double* out) const {
    run(in, out_nx_, out_ny_, out, in_nx_, in_ny_, reverse_spectrum_.get());
  }

 private:
  void run(const double* in, int nix, int niy, double* out, int nox, int noy, const fftw_complex* spec) const {
    const int lx = fft_.px();
    auto a = detail::alloc_real(fft_.real_size());
    auto s = detail::alloc_complex(fft_.spectral_size());
    std::fill(a.get(), a.get() + fft_.real_size(), 0.0);
    for (int j = 0; j < niy; ++j)
      for (int i = 0; i < nix; ++i) a[std::size_t(j) * lx + i] = in[std::size_t(j) * nix + i];
    fft_.forward(a.get(), s.get());
    for (std::size_t k = 0; k < fft_.spectral_size(); ++k) {
      const double re = s[k][0] * spec[k][0] - s[k][1] * spec[k][1];
      const double im = s[k][0] * spec[k][1] + s[k][1] * spec[k][0];
      s[k][0] = re;
      s[k][1] = im;
    }
    fft_.backward(s.get(), a.get());
    const double scale = 1.0 / double(fft_.real_size());
    for (int j = 0; j < noy; ++j)
      for (int i = 0; i < nox; ++i)
        out[std::size_t(j) * nox + i] = a[std::size_t(j + niy - 1) * lx + (i + nix - 1)] * scale;
  }

  int in_nx_, in_ny_, out_nx_, out_ny_;
  detail::RealFft2D fft_;
  detail::ComplexBuffer forward_spectrum_, reverse_spectrum_;
};

template <class F>
OffsetTable sample_table(int ext_x, int ext_y, int origin_x, int origin_y, F&& f) {
  OffsetTable t{ext_x, ext_y, origin_x, origin_y, std::vector<double>(std::size_t(ext_x) * ext_y)};
  for (int ty = 0; ty < ext_y; ++ty)
    for (int tx = 0; tx < ext_x; ++tx) t.values[std::size_t(ty) * ext_x + tx] = f(tx - origin_x, ty - origin_y);
  return t;
}

}  // namespace

struct DiscreteKernel::Impl {
  Grid grid;
  std::optional<Kernel> kernel;
  double core_radius = 0.0;
  OffsetTable scalar, gcx, gcy, gfx, gfy;
  std::unique_ptr<ToeplitzOperator> op_scalar, op_gcx, op_gcy, op_gfx, op_gfy;

  void make_operators() {
    const int nx = grid.nx(), ny = grid.ny();
    op_scalar = std::make_unique<ToeplitzOperator>(nx, ny, nx, ny, scalar);
    op_gcx = std::make_unique<ToeplitzOperator>(nx, ny, nx, ny, gcx);
    op_gcy = std::make_unique<ToeplitzOperator>(nx, ny, nx, ny, gcy);
    op_gfx = std::make_unique<ToeplitzOperator>(nx, ny, nx + 1, ny, gfx);
    op_gfy = std::make_unique<ToeplitzOperator>(nx, ny, nx, ny + 1, gfy);
  }
};

DiscreteKernel DiscreteKernel::build(const Kernel& kernel, const Grid& grid) {
  auto impl = std::make_shared<Impl>();
  impl->grid = grid;
  impl->kernel = kernel;
  const int nx = grid.nx(), ny = grid.ny();
  const double hx = grid.hx(), hy = grid.hy(), vol = grid.cell_volume();
  const double rr = kernel.r_reg.value_or(0.5 * std::min(hx, hy));
  if (kernel.family == KernelFamily::regularized_newtonian && !(rr > 0.0))
    throw SolverError("kernel build: non-finite samples (regularized-newtonian needs r_reg > 0)");
  impl->core_radius = rr;

  auto value = [&](double dx, double dy) { return kernel.profile(std::hypot(dx, dy), rr) * vol; };
  auto grad = [&](double dx, double dy, bool xcomp) {
    const double r = std::hypot(dx, dy);
    if (r == 0.0) return 0.0;
    return kernel.profile_d1(r, rr) * (xcomp ? dx : dy) / r * vol;
  };

  impl->scalar = sample_table(2 * nx - 1, 2 * ny - 1, nx - 1, ny - 1,
                              [&](int k, int l) { return value(k * hx, l * hy); });
  impl->gcx = sample_table(2 * nx - 1, 2 * ny - 1, nx - 1, ny - 1,
                           [&](int k, int l) { return grad(k * hx, l * hy, true); });
  impl->gcy = sample_table(2 * nx - 1, 2 * ny - 1, nx - 1, ny - 1,
                           [&](int k, int l) { return grad(k * hx, l * hy, false); });
  impl->gfx = sample_table(2 * nx, 2 * ny - 1, nx - 1, ny - 1,
                           [&](int k, int l) { return grad((k - 0.5) * hx, l * hy, true); });
  impl->gfy = sample_table(2 * nx - 1, 2 * ny, nx - 1, ny - 1,
                           [&](int k, int l) { return grad(k * hx, (l - 0.5) * hy, false); });

  for (const OffsetTable* t : {&impl->scalar, &impl->gcx, &impl->gcy, &impl->gfx, &impl->gfy})
    for (double v : t->values)
      if (!std::isfinite(v)) throw SolverError("kernel build: non-finite samples (unregularized singular core)");

  impl->make_operators();
  DiscreteKernel dk;
  dk.impl_ = std::move(impl);
  return dk;
}

DiscreteKernel DiscreteKernel::from_scalar_table(const Grid& grid, OffsetTable table) {
  const int nx = grid.nx(), ny = grid.ny();
  if (table.nx != 2 * nx - 1 || table.ny != 2 * ny - 1 || table.origin_x != nx - 1 || table.origin_y != ny - 1)
    throw SolverError("from_scalar_table: table extent mismatch");
  auto impl = std::make_shared<Impl>();
  impl->grid = grid;
  impl->scalar = std::move(table);
  auto zeros = [](int ex, int ey, int ox, int oy) {
    return OffsetTable{ex, ey, ox, oy, std::vector<double>(std::size_t(ex) * ey, 0.0)};
  };
  impl->gcx = zeros(2 * nx - 1, 2 * ny - 1, nx - 1, ny - 1);
  impl->gcy = impl->gcx;
  impl->gfx = zeros(2 * nx, 2 * ny - 1, nx - 1, ny - 1);
  impl->gfy = zeros(2 * nx - 1, 2 * ny, nx - 1, ny - 1);
  impl->make_operators();
  DiscreteKernel dk;
  dk.impl_ = std::move(impl);
  return dk;
}

const Grid& DiscreteKernel::grid() const { return impl_->grid; }
const std::optional<Kernel>& DiscreteKernel::kernel() const { return impl_->kernel; }
double DiscreteKernel::core_radius() const { return impl_->core_radius; }
const OffsetTable& DiscreteKernel::scalar_table() const { return impl_->scalar; }
const OffsetTable& DiscreteKernel::grad_center_x() const { return impl_->gcx; }
const OffsetTable& DiscreteKernel::grad_center_y() const { return impl_->gcy; }
const OffsetTable& DiscreteKernel::grad_xface() const { return impl_->gfx; }
const OffsetTable& DiscreteKernel::grad_yface() const { return impl_->gfy; }

ScalarField conv_scalar(const DiscreteKernel& dk, const ScalarField& phi) {
  require_same_grid(dk.grid(), phi.grid(), "conv_scalar");
  ScalarField out(phi.grid());
  dk.impl().op_scalar->apply(phi.values().data(), out.values().data());
  return out;
}

VectorField conv_grad(const DiscreteKernel& dk, const ScalarField& phi) {
  require_same_grid(dk.grid(), phi.grid(), "conv_grad");
  VectorField out(phi.grid());
  dk.impl().op_gfx->apply(phi.values().data(), out.xs().data());
  dk.impl().op_gfy->apply(phi.values().data(), out.ys().data());
  return out;
}

CenterGradient conv_grad_center(const DiscreteKernel& dk, const ScalarField& phi) {
  require_same_grid(dk.grid(), phi.grid(), "conv_grad_center");
  CenterGradient out{ScalarField(phi.grid()), ScalarField(phi.grid())};
  dk.impl().op_gcx->apply(phi.values().data(), out.x.values().data());
  dk.impl().op_gcy->apply(phi.values().data(), out.y.values().data());
  return out;
}

ScalarField conv_grad_dot(const DiscreteKernel& dk, const VectorField& w) {
  const Grid& g = dk.grid();
  require_same_grid(g, w.grid(), "conv_grad_dot");
  VectorField weighted = w;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i) weighted.x(i, j) *= xface_weight(g, i);
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) weighted.y(i, j) *= yface_weight(g, j);
  // grad K(x_c - y_f) = -grad K(y_f - x_c): the transposed face tables with a sign flip.
  ScalarField a(g), b(g);
  dk.impl().op_gfx->apply_transpose(weighted.xs().data(), a.values().data());
  dk.impl().op_gfy->apply_transpose(weighted.ys().data(), b.values().data());
  a += b;
  a *= -1.0;
  return a;
}

double self_adjointness_check(const DiscreteKernel& dk, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Grid& g = dk.grid();
  double worst = 0.0;
  for (int t = 0; t < std::max(trials, 1); ++t) {
    ScalarField a(g), b(g);
    for (double& v : a.values()) v = normal(rng);
    for (double& v : b.values()) v = normal(rng);
    const double defect = std::abs(dot(conv_scalar(dk, a), b) - dot(a, conv_scalar(dk, b)));
    worst = std::max(worst, defect / (norm(a) * norm(b)));
  }
  return worst;
}

namespace {

ScalarField smooth_random_field(const Grid& g, std::mt19937_64& rng, int modes) {
  std::normal_distribution<double> normal;
  ScalarField psi(g);
  for (int l = 0; l <= modes; ++l)
    for (int k = 0; k <= modes; ++k) {
      const double a = normal(rng);
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
          psi(i, j) += a * std::cos(k * std::numbers::pi * g.xc(i) / g.lx()) *
                       std::cos(l * std::numbers::pi * g.yc(j) / g.ly());
    }
  return psi;
}

// Centered differences inside, one-sided at the wall.
double diff_x(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid();
  if (i == 0) return (f(1, j) - f(0, j)) / g.hx();
  if (i == g.nx() - 1) return (f(i, j) - f(i - 1, j)) / g.hx();
  return (f(i + 1, j) - f(i - 1, j)) / (2.0 * g.hx());
}

double diff_y(const ScalarField& f, int i, int j) {
  const Grid& g = f.grid();
  if (j == 0) return (f(i, 1) - f(i, 0)) / g.hy();
  if (j == g.ny() - 1) return (f(i, j) - f(i, j - 1)) / g.hy();
  return (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.hy());
}

double lp_norm(const std::vector<double>& pointwise, double p, double vol) {
  double s = 0.0;
  for (double v : pointwise) s += std::pow(std::abs(v), p);
  return std::pow(s * vol, 1.0 / p);
}

}  // namespace

std::vector<ProbeEstimate> admissibility_probe(const DiscreteKernel& dk, const std::vector<double>& p_list,
                                               int trials, std::uint64_t seed) {
  const Grid& g = dk.grid();
  std::vector<ProbeEstimate> out;
  for (double p : p_list) out.push_back({p, 0.0});
  std::mt19937_64 rng(seed);
  for (int t = 0; t < std::max(trials, 10); ++t) {
    const ScalarField psi = smooth_random_field(g, rng, 4);
    const CenterGradient gk = conv_grad_center(dk, psi);
    std::vector<double> hess(g.cell_count());
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double a = diff_x(gk.x, i, j), b = diff_y(gk.x, i, j);
        const double c = diff_x(gk.y, i, j), d = diff_y(gk.y, i, j);
        hess[g.cell(i, j)] = std::sqrt(a * a + b * b + c * c + d * d);
      }
    for (auto& e : out) {
      const double denom = lp_norm({psi.values().begin(), psi.values().end()}, e.p, g.cell_volume());
      if (denom > 0.0) e.estimate = std::max(e.estimate, lp_norm(hess, e.p, g.cell_volume()) / denom);
    }
  }
  return out;
}

RefinementReport admissibility_refinement(const Kernel& kernel, const Grid& coarse, const Grid& fine,
                                          const std::vector<double>& p_list, int trials, std::uint64_t seed,
                                          double tolerance) {
  RefinementReport r;
  r.coarse = admissibility_probe(DiscreteKernel::build(kernel, coarse), p_list, trials, seed);
  r.fine = admissibility_probe(DiscreteKernel::build(kernel, fine), p_list, trials, seed);
  r.stable = true;
  for (std::size_t k = 0; k < p_list.size(); ++k) {
    const double a = r.coarse[k].estimate, b = r.fine[k].estimate;
    const double change = std::abs(b - a) / std::max(std::abs(a), 1e-300);
    r.relative_change.push_back(change);
    if (!(change <= tolerance)) r.stable = false;
  }
  return r;
}

}  // namespace nchs
