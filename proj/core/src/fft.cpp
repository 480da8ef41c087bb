#include "fft.hpp"

#include <new>

namespace nchs::detail {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

RealBuffer alloc_real(std::size_t n) {
  auto* p = fftw_alloc_real(n == 0 ? 1 : n);
  if (p == nullptr) throw std::bad_alloc();
  return RealBuffer(p);
}

ComplexBuffer alloc_complex(std::size_t n) {
  auto* p = fftw_alloc_complex(n == 0 ? 1 : n);
  if (p == nullptr) throw std::bad_alloc();
  return ComplexBuffer(p);
}

FftwPlan& FftwPlan::operator=(FftwPlan&& other) noexcept {
  if (this != &other) {
    if (plan_ != nullptr) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    plan_ = other.plan_;
    other.plan_ = nullptr;
  }
  return *this;
}

FftwPlan::~FftwPlan() {
  if (plan_ != nullptr) {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
}

CosineTransform2D::CosineTransform2D(int nx, int ny) : nx_(nx), ny_(ny) {
  auto a = alloc_real(std::size_t(nx) * ny);
  auto b = alloc_real(std::size_t(nx) * ny);
  std::lock_guard lock(fftw_planner_mutex());
  forward_ = FftwPlan(fftw_plan_r2r_2d(ny, nx, a.get(), b.get(), FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE));
  backward_ = FftwPlan(fftw_plan_r2r_2d(ny, nx, a.get(), b.get(), FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE));
}

void CosineTransform2D::forward(const double* in, double* out) const {
  fftw_execute_r2r(forward_.get(), const_cast<double*>(in), out);
}

void CosineTransform2D::backward(const double* in, double* out) const {
  fftw_execute_r2r(backward_.get(), const_cast<double*>(in), out);
}

RealFft2D::RealFft2D(int px, int py) : px_(px), py_(py) {
  auto a = alloc_real(real_size());
  auto b = alloc_complex(spectral_size());
  std::lock_guard lock(fftw_planner_mutex());
  forward_ = FftwPlan(fftw_plan_dft_r2c_2d(py, px, a.get(), b.get(), FFTW_ESTIMATE));
  backward_ = FftwPlan(fftw_plan_dft_c2r_2d(py, px, b.get(), a.get(), FFTW_ESTIMATE));
}

void RealFft2D::forward(double* in, fftw_complex* out) const {
  fftw_execute_dft_r2c(forward_.get(), in, out);
}

void RealFft2D::backward(fftw_complex* in, double* out) const {
  fftw_execute_dft_c2r(backward_.get(), in, out);
}

}  // namespace nchs::detail
