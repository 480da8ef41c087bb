#pragma once

// Thin RAII layer over FFTW. Plans are created once (the FFTW planner is not
// re-entrant, so creation is serialized) and executed with the new-array
// interface on per-call buffers, which FFTW guarantees to be thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>

namespace nchs::detail {

std::mutex& fftw_planner_mutex();

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t n);
ComplexBuffer alloc_complex(std::size_t n);

class FftwPlan {
 public:
  FftwPlan() = default;
  explicit FftwPlan(fftw_plan plan) : plan_(plan) {}
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  FftwPlan(FftwPlan&& other) noexcept : plan_(other.plan_) { other.plan_ = nullptr; }
  FftwPlan& operator=(FftwPlan&& other) noexcept;
  ~FftwPlan();

  fftw_plan get() const { return plan_; }

 private:
  fftw_plan plan_ = nullptr;
};

/// Real 2D cosine transforms (DCT-II forward, DCT-III backward) on an ny x nx array.
class CosineTransform2D {
 public:
  CosineTransform2D(int nx, int ny);
  void forward(const double* in, double* out) const;
  void backward(const double* in, double* out) const;

 private:
  int nx_, ny_;
  FftwPlan forward_, backward_;
};

/// Real-to-complex 2D FFT pair on a py x px array.
class RealFft2D {
 public:
  RealFft2D(int px, int py);
  int px() const { return px_; }
  int py() const { return py_; }
  std::size_t real_size() const { return std::size_t(px_) * py_; }
  std::size_t spectral_size() const { return std::size_t(px_ / 2 + 1) * py_; }
  void forward(double* in, fftw_complex* out) const;
  void backward(fftw_complex* in, double* out) const;

 private:
  int px_, py_;
  FftwPlan forward_, backward_;
};

}  // namespace nchs::detail
