#include "zklab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>

namespace zklab {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft2::Impl {
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

RealFft2::RealFft2(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  const std::size_t nr = static_cast<std::size_t>(n) * n;
  const std::size_t nc = static_cast<std::size_t>(n) * (n / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->real = fftw_alloc_real(nr);
  impl_->freq = fftw_alloc_complex(nc);
  impl_->fwd = fftw_plan_dft_r2c_2d(n, n, impl_->real, impl_->freq, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_c2r_2d(n, n, impl_->freq, impl_->real, FFTW_ESTIMATE);
}

RealFft2::~RealFft2() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->real);
  fftw_free(impl_->freq);
}

void RealFft2::forward(const double* in, cplx* out) {
  const std::size_t nr = static_cast<std::size_t>(n_) * n_;
  std::copy(in, in + nr, impl_->real);
  fftw_execute(impl_->fwd);
  const double scale = 1.0 / static_cast<double>(nr);
  const auto* s = reinterpret_cast<const cplx*>(impl_->freq);
  for (std::size_t i = 0, nc = half_size(); i < nc; ++i) out[i] = s[i] * scale;
}

void RealFft2::backward(const cplx* in, double* out) {
  std::memcpy(impl_->freq, in, half_size() * sizeof(cplx));
  fftw_execute(impl_->bwd);
  const std::size_t nr = static_cast<std::size_t>(n_) * n_;
  std::copy(impl_->real, impl_->real + nr, out);
}

RealFft2& real_fft(int n) {
  thread_local std::map<int, std::unique_ptr<RealFft2>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft2>(n);
  return *slot;
}

struct ComplexFft1::Impl {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

ComplexFft1::ComplexFft1(int m) : m_(m), impl_(std::make_unique<Impl>()) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->buf = fftw_alloc_complex(static_cast<std::size_t>(m));
  impl_->fwd = fftw_plan_dft_1d(m, impl_->buf, impl_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_1d(m, impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft1::~ComplexFft1() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->buf);
}

void ComplexFft1::forward(const cplx* in, cplx* out) {
  std::memcpy(impl_->buf, in, static_cast<std::size_t>(m_) * sizeof(cplx));
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out), impl_->buf, static_cast<std::size_t>(m_) * sizeof(cplx));
}

void ComplexFft1::backward(const cplx* in, cplx* out) {
  std::memcpy(impl_->buf, in, static_cast<std::size_t>(m_) * sizeof(cplx));
  fftw_execute(impl_->bwd);
  std::memcpy(static_cast<void*>(out), impl_->buf, static_cast<std::size_t>(m_) * sizeof(cplx));
}

}  // namespace zklab
