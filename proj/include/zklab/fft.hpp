#pragma once

#include <complex>
#include <memory>

namespace zklab {

using cplx = std::complex<double>;

// 2D real transform on an n x n grid. Spectral side is the half spectrum
// n x (n/2+1) in FFTW order. forward() carries the 1/n^2 factor, so
// u(x) = sum_k uhat(k) e^{i k.x} and backward() is the plain synthesis.
class RealFft2 {
 public:
  explicit RealFft2(int n);
  ~RealFft2();
  RealFft2(const RealFft2&) = delete;
  RealFft2& operator=(const RealFft2&) = delete;

  int n() const { return n_; }
  int half_cols() const { return n_ / 2 + 1; }
  std::size_t half_size() const {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(half_cols());
  }

  void forward(const double* in, cplx* out);
  void backward(const cplx* in, double* out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// 1D complex transform of length m, unnormalized, sign -1 (forward).
class ComplexFft1 {
 public:
  explicit ComplexFft1(int m);
  ~ComplexFft1();
  ComplexFft1(const ComplexFft1&) = delete;
  ComplexFft1& operator=(const ComplexFft1&) = delete;
  void forward(const cplx* in, cplx* out);
  void backward(const cplx* in, cplx* out);

 private:
  struct Impl;
  int m_;
  std::unique_ptr<Impl> impl_;
};

// Per-thread cached transform of size n.
RealFft2& real_fft(int n);

}  // namespace zklab
