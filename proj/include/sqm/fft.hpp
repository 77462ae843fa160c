// Copyright 2026 The sqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstring>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

namespace sqm {

using Complex = std::complex<double>;

// Smallest n' >= n whose only prime factors are 2, 3, 5 and 7.
inline std::size_t fast_fft_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

// Real <-> half-spectrum transform of a fixed length backed by FFTW.
//
// Not thread-safe: FFTW planning and the internal buffers are shared state.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("FFT size must be positive");
    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins()));
    if (real_ == nullptr || spec_ == nullptr) {
      release();
      throw std::bad_alloc();
    }
    const int len = static_cast<int>(n_);
    forward_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() { release(); }

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // Zero-pads (or truncates) `x` to the transform length.
  std::vector<Complex> forward(std::span<const double> x) {
    const std::size_t m = std::min(x.size(), n_);
    std::copy_n(x.begin(), m, real_);
    std::fill(real_ + m, real_ + n_, 0.0);
    fftw_execute(forward_);
    std::vector<Complex> out(bins());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = Complex(spec_[i][0], spec_[i][1]);
    }
    return out;
  }

  // Inverse transform including the 1/n normalisation.
  std::vector<double> inverse(std::span<const Complex> spectrum) {
    if (spectrum.size() != bins()) {
      throw std::invalid_argument("spectrum size does not match FFT size");
    }
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      spec_[i][0] = spectrum[i].real();
      spec_[i][1] = spectrum[i].imag();
    }
    fftw_execute(inverse_);
    std::vector<double> out(real_, real_ + n_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (double& v : out) v *= scale;
    return out;
  }

 private:
  void release() {
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (inverse_ != nullptr) fftw_destroy_plan(inverse_);
    if (real_ != nullptr) fftw_free(real_);
    if (spec_ != nullptr) fftw_free(spec_);
    forward_ = inverse_ = nullptr;
    real_ = nullptr;
    spec_ = nullptr;
  }

  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

// Complex <-> complex transform of a fixed length.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("FFT size must be positive");
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    if (in_ == nullptr || out_ == nullptr) {
      release();
      throw std::bad_alloc();
    }
    const int len = static_cast<int>(n_);
    forward_ = fftw_plan_dft_1d(len, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_1d(len, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;
  ~ComplexFft() { release(); }

  std::size_t size() const { return n_; }

  // Inverse transform including the 1/n normalisation.
  std::vector<Complex> inverse(std::span<const Complex> x) {
    return run(x, inverse_, 1.0 / static_cast<double>(n_));
  }
  std::vector<Complex> forward(std::span<const Complex> x) {
    return run(x, forward_, 1.0);
  }

 private:
  std::vector<Complex> run(std::span<const Complex> x, fftw_plan plan,
                           double scale) {
    if (x.size() != n_) throw std::invalid_argument("FFT input size mismatch");
    std::memcpy(in_, x.data(), sizeof(fftw_complex) * n_);
    fftw_execute(plan);
    std::vector<Complex> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = Complex(out_[i][0] * scale, out_[i][1] * scale);
    }
    return out;
  }

  void release() {
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (inverse_ != nullptr) fftw_destroy_plan(inverse_);
    if (in_ != nullptr) fftw_free(in_);
    if (out_ != nullptr) fftw_free(out_);
    forward_ = inverse_ = nullptr;
    in_ = out_ = nullptr;
  }

  std::size_t n_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

// Linear convolution of `x` with `h`, truncated to x.size() samples.
inline std::vector<double> fft_convolve_causal(std::span<const double> x,
                                               std::span<const double> h) {
  if (x.empty() || h.empty()) return std::vector<double>(x.size(), 0.0);
  RealFft fft(fast_fft_size(x.size() + h.size() - 1));
  auto xs = fft.forward(x);
  const auto hs = fft.forward(h);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= hs[i];
  auto y = fft.inverse(xs);
  y.resize(x.size());
  return y;
}

}  // namespace sqm
