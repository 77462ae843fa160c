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

// Small IIR toolkit: biquad sections, cascades, and Butterworth designs.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sqm {

// Normalised second-order section
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
// A first-order section has b2 = a2 = 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double omega) const {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }

  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

  // Both poles strictly inside the unit circle (Jury conditions).
  bool stable() const {
    return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
  }
};

// Cascade of biquads run in transposed direct form II.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections)
      : sections_(std::move(sections)), state_(sections_.size()) {}

  const std::vector<Biquad>& sections() const { return sections_; }

  std::complex<double> response(double freq_hz, double sample_rate) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    std::complex<double> h = 1.0;
    for (const auto& s : sections_) h *= s.response(w);
    return h;
  }

  void reset() { state_.assign(sections_.size(), State{}); }

  // Puts every section at the steady state it would reach after an
  // infinitely long constant input `x`.
  void settle(double x) {
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      const Biquad& s = sections_[i];
      const double y = s.dc_gain() * x;
      state_[i].z2 = s.b2 * x - s.a2 * y;
      state_[i].z1 = s.b1 * x - s.a1 * y + state_[i].z2;
      x = y;
    }
  }

  double step(double x) {
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      const Biquad& s = sections_[i];
      State& st = state_[i];
      const double y = s.b0 * x + st.z1;
      st.z1 = s.b1 * x - s.a1 * y + st.z2;
      st.z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
    return x;
  }

  void process(std::span<double> x) {
    // Section-major order keeps each section's state in registers.
    for (std::size_t i = 0; i < sections_.size(); ++i) {
      const Biquad s = sections_[i];
      double z1 = state_[i].z1, z2 = state_[i].z2;
      for (double& v : x) {
        const double y = s.b0 * v + z1;
        z1 = s.b1 * v - s.a1 * y + z2;
        z2 = s.b2 * v - s.a2 * y;
        v = y;
      }
      state_[i] = {z1, z2};
    }
  }

  std::vector<double> filter(std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    process(y);
    return y;
  }

 private:
  struct State {
    double z1 = 0.0, z2 = 0.0;
  };
  std::vector<Biquad> sections_;
  std::vector<State> state_;
};

enum class FilterType { kLowPass, kHighPass };

// Digital Butterworth filter of the given order via the bilinear transform
// with frequency pre-warping. Odd orders get one first-order section.
inline std::vector<Biquad> butterworth(FilterType type, int order,
                                       double cutoff_hz, double sample_rate) {
  if (order < 1) throw std::invalid_argument("Butterworth order must be >= 1");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw std::invalid_argument("Butterworth cutoff must lie in (0, Nyquist)");
  }
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  std::vector<Biquad> out;
  for (int i = 1; i <= order / 2; ++i) {
    const double q =
        1.0 / (2.0 * std::sin((2.0 * i - 1.0) * std::numbers::pi / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k2);
    Biquad s;
    if (type == FilterType::kLowPass) {
      s.b0 = k2 * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - k / q + k2) * norm;
    out.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s;
    const double norm = 1.0 / (1.0 + k);
    if (type == FilterType::kLowPass) {
      s.b0 = k * norm;
      s.b1 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -norm;
    }
    s.a1 = (k - 1.0) * norm;
    out.push_back(s);
  }
  return out;
}

}  // namespace sqm
