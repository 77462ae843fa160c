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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sqm {

inline constexpr double kReferencePressurePa = 20e-6;
inline constexpr double kDefaultSampleRate = 44100.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Thrown when a metric is undefined because its input carries no energy.
class SilentInputError : public std::domain_error {
 public:
  explicit SilentInputError(const std::string& what) : std::domain_error(what) {}
};

inline double db_to_pressure_rms(double level_db_spl) {
  return kReferencePressurePa * std::pow(10.0, level_db_spl / 20.0);
}

inline double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  long double acc = 0.0L;
  for (double v : x) acc += static_cast<long double>(v) * v;
  return std::sqrt(static_cast<double>(acc / x.size()));
}

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  long double acc = 0.0L;
  for (double v : x) acc += v;
  return static_cast<double>(acc / x.size());
}

// Sound-pressure waveform in pascals at a fixed sample rate.
//
// Values are immutable once constructed; processing stages return new
// signals.
class CalibratedSignal {
 public:
  CalibratedSignal() = default;
  CalibratedSignal(std::vector<double> samples_pa, double sample_rate)
      : samples_(std::move(samples_pa)), sample_rate_(sample_rate) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
      throw std::invalid_argument("sample rate must be positive");
    }
    for (double v : samples_) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("signal samples must be finite");
      }
    }
  }

  std::span<const double> samples() const { return samples_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_s() const { return samples_.size() / sample_rate_; }

  double rms_pa() const { return rms(samples_); }

  // 20 log10(p_rms / 20 uPa). Silence maps to -infinity.
  double spl_db() const {
    const double p = rms_pa();
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(p / kReferencePressurePa);
  }

  CalibratedSignal scaled(double gain) const {
    std::vector<double> out(samples_);
    for (double& v : out) v *= gain;
    return CalibratedSignal(std::move(out), sample_rate_);
  }

  // Copy rescaled so that the whole-signal SPL equals `level_db_spl`.
  CalibratedSignal at_spl(double level_db_spl) const {
    const double p = rms_pa();
    if (p <= 0.0) throw SilentInputError("cannot calibrate a silent signal");
    return scaled(db_to_pressure_rms(level_db_spl) / p);
  }

 private:
  std::vector<double> samples_;
  double sample_rate_ = kDefaultSampleRate;
};

// Start of the steady-state analysis window: the warm-up is discarded, but
// never more than half of a short signal.
inline std::size_t steady_start(std::size_t n, double sample_rate,
                                double warmup_s = 0.2) {
  const auto warm = static_cast<std::size_t>(std::llround(warmup_s * sample_rate));
  return std::min(warm, n / 2);
}

}  // namespace sqm
