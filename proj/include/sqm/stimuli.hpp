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

// Calibrated test signals: tones, AM/FM tones and band-limited noise.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqm/fft.hpp"
#include "sqm/signal.hpp"

namespace sqm {

enum class StimulusKind { kSine, kAm, kFm, kNbNoise, kHpNoise, kLpNoise };

inline const char* to_string(StimulusKind kind) {
  switch (kind) {
    case StimulusKind::kSine: return "sine";
    case StimulusKind::kAm: return "am";
    case StimulusKind::kFm: return "fm";
    case StimulusKind::kNbNoise: return "nb-noise";
    case StimulusKind::kHpNoise: return "hp-noise";
    case StimulusKind::kLpNoise: return "lp-noise";
  }
  return "?";
}

struct StimulusSpec {
  StimulusKind kind = StimulusKind::kSine;
  double carrier_hz = 1000.0;
  double mod_freq_hz = 0.0;
  double mod_depth = 0.0;  // AM, fraction in [0, 1]
  double freq_deviation_hz = 0.0;
  double center_hz = 0.0;  // NB noise
  double bandwidth_hz = 0.0;
  double low_cut_hz = 0.0;  // HP/LP noise band edges
  double high_cut_hz = 0.0;
  double duration_s = 1.0;
  double level_db_spl = 60.0;
  std::uint64_t seed = 0;
  double sample_rate = kDefaultSampleRate;
};

namespace detail {

inline std::size_t sample_count(double duration_s, double sample_rate) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw std::invalid_argument("duration must be positive");
  }
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (n == 0) throw std::invalid_argument("duration shorter than one sample");
  return n;
}

inline void check_frequency(double f_hz, double sample_rate, const char* what) {
  if (!(f_hz > 0.0) || !(f_hz < sample_rate / 2.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, Nyquist)");
  }
}

}  // namespace detail

inline CalibratedSignal gen_sine(double freq_hz, double duration_s, double level_db_spl,
                                 double sample_rate = kDefaultSampleRate) {
  detail::check_frequency(freq_hz, sample_rate, "tone frequency");
  const std::size_t n = detail::sample_count(duration_s, sample_rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    x[i] = std::sin(kTwoPi * freq_hz * t);
  }
  return CalibratedSignal(std::move(x), sample_rate).at_spl(level_db_spl);
}

// (1 + depth cos(2 pi f_mod t)) sin(2 pi f_c t), calibrated on the whole
// signal.
inline CalibratedSignal gen_am(double carrier_hz, double mod_freq_hz, double depth,
                               double duration_s, double level_db_spl,
                               double sample_rate = kDefaultSampleRate) {
  if (!(depth >= 0.0 && depth <= 1.0)) {
    throw std::invalid_argument("modulation depth must lie in [0, 1]");
  }
  detail::check_frequency(carrier_hz, sample_rate, "carrier frequency");
  if (!(mod_freq_hz >= 0.0)) throw std::invalid_argument("modulation frequency must be >= 0");
  const std::size_t n = detail::sample_count(duration_s, sample_rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double env = 1.0 + depth * std::cos(kTwoPi * mod_freq_hz * t);
    x[i] = env * std::sin(kTwoPi * carrier_hz * t);
  }
  return CalibratedSignal(std::move(x), sample_rate).at_spl(level_db_spl);
}

// Instantaneous frequency f_c + deviation cos(2 pi f_mod t).
inline CalibratedSignal gen_fm(double carrier_hz, double mod_freq_hz, double deviation_hz,
                               double duration_s, double level_db_spl,
                               double sample_rate = kDefaultSampleRate) {
  if (!(deviation_hz >= 0.0)) throw std::invalid_argument("frequency deviation must be >= 0");
  if (!(carrier_hz - deviation_hz > 0.0) ||
      !(carrier_hz + deviation_hz < sample_rate / 2.0)) {
    throw std::invalid_argument("instantaneous frequency leaves (0, Nyquist)");
  }
  if (deviation_hz > 0.0 && !(mod_freq_hz > 0.0)) {
    throw std::invalid_argument("FM needs a positive modulation frequency");
  }
  const double beta = deviation_hz > 0.0 ? deviation_hz / mod_freq_hz : 0.0;
  const std::size_t n = detail::sample_count(duration_s, sample_rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double phase = kTwoPi * carrier_hz * t;
    if (beta != 0.0) phase += beta * std::sin(kTwoPi * mod_freq_hz * t);
    x[i] = std::sin(phase);
  }
  return CalibratedSignal(std::move(x), sample_rate).at_spl(level_db_spl);
}

// Critical bandwidth (Hz) around f_hz, used as the narrow-band noise width.
inline double critical_bandwidth(double f_hz) {
  const double k = f_hz / 1000.0;
  return 25.0 + 75.0 * std::pow(1.0 + 1.4 * k * k, 0.69);
}

// Unit-variance white Gaussian noise. Uniform draws use the top 53 bits of
// mt19937_64 so the sequence is identical on every platform.
inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; i += 2) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    x[i] = r * std::cos(kTwoPi * u2);
    if (i + 1 < n) x[i + 1] = r * std::sin(kTwoPi * u2);
  }
  return x;
}

// White noise restricted to [low_hz, high_hz] by zeroing all other DFT bins.
inline CalibratedSignal band_noise(double low_hz, double high_hz, double duration_s,
                                   double level_db_spl, std::uint64_t seed,
                                   double sample_rate = kDefaultSampleRate) {
  if (!(low_hz >= 0.0) || !(high_hz > low_hz) || !(high_hz <= sample_rate / 2.0)) {
    throw std::invalid_argument("noise band edges must satisfy 0 <= low < high <= Nyquist");
  }
  const std::size_t n = detail::sample_count(duration_s, sample_rate);
  RealFft fft(n);
  auto spec = fft.forward(white_noise(n, seed));
  std::size_t kept = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double f = static_cast<double>(i) * sample_rate / static_cast<double>(n);
    if (f < low_hz || f > high_hz) {
      spec[i] = 0.0;
    } else {
      ++kept;
    }
  }
  if (kept == 0) throw std::invalid_argument("noise band contains no frequency bins");
  return CalibratedSignal(fft.inverse(spec), sample_rate).at_spl(level_db_spl);
}

inline CalibratedSignal gen_noise(const StimulusSpec& spec) {
  const double fs = spec.sample_rate;
  switch (spec.kind) {
    case StimulusKind::kNbNoise: {
      if (!(spec.center_hz > 0.0) || !(spec.bandwidth_hz > 0.0)) {
        throw std::invalid_argument("narrow-band noise needs a centre and a bandwidth");
      }
      const double lo = spec.center_hz - spec.bandwidth_hz / 2.0;
      const double hi = spec.center_hz + spec.bandwidth_hz / 2.0;
      if (!(lo > 0.0)) throw std::invalid_argument("narrow-band noise extends below 0 Hz");
      return band_noise(lo, hi, spec.duration_s, spec.level_db_spl, spec.seed, fs);
    }
    case StimulusKind::kHpNoise:
    case StimulusKind::kLpNoise:
      return band_noise(spec.low_cut_hz, spec.high_cut_hz, spec.duration_s,
                        spec.level_db_spl, spec.seed, fs);
    default:
      throw std::invalid_argument("gen_noise: not a noise stimulus");
  }
}

inline CalibratedSignal generate(const StimulusSpec& spec) {
  switch (spec.kind) {
    case StimulusKind::kSine:
      return gen_sine(spec.carrier_hz, spec.duration_s, spec.level_db_spl, spec.sample_rate);
    case StimulusKind::kAm:
      return gen_am(spec.carrier_hz, spec.mod_freq_hz, spec.mod_depth, spec.duration_s,
                    spec.level_db_spl, spec.sample_rate);
    case StimulusKind::kFm:
      return gen_fm(spec.carrier_hz, spec.mod_freq_hz, spec.freq_deviation_hz,
                    spec.duration_s, spec.level_db_spl, spec.sample_rate);
    default:
      return gen_noise(spec);
  }
}

using LoudnessEvaluator = std::function<double(const CalibratedSignal&)>;

// Gain-scaled copy of `signal` whose loudness is within `tolerance` (relative)
// of target_sone, found by bisection on the gain in dB.
inline CalibratedSignal scale_to_loudness(const CalibratedSignal& signal, double target_sone,
                                          const LoudnessEvaluator& loudness,
                                          double tolerance = 0.01, int max_iterations = 60) {
  if (!(target_sone > 0.0)) throw std::invalid_argument("target loudness must be positive");
  if (!(signal.rms_pa() > 0.0)) throw SilentInputError("cannot scale a silent signal");
  auto at_gain = [&](double gain_db) { return signal.scaled(std::pow(10.0, gain_db / 20.0)); };
  auto error = [&](double n) { return n / target_sone - 1.0; };

  // Bracket [lo, hi] in dB gain with loudness below/above the target.
  bool has_lo = false, has_hi = false;
  double lo = 0.0, hi = 0.0, n_lo = 0.0, n_hi = 0.0;
  auto consider = [&](double x, double n) {
    if (n < target_sone) {
      if (!has_lo || x > lo) lo = x, n_lo = n, has_lo = true;
    } else if (!has_hi || x < hi) {
      hi = x, n_hi = n, has_hi = true;
    }
  };
  double x = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const double n = it == 0 ? loudness(signal) : loudness(at_gain(x));
    if (std::abs(error(n)) <= tolerance) return it == 0 ? signal : at_gain(x);
    consider(x, n);
    if (has_lo && has_hi) {
      // Interpolate in log loudness, fall back to the midpoint near the edges.
      x = lo + (hi - lo) * (std::log(target_sone / n_lo) / std::log(n_hi / n_lo));
      if (!std::isfinite(x) || x <= lo + 0.05 * (hi - lo) || x >= hi - 0.05 * (hi - lo)) {
        x = 0.5 * (lo + hi);
      }
    } else if (has_lo) {
      // Loudness roughly doubles per 10 dB.
      const double step = n_lo > 0.0 ? 10.0 * std::log2(target_sone / n_lo) + 1.0 : 40.0;
      x = lo + std::clamp(step, 1.0, 40.0);
    } else {
      x = hi - std::clamp(10.0 * std::log2(n_hi / target_sone) + 1.0, 1.0, 40.0);
    }
  }
  throw std::runtime_error("scale_to_loudness did not converge");
}

}  // namespace sqm
