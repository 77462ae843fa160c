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

// Modulation analysis of specific loudness shared by roughness and
// fluctuation strength: DC removal, band-pass, Hilbert envelope, level
// transform, peak/dip difference and cross-channel correlation.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqm/channel_bank.hpp"
#include "sqm/fft.hpp"
#include "sqm/iir.hpp"
#include "sqm/loudness.hpp"
#include "sqm/signal.hpp"

namespace sqm {

enum class ModulationMetric { kRoughness, kFluctuation };

struct ModulationSettings {
  ModulationMetric metric = ModulationMetric::kRoughness;
  double envelope_cutoff_hz = 7.0;
  int envelope_order = 9;
  double max_lag_s = 0.01;
  // Channel distance of the correlation pairs (1 Cam).
  std::size_t pair_offset = 10;

  static ModulationSettings roughness() { return {}; }
  static ModulationSettings fluctuation() {
    ModulationSettings s;
    s.metric = ModulationMetric::kFluctuation;
    s.envelope_cutoff_hz = 0.4;
    return s;
  }
};

// Subtracts the mean in place and returns it (H_0).
inline double remove_dc(std::span<double> x) {
  const double h0 = mean(x);
  for (double& v : x) v -= h0;
  return h0;
}

// Band-pass centre frequency C_F of the roughness filter at an ERB-number.
inline double roughness_centre_hz(double cam) {
  return 69.2 / (1.0 + std::exp(-(cam - 4.58) / 1.48));
}

inline double roughness_bandwidth_hz(double cam) { return 1.58 * roughness_centre_hz(cam); }

// Order-3 gammatone band-pass t^2 exp(-2 pi W t) cos(2 pi C t + phi), realised by
// impulse invariance: the complex sequence n^2 p^n with
// p = exp((-2 pi W + j 2 pi C) / f_s) has the transform
// p z^-1 (1 + p z^-1) / (1 - p z^-1)^3; the real part of exp(j phi) times it
// is the output.
// Scaled to unit gain at C.
class GammatoneBandpass3 {
 public:
  GammatoneBandpass3(double centre_hz, double bandwidth_hz, double sample_rate)
      : centre_hz_(centre_hz), sample_rate_(sample_rate) {
    if (!(centre_hz > 0.0) || !(centre_hz < sample_rate / 2.0) || !(bandwidth_hz > 0.0)) {
      throw std::invalid_argument("band-pass centre must lie in (0, Nyquist)");
    }
    pole_ = std::exp(std::complex<double>(-kTwoPi * bandwidth_hz, kTwoPi * centre_hz) /
                     sample_rate);
    // Carrier phase chosen so the real response has a zero at DC.
    rotation_ = std::polar(1.0, kTwoPi / 4.0 - std::arg(complex_response(0.0)));
    gain_ = 1.0;
    gain_ = 1.0 / std::abs(response(centre_hz));
  }

  double centre_hz() const { return centre_hz_; }

  std::complex<double> response(double freq_hz) const {
    const double w = kTwoPi * freq_hz / sample_rate_;
    // Real impulse response: 0.5 (r H_c(w) + conj(r H_c(-w))).
    return 0.5 * gain_ *
           (rotation_ * complex_response(w) + std::conj(rotation_ * complex_response(-w)));
  }

  void process(std::span<double> x) const {
    using C = std::complex<double>;
    const C p = pole_;
    C s1 = 0.0, s2 = 0.0, s3 = 0.0;  // three cascaded one-pole states
    double x1 = 0.0, x2 = 0.0;       // input delay line for the numerator
    for (double& v : x) {
      // Numerator p z^-1 + p^2 z^-2 on the input.
      const C u = p * x1 + p * p * x2;
      x2 = x1;
      x1 = v;
      s1 = u + p * s1;
      s2 = s1 + p * s2;
      s3 = s2 + p * s3;
      v = gain_ * (rotation_ * s3).real();
    }
  }

 private:
  std::complex<double> complex_response(double w) const {
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> pz = pole_ * z1;
    const std::complex<double> d = 1.0 - pz;
    return pz * (1.0 + pz) / (d * d * d);
  }

  double centre_hz_;
  double sample_rate_;
  std::complex<double> pole_;
  std::complex<double> rotation_ = 1.0;
  double gain_ = 1.0;
};

// Butterworth 5 Hz low-pass (order 2) cascaded with a 2 Hz high-pass
// (order 2).
inline SosFilter fluctuation_bandpass(double sample_rate) {
  auto s = butterworth(FilterType::kLowPass, 2, 5.0, sample_rate);
  const auto hp = butterworth(FilterType::kHighPass, 2, 2.0, sample_rate);
  s.insert(s.end(), hp.begin(), hp.end());
  return SosFilter(std::move(s));
}

// Band-pass of channel `cam` for either metric, applied from rest.
inline void bandpass_channel(const ModulationSettings& settings, double cam,
                             double sample_rate, std::span<double> x) {
  if (settings.metric == ModulationMetric::kRoughness) {
    GammatoneBandpass3(roughness_centre_hz(cam), roughness_bandwidth_hz(cam), sample_rate)
        .process(x);
  } else {
    fluctuation_bandpass(sample_rate).process(x);
  }
}

// Magnitude of the analytic signal via the FFT, followed by the envelope
// low-pass started at its steady state for the mean envelope. Reuses FFT
// plans across channels of equal length.
class EnvelopeDetector {
 public:
  EnvelopeDetector(std::size_t length, double sample_rate, double cutoff_hz, int order)
      : length_(length),
        real_(length),
        complex_(length),
        lowpass_(butterworth(FilterType::kLowPass, order, cutoff_hz, sample_rate)) {}

  std::size_t length() const { return length_; }
  const std::vector<Biquad>& lowpass() const { return lowpass_; }

  std::vector<double> analytic_magnitude(std::span<const double> x) {
    if (x.size() != length_) throw std::invalid_argument("envelope length mismatch");
    const auto half = real_.forward(x);
    std::vector<Complex> full(length_, Complex(0.0, 0.0));
    full[0] = half[0];
    const std::size_t nyquist = length_ % 2 == 0 ? length_ / 2 : 0;
    for (std::size_t i = 1; i < half.size(); ++i) {
      full[i] = i == nyquist ? half[i] : 2.0 * half[i];
    }
    const auto z = complex_.inverse(full);
    std::vector<double> out(length_);
    for (std::size_t i = 0; i < length_; ++i) out[i] = std::abs(z[i]);
    return out;
  }

  std::vector<double> operator()(std::span<const double> x) {
    std::vector<double> env = analytic_magnitude(x);
    SosFilter lp(lowpass_);
    lp.settle(mean(env));
    lp.process(env);
    return env;
  }

 private:
  std::size_t length_;
  RealFft real_;
  ComplexFft complex_;
  std::vector<Biquad> lowpass_;
};

// Peak/dip level difference of one channel:
//   upper = LT(env(x)), lower = -LT(env(-x)),
//   dL(t) = (upper - lower) W(t),  W(t) = LT(N'_k(t)) / max_j LT(N'_j(t)).
// `max_level` holds the per-sample denominator; zero there means silence
// and gives dL = 0.
inline std::vector<double> delta_level(std::span<const double> upper_env,
                                       std::span<const double> lower_env,
                                       std::span<const double> specific,
                                       std::span<const double> max_level,
                                       const SonePhonMap& map) {
  const std::size_t n = upper_env.size();
  if (lower_env.size() != n || specific.size() != n || max_level.size() != n) {
    throw std::invalid_argument("delta_level inputs differ in length");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (!(max_level[t] > 0.0)) continue;
    const double upper = map.phon(upper_env[t]);
    const double lower = -map.phon(lower_env[t]);
    out[t] = (upper - lower) * map.phon(specific[t]) / max_level[t];
  }
  return out;
}

// LT(max_k N'_k(t)), which equals max_k LT(N'_k(t)) because LT is monotone.
inline std::vector<double> max_channel_level(const ChannelBank& specific,
                                             const SonePhonMap& map) {
  std::vector<double> peak(specific.length(), 0.0);
  for (std::size_t k = 0; k < specific.channels(); ++k) {
    const auto row = specific[k];
    for (std::size_t t = 0; t < peak.size(); ++t) peak[t] = std::max(peak[t], row[t]);
  }
  for (double& v : peak) v = map.phon(v);
  return peak;
}

// Reference implementation of the normalised cross-correlation: the
// maximum over lags |tau| <= max_lag of sum_t x(t) y(t + tau) over the
// overlap, divided by sqrt(sum x^2 sum y^2). Zero-energy input gives 0.
inline double xcorr_norm_direct(std::span<const double> x, std::span<const double> y,
                                std::size_t max_lag) {
  if (x.size() != y.size()) throw std::invalid_argument("xcorr inputs differ in length");
  long double ex = 0.0L, ey = 0.0L;
  for (std::size_t t = 0; t < x.size(); ++t) {
    ex += static_cast<long double>(x[t]) * x[t];
    ey += static_cast<long double>(y[t]) * y[t];
  }
  if (!(ex > 0.0L) || !(ey > 0.0L)) return 0.0;
  const long n = static_cast<long>(x.size());
  const long lag = std::min<long>(static_cast<long>(max_lag), n - 1);
  long double best = -std::numeric_limits<long double>::infinity();
  for (long tau = -lag; tau <= lag; ++tau) {
    long double acc = 0.0L;
    for (long t = std::max(0L, -tau); t < std::min(n, n - tau); ++t) {
      acc += static_cast<long double>(x[t]) * y[t + tau];
    }
    best = std::max(best, acc);
  }
  return static_cast<double>(best / std::sqrt(ex * ey));
}

// FFT cross-correlation for many series of one length. Spectra are
// zero-padded so that lags up to `max_lag` do not wrap.
class CrossCorrelator {
 public:
  struct Prepared {
    std::vector<Complex> spectrum;
    double energy = 0.0;
  };

  CrossCorrelator(std::size_t length, std::size_t max_lag)
      : length_(length),
        max_lag_(std::min(max_lag, length == 0 ? 0 : length - 1)),
        fft_(fast_fft_size(length + max_lag_ + 1)) {}

  std::size_t length() const { return length_; }
  std::size_t max_lag() const { return max_lag_; }

  Prepared prepare(std::span<const double> x) {
    if (x.size() != length_) throw std::invalid_argument("xcorr length mismatch");
    Prepared p;
    p.spectrum = fft_.forward(x);
    long double e = 0.0L;
    for (double v : x) e += static_cast<long double>(v) * v;
    p.energy = static_cast<double>(e);
    return p;
  }

  double operator()(const Prepared& x, const Prepared& y) {
    if (!(x.energy > 0.0) || !(y.energy > 0.0)) return 0.0;
    std::vector<Complex> cross(x.spectrum.size());
    for (std::size_t i = 0; i < cross.size(); ++i) {
      cross[i] = std::conj(x.spectrum[i]) * y.spectrum[i];
    }
    // r[tau] = sum_t x(t) y(t + tau); negative lags wrap to the end.
    const auto r = fft_.inverse(cross);
    const std::size_t m = r.size();
    double best = r[0];
    for (std::size_t tau = 1; tau <= max_lag_; ++tau) {
      best = std::max({best, r[tau], r[m - tau]});
    }
    return best / std::sqrt(x.energy * y.energy);
  }

 private:
  std::size_t length_;
  std::size_t max_lag_;
  RealFft fft_;
};

inline double xcorr_norm(std::span<const double> x, std::span<const double> y,
                         std::size_t max_lag) {
  if (x.size() != y.size()) throw std::invalid_argument("xcorr inputs differ in length");
  if (x.empty()) return 0.0;
  CrossCorrelator c(x.size(), max_lag);
  return c(c.prepare(x), c.prepare(y));
}

inline std::size_t lag_samples(double max_lag_s, double sample_rate) {
  return static_cast<std::size_t>(std::llround(max_lag_s * sample_rate));
}

// Correlations between channels k and k + offset, with the edge rule:
// the lowest `offset` channels use i_k only, the highest offset + 1 use
// i_{k-offset} only, and the rest use the product i_{k-offset} i_k.
class CorrelationSet {
 public:
  CorrelationSet() = default;
  CorrelationSet(std::vector<double> pairs, std::size_t channels, std::size_t offset)
      : pairs_(std::move(pairs)), channels_(channels), offset_(offset) {
    check_channel_count(channels, offset);
    if (pairs_.size() != channels - offset) {
      throw std::invalid_argument("correlation pair count does not match the grid");
    }
  }

  static void check_channel_count(std::size_t channels, std::size_t offset) {
    if (channels < 2 * offset + 1) {
      throw std::invalid_argument("modulation analysis needs at least " +
                                  std::to_string(2 * offset + 1) + " channels");
    }
  }

  std::size_t channels() const { return channels_; }
  std::size_t offset() const { return offset_; }
  // pairs()[j] correlates channel j with channel j + offset.
  const std::vector<double>& pairs() const { return pairs_; }

  bool has_upper(std::size_t k) const { return k + offset_ + 1 < channels_; }
  bool has_lower(std::size_t k) const { return k >= offset_; }
  // i_k and i_{k-offset} as used by channel k; 1 where the rule omits one.
  double upper(std::size_t k) const { return has_upper(k) ? pairs_[k] : 1.0; }
  double lower(std::size_t k) const { return has_lower(k) ? pairs_[k - offset_] : 1.0; }
  double factor(std::size_t k) const { return lower(k) * upper(k); }

 private:
  std::vector<double> pairs_;
  std::size_t channels_ = 0;
  std::size_t offset_ = 10;
};

// Band-passed copy of the bank: DC removed and filtered per channel.
struct BandLimitedBank {
  ChannelBank bandpassed;
  std::vector<double> dc;
};

inline BandLimitedBank bandpass_bank(const ChannelBank& specific,
                                     const ModulationSettings& settings) {
  BandLimitedBank out;
  std::vector<std::vector<double>> rows(specific.channels());
  out.dc.resize(specific.channels());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = specific[k];
    rows[k].assign(src.begin(), src.end());
    out.dc[k] = remove_dc(rows[k]);
    bandpass_channel(settings, specific.grid().cam(k), specific.sample_rate(), rows[k]);
  }
  out.bandpassed = ChannelBank(specific.grid(), specific.sample_rate(), std::move(rows));
  return out;
}

inline CorrelationSet correlation_set(const ChannelBank& bandpassed,
                                      const ModulationSettings& settings) {
  const std::size_t kk = bandpassed.channels();
  const std::size_t off = settings.pair_offset;
  CorrelationSet::check_channel_count(kk, off);
  CrossCorrelator xc(bandpassed.length(),
                     lag_samples(settings.max_lag_s, bandpassed.sample_rate()));
  std::deque<CrossCorrelator::Prepared> window;
  std::vector<double> pairs(kk - off);
  for (std::size_t k = 0; k < kk; ++k) {
    window.push_back(xc.prepare(bandpassed[k]));
    if (window.size() > off + 1) window.pop_front();
    if (k >= off) pairs[k - off] = xc(window.front(), window.back());
  }
  return CorrelationSet(std::move(pairs), kk, off);
}

// Time-collapsed modulation analysis of the steady window of a loudness
// result.
struct ModulationAnalysis {
  ModulationSettings settings;
  std::vector<double> dc;          // H_0 per channel
  std::vector<double> mean_delta;  // time average of dL per channel
  CorrelationSet correlations;
};

// Runs the chain channel by channel without keeping band-passed banks: a
// first pass computes the correlations, a second the level differences.
// `on_delta(k, dL_k, correlations)` sees every channel's dL series.
inline ModulationAnalysis analyze_modulation(
    const LoudnessResult& loudness, const SonePhonMap& map,
    const ModulationSettings& settings,
    const std::function<void(std::size_t, std::span<const double>, const CorrelationSet&)>&
        on_delta = {}) {
  const ChannelBank& bank = loudness.specific;
  const std::size_t kk = bank.channels();
  const std::size_t off = settings.pair_offset;
  CorrelationSet::check_channel_count(kk, off);
  const std::size_t begin = loudness.steady_begin;
  const std::size_t n = bank.length() - begin;
  if (n < 2) throw std::invalid_argument("steady window is too short for modulation analysis");
  const double fs = bank.sample_rate();

  ModulationAnalysis out;
  out.settings = settings;
  out.dc.resize(kk);
  out.mean_delta.assign(kk, 0.0);

  auto bandpassed = [&](std::size_t k) {
    const auto src = bank[k].subspan(begin);
    std::vector<double> x(src.begin(), src.end());
    out.dc[k] = remove_dc(x);
    bandpass_channel(settings, bank.grid().cam(k), fs, x);
    return x;
  };

  {
    CrossCorrelator xc(n, lag_samples(settings.max_lag_s, fs));
    std::deque<CrossCorrelator::Prepared> window;
    std::vector<double> pairs(kk - off);
    for (std::size_t k = 0; k < kk; ++k) {
      window.push_back(xc.prepare(bandpassed(k)));
      if (window.size() > off + 1) window.pop_front();
      if (k >= off) pairs[k - off] = xc(window.front(), window.back());
    }
    out.correlations = CorrelationSet(std::move(pairs), kk, off);
  }

  std::vector<double> peak(n, 0.0);
  for (std::size_t k = 0; k < kk; ++k) {
    const auto row = bank[k].subspan(begin);
    for (std::size_t t = 0; t < n; ++t) peak[t] = std::max(peak[t], row[t]);
  }
  for (double& v : peak) v = map.phon(v);

  EnvelopeDetector detector(n, fs, settings.envelope_cutoff_hz, settings.envelope_order);
  for (std::size_t k = 0; k < kk; ++k) {
    // Negation commutes exactly with the FFT, so |a(-x)| equals |a(x)|
    // bit for bit and one envelope serves both sides.
    const std::vector<double> env = detector(bandpassed(k));
    const std::vector<double> dl = delta_level(env, env, bank[k].subspan(begin), peak, map);
    out.mean_delta[k] = mean(dl);
    if (on_delta) on_delta(k, dl, out.correlations);
  }
  return out;
}

}  // namespace sqm
