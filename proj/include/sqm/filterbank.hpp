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

// Gammatone and gammachirp auditory filterbanks.
//
// Each gammatone channel is the classic four-section one-zero/two-pole IIR
// approximation of the 4th-order gammatone impulse response
//
//   g(t) = t^3 exp(-2 pi b ERB(f_k) t) cos(2 pi f_k t),   b = 1.019,
//
// normalised to unit gain at f_k. A gammachirp channel cascades the same
// core with a four-biquad minimum-phase asymmetric compensation filter that
// approximates exp(c theta(f)), theta(f) = atan((f - f_k) / (b ERB(f_k))),
// and is normalised to unit peak gain.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqm/channel_bank.hpp"
#include "sqm/erb.hpp"
#include "sqm/iir.hpp"
#include "sqm/signal.hpp"

namespace sqm {

enum class FilterbankKind { kGammatone, kGammachirp };

inline const char* to_string(FilterbankKind kind) {
  return kind == FilterbankKind::kGammatone ? "gt" : "gc";
}

struct GammatoneSpec {
  static constexpr int kOrder = 4;
  static constexpr double kBandwidthFactor = 1.019;
};

struct GammachirpSpec {
  // c = kChirpIntercept + kChirpSlope * Ps  (Ps in dB SPL).
  static constexpr double kChirpIntercept = 3.38;
  static constexpr double kChirpSlope = -0.107;
  static constexpr double kLevelFloorDb = -30.0;
  // Triangular smoothing kernel half-width in channels (1 Cam total).
  static constexpr int kSmoothingHalfWidth = 5;
  // Range over which the asymmetric-compensation cascade is applied; the
  // standard coefficients lose stability near |c| = 6.
  static constexpr double kMaxAbsChirp = 3.5;
};

inline double chirp_from_level(double ps_db) {
  return std::clamp(
      GammachirpSpec::kChirpIntercept + GammachirpSpec::kChirpSlope * ps_db,
      -GammachirpSpec::kMaxAbsChirp, GammachirpSpec::kMaxAbsChirp);
}

// Four sections realising the gammatone core of one channel, unit gain at
// centre_hz.
inline std::vector<Biquad> gammatone_sections(double centre_hz,
                                              double sample_rate) {
  if (!(centre_hz > 0.0) || !(centre_hz < sample_rate / 2.0)) {
    throw std::invalid_argument("gammatone centre frequency must lie in (0, Nyquist), got " +
                                std::to_string(centre_hz));
  }
  const double t = 1.0 / sample_rate;
  const double bw = GammatoneSpec::kBandwidthFactor * kTwoPi * erb_of(centre_hz);
  const double arg = kTwoPi * centre_hz * t;
  const double decay = std::exp(-bw * t);
  const double cos_term = 2.0 * t * std::cos(arg) * decay;
  const double sin_term = 2.0 * t * std::sin(arg) * decay;
  const double rp = std::sqrt(3.0 + std::pow(2.0, 1.5));
  const double rm = std::sqrt(3.0 - std::pow(2.0, 1.5));
  const double a1[4] = {-(cos_term + rp * sin_term) / 2.0,
                        -(cos_term - rp * sin_term) / 2.0,
                        -(cos_term + rm * sin_term) / 2.0,
                        -(cos_term - rm * sin_term) / 2.0};
  std::vector<Biquad> out(4);
  for (int i = 0; i < 4; ++i) {
    out[i].b0 = t;
    out[i].b1 = a1[i];
    out[i].b2 = 0.0;
    out[i].a1 = -2.0 * std::cos(arg) * decay;
    out[i].a2 = decay * decay;
  }
  const double w = kTwoPi * centre_hz / sample_rate;
  std::complex<double> h = 1.0;
  for (const auto& s : out) h *= s.response(w);
  const double g = std::pow(std::abs(h), -0.25);
  for (auto& s : out) {
    s.b0 *= g;
    s.b1 *= g;
  }
  return out;
}

// Minimum-phase four-biquad approximation of exp(c theta(f)), unit gain at
// centre_hz. Coefficient fits follow the standard IIR gammachirp
// parameterisation in (b, c).
inline std::vector<Biquad> asymmetric_compensation_sections(
    double centre_hz, double sample_rate, double b, double c) {
  constexpr int kSections = 4;
  const double erbw = erb_of(centre_hz);
  const double ac = std::abs(c);
  const double p0 = 2.0;
  const double p1 = 1.7818 * (1.0 - 0.0791 * b) * (1.0 - 0.1655 * ac);
  const double p2 = 0.5689 * (1.0 - 0.1620 * b) * (1.0 - 0.0857 * ac);
  const double p4 = 1.0724;
  std::vector<Biquad> out;
  const double w = kTwoPi * centre_hz / sample_rate;
  for (int n = 0; n < kSections; ++n) {
    const double r =
        std::exp(-p1 * std::pow(p0 / p4, n) * kTwoPi * b * erbw / sample_rate);
    const double shift = std::pow(p0 * p4, n) * p2 * c * b * erbw;
    const double phi = kTwoPi * std::max(centre_hz + shift, 0.0) / sample_rate;
    const double psi = kTwoPi * std::max(centre_hz - shift, 0.0) / sample_rate;
    Biquad s;
    s.a1 = -2.0 * r * std::cos(phi);
    s.a2 = r * r;
    s.b0 = 1.0;
    s.b1 = -2.0 * r * std::cos(psi);
    s.b2 = r * r;
    const double norm = std::abs(s.response(w));
    s.b0 /= norm;
    s.b1 /= norm;
    s.b2 /= norm;
    out.push_back(s);
  }
  return out;
}

inline std::complex<double> cascade_response(std::span<const Biquad> sections,
                                             double freq_hz,
                                             double sample_rate) {
  const double w = kTwoPi * freq_hz / sample_rate;
  std::complex<double> h = 1.0;
  for (const auto& s : sections) h *= s.response(w);
  return h;
}

// Frequency (Hz) and magnitude of the response maximum in a window around
// centre_hz, located by a dense scan plus golden-section refinement.
struct PeakResponse {
  double freq_hz;
  double magnitude;
};

inline PeakResponse find_response_peak(std::span<const Biquad> sections,
                                       double centre_hz, double sample_rate) {
  const double half = 10.0 * erb_of(centre_hz);
  const double lo = std::max(1.0, centre_hz - half);
  const double hi = std::min(0.499 * sample_rate, centre_hz + half);
  constexpr int kScan = 2000;
  auto mag = [&](double f) {
    return std::abs(cascade_response(sections, f, sample_rate));
  };
  int best = 0;
  double best_mag = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double f = lo + (hi - lo) * i / kScan;
    const double m = mag(f);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  const double step = (hi - lo) / kScan;
  double a = std::max(lo, lo + (best - 1) * step);
  double d = std::min(hi, lo + (best + 1) * step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double b1 = d - inv_phi * (d - a);
  double c1 = a + inv_phi * (d - a);
  double mb = mag(b1), mc = mag(c1);
  for (int it = 0; it < 60; ++it) {
    if (mb > mc) {
      d = c1;
      c1 = b1;
      mc = mb;
      b1 = d - inv_phi * (d - a);
      mb = mag(b1);
    } else {
      a = b1;
      b1 = c1;
      mb = mc;
      c1 = a + inv_phi * (d - a);
      mc = mag(c1);
    }
  }
  const double f = 0.5 * (a + d);
  return {f, std::max(mag(f), best_mag)};
}

// A designed filterbank: one biquad cascade per grid channel. Immutable once
// built; analysis allocates its own filter state.
class Filterbank {
 public:
  Filterbank(FilterbankKind kind, ChannelGrid grid, double sample_rate,
             std::vector<std::vector<Biquad>> sections, std::vector<double> chirp)
      : kind_(kind),
        grid_(std::move(grid)),
        sample_rate_(sample_rate),
        sections_(std::move(sections)),
        chirp_(std::move(chirp)) {}

  FilterbankKind kind() const { return kind_; }
  const ChannelGrid& grid() const { return grid_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t channels() const { return sections_.size(); }
  std::span<const Biquad> sections(std::size_t k) const { return sections_[k]; }
  // Chirp coefficient per channel (all zero for the gammatone bank).
  std::span<const double> chirp() const { return chirp_; }

  std::complex<double> response(std::size_t k, double freq_hz) const {
    return cascade_response(sections_[k], freq_hz, sample_rate_);
  }

  // Filters `x` through channel k into `out` (resized to x.size()).
  void filter_channel(std::size_t k, std::span<const double> x,
                      std::vector<double>& out) const {
    out.assign(x.begin(), x.end());
    SosFilter f(sections_[k]);
    f.process(out);
  }

  ChannelBank analyze(const CalibratedSignal& signal) const {
    if (signal.sample_rate() != sample_rate_) {
      throw std::invalid_argument("signal sample rate differs from filterbank design rate");
    }
    ChannelBank bank(grid_, sample_rate_, signal.size());
    std::vector<double> buf;
    for (std::size_t k = 0; k < channels(); ++k) {
      filter_channel(k, signal.samples(), buf);
      bank.set(k, buf);
    }
    return bank;
  }

 private:
  FilterbankKind kind_;
  ChannelGrid grid_;
  double sample_rate_;
  std::vector<std::vector<Biquad>> sections_;
  std::vector<double> chirp_;
};

inline void check_grid_rate(const ChannelGrid& grid, double sample_rate) {
  if (grid.size() == 0) throw std::invalid_argument("empty channel grid");
  if (!(grid.freq(grid.size() - 1) < sample_rate / 2.0)) {
    throw std::invalid_argument("highest channel frequency is at or above Nyquist");
  }
}

inline Filterbank design_gtfb(const ChannelGrid& grid, double sample_rate) {
  check_grid_rate(grid, sample_rate);
  std::vector<std::vector<Biquad>> sections(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sections[k] = gammatone_sections(grid.freq(k), sample_rate);
  }
  return Filterbank(FilterbankKind::kGammatone, grid, sample_rate,
                    std::move(sections), std::vector<double>(grid.size(), 0.0));
}

// Gammachirp bank with an explicit chirp coefficient per channel.
inline Filterbank design_gcfb_from_chirp(const ChannelGrid& grid, double sample_rate,
                                         std::span<const double> chirp) {
  check_grid_rate(grid, sample_rate);
  if (chirp.size() != grid.size()) {
    throw std::invalid_argument("one chirp coefficient per channel required");
  }
  std::vector<std::vector<Biquad>> sections(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(chirp[k])) {
      throw std::invalid_argument("chirp coefficient must be finite");
    }
    const double fk = grid.freq(k);
    auto core = gammatone_sections(fk, sample_rate);
    if (chirp[k] != 0.0) {
      auto ac = asymmetric_compensation_sections(
          fk, sample_rate, GammatoneSpec::kBandwidthFactor, chirp[k]);
      for (const auto& s : ac) {
        if (!s.stable()) {
          throw std::runtime_error("unstable asymmetric compensation section in channel " +
                                   std::to_string(k));
        }
      }
      core.insert(core.end(), ac.begin(), ac.end());
    }
    const PeakResponse peak = find_response_peak(core, fk, sample_rate);
    core.front().b0 /= peak.magnitude;
    core.front().b1 /= peak.magnitude;
    core.front().b2 /= peak.magnitude;
    sections[k] = std::move(core);
  }
  return Filterbank(FilterbankKind::kGammachirp, grid, sample_rate,
                    std::move(sections), std::vector<double>(chirp.begin(), chirp.end()));
}

// Symmetric triangular moving average across channels (weights 1..6..1 for
// the default half-width); edges renormalise over the available taps, so a
// constant profile is reproduced exactly.
inline std::vector<double> smooth_across_channels(std::span<const double> x,
                                                  int half_width) {
  const long n = static_cast<long>(x.size());
  std::vector<double> out(x.size());
  for (long k = 0; k < n; ++k) {
    double acc = 0.0, wsum = 0.0;
    for (long j = -half_width; j <= half_width; ++j) {
      const long i = k + j;
      if (i < 0 || i >= n) continue;
      const double w = half_width + 1 - std::abs(j);
      acc += w * x[i];
      wsum += w;
    }
    out[k] = acc / wsum;
  }
  return out;
}

// Per-channel rms level (dB SPL) of gammatone outputs, floored for silent
// channels and smoothed along the Cam axis.
inline std::vector<double> channel_levels_from_rms(
    std::span<const double> rms_pa, double floor_db = GammachirpSpec::kLevelFloorDb) {
  std::vector<double> ps(rms_pa.size());
  for (std::size_t k = 0; k < rms_pa.size(); ++k) {
    const double p = rms_pa[k];
    ps[k] = p > 0.0 ? std::max(floor_db, 20.0 * std::log10(p / kReferencePressurePa))
                    : floor_db;
  }
  return smooth_across_channels(ps, GammachirpSpec::kSmoothingHalfWidth);
}

inline std::vector<double> estimate_channel_levels(
    const ChannelBank& gt_outputs, double floor_db = GammachirpSpec::kLevelFloorDb) {
  std::vector<double> r(gt_outputs.channels());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = rms(gt_outputs[k]);
  return channel_levels_from_rms(r, floor_db);
}

// Gammachirp bank whose chirp follows the per-channel level estimates.
inline Filterbank design_gcfb(const ChannelGrid& grid, double sample_rate,
                              std::span<const double> ps_db) {
  if (ps_db.size() != grid.size()) {
    throw std::invalid_argument("one level estimate per channel required");
  }
  std::vector<double> chirp(ps_db.size());
  for (std::size_t k = 0; k < chirp.size(); ++k) {
    if (!std::isfinite(ps_db[k])) throw std::invalid_argument("level estimate must be finite");
    chirp[k] = chirp_from_level(ps_db[k]);
  }
  return design_gcfb_from_chirp(grid, sample_rate, chirp);
}

}  // namespace sqm
