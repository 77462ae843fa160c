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

// Time-domain loudness: ear filter, GT/GC filterbank, excitation, specific
// loudness and total loudness, plus the sone/phon map built from the model.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqm/channel_bank.hpp"
#include "sqm/ear_filter.hpp"
#include "sqm/erb.hpp"
#include "sqm/filterbank.hpp"
#include "sqm/loudness_tables.hpp"
#include "sqm/signal.hpp"
#include "sqm/stimuli.hpp"

namespace sqm {

// Two cascaded one-pole leaky integrators, each
//   H(z) = a / (1 - p z^-1),  p = exp(-2 pi f_c / f_s),  a = 1 / (1 - p).
class LeakyIntegrator {
 public:
  static constexpr double kCutoffHz = 1200.0;

  explicit LeakyIntegrator(double sample_rate, double cutoff_hz = kCutoffHz)
      : pole_(std::exp(-kTwoPi * cutoff_hz / sample_rate)), gain_(1.0 / (1.0 - pole_)) {}

  double pole() const { return pole_; }
  double gain() const { return gain_; }

  // Half-wave rectification, squaring and integration, in place.
  void excite(std::span<double> x) const {
    double y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
      const double r = v > 0.0 ? v * v : 0.0;
      y1 = gain_ * r + pole_ * y1;
      y2 = gain_ * y1 + pole_ * y2;
      v = y2;
    }
  }

 private:
  double pole_;
  double gain_;
};

// Monotone (phon, sone) samples from 1 kHz tones with linear interpolation.
class SonePhonMap {
 public:
  SonePhonMap() = default;
  SonePhonMap(std::vector<double> phon, std::vector<double> sone)
      : phon_(std::move(phon)), sone_(std::move(sone)) {
    if (phon_.size() < 2 || phon_.size() != sone_.size()) {
      throw std::invalid_argument("sone/phon map needs at least two matching samples");
    }
    for (std::size_t i = 1; i < phon_.size(); ++i) {
      if (!(phon_[i] > phon_[i - 1]) || !(sone_[i] > sone_[i - 1])) {
        throw std::runtime_error("sone/phon samples are not strictly increasing at " +
                                 std::to_string(phon_[i]) + " phon");
      }
    }
    if (!(sone_.front() > 0.0)) throw std::runtime_error("sone/phon map must be positive");
  }

  const std::vector<double>& phons() const { return phon_; }
  const std::vector<double>& sones() const { return sone_; }

  // Loudness of a loudness level. Below the first sample: 0; above the last:
  // the last segment extended.
  double sone(double phon) const {
    if (phon < phon_.front()) return 0.0;
    return interp(phon_, sone_, phon);
  }

  // The LT function: loudness level of a loudness. Inputs below the first
  // sample clamp to the first level.
  double phon(double sone) const {
    if (!(sone > sone_.front())) return phon_.front();
    return interp(sone_, phon_, sone);
  }

 private:
  static double interp(const std::vector<double>& x, const std::vector<double>& y, double v) {
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    i = std::clamp<std::size_t>(i, 1, x.size() - 1);
    const double t = (v - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
  }

  std::vector<double> phon_;
  std::vector<double> sone_;
};

// Specific loudness N'_k(t) in sone per Cam and total loudness
// N(t) = 0.1 Cam * sum_k N'_k(t).
struct LoudnessResult {
  ChannelBank specific;
  std::vector<double> total;
  std::size_t steady_begin = 0;
  double mean = 0.0;  // time average of `total` over the steady window

  // Time average of N'_k over the steady window.
  std::vector<double> mean_specific() const {
    std::vector<double> out(specific.channels());
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = sqm::mean(specific[k].subspan(steady_begin));
    }
    return out;
  }
};

inline std::vector<double> total_loudness(const ChannelBank& specific) {
  std::vector<double> n(specific.length(), 0.0);
  for (std::size_t k = 0; k < specific.channels(); ++k) {
    const auto row = specific[k];
    for (std::size_t t = 0; t < n.size(); ++t) n[t] += row[t];
  }
  const double step = specific.grid().step_cam();
  for (double& v : n) v *= step;
  return n;
}

inline LoudnessResult make_loudness_result(ChannelBank specific, double warmup_s = 0.2) {
  LoudnessResult r;
  r.total = total_loudness(specific);
  r.steady_begin = steady_start(r.total.size(), specific.sample_rate(), warmup_s);
  r.mean = mean(std::span<const double>(r.total).subspan(r.steady_begin));
  r.specific = std::move(specific);
  return r;
}

struct LoudnessOptions {
  FilterbankKind kind = FilterbankKind::kGammatone;
  EarTransferTable ear = EarTransferTable::free_field();
  LoudnessTable table = LoudnessTable::defaults();
  double q_n = 54.6e-3;
  double alpha_offset = 0.049;
  double warmup_s = 0.2;

  static LoudnessOptions defaults(FilterbankKind kind) {
    LoudnessOptions o;
    o.kind = kind;
    if (kind == FilterbankKind::kGammachirp) {
      o.q_n = 54.8e-3;
      o.alpha_offset = 0.047;
    }
    return o;
  }

  ChannelGrid grid() const {
    return kind == FilterbankKind::kGammatone ? ChannelGrid::gammatone()
                                              : ChannelGrid::gammachirp();
  }
};

// Loudness pipeline for one variant and sample rate.
//
// E_0 and the sone/phon map are computed on first use and cached, so a model
// instance is not safe to share between threads.
class LoudnessModel {
 public:
  // 1 kHz reference tones used for E_0 and the sone/phon map.
  static constexpr double kReferenceToneHz = 1000.0;
  static constexpr double kReferenceDurationS = 0.4;

  explicit LoudnessModel(LoudnessOptions options = {},
                         double sample_rate = kDefaultSampleRate)
      : options_(std::move(options)),
        sample_rate_(sample_rate),
        grid_(options_.grid()),
        ear_(std::make_shared<EarFilter>(options_.ear, sample_rate)),
        gtfb_(std::make_shared<Filterbank>(design_gtfb(grid_, sample_rate))),
        integrator_(sample_rate) {
    laws_.reserve(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      laws_.emplace_back(options_.q_n, options_.table.at(grid_.cam(k)), options_.alpha_offset);
    }
  }

  const LoudnessOptions& options() const { return options_; }
  FilterbankKind kind() const { return options_.kind; }
  double sample_rate() const { return sample_rate_; }
  const ChannelGrid& grid() const { return grid_; }
  const EarFilter& ear_filter() const { return *ear_; }
  const SpecificLoudnessLaw& law(std::size_t k) const { return laws_.at(k); }
  const LeakyIntegrator& integrator() const { return integrator_; }

  CalibratedSignal apply_ear(const CalibratedSignal& signal) const {
    check_rate(signal);
    return ear_->apply(signal);
  }

  // Filterbank for an ear-filtered signal: the fixed gammatone bank, or a
  // gammachirp bank designed from a gammatone level pass.
  Filterbank filterbank_for(const CalibratedSignal& ear_signal) const {
    if (options_.kind == FilterbankKind::kGammatone) return *gtfb_;
    return design_gcfb(grid_, sample_rate_, channel_levels(ear_signal));
  }

  // Smoothed per-channel gammatone levels Ps_k (dB SPL).
  std::vector<double> channel_levels(const CalibratedSignal& ear_signal) const {
    std::vector<double> r(grid_.size());
    std::vector<double> buf;
    for (std::size_t k = 0; k < r.size(); ++k) {
      gtfb_->filter_channel(k, ear_signal.samples(), buf);
      r[k] = rms(buf);
    }
    return channel_levels_from_rms(r);
  }

  ChannelBank channels(const CalibratedSignal& signal) const {
    const CalibratedSignal y = apply_ear(signal);
    return filterbank_for(y).analyze(y);
  }

  // E_k(t) / E_0.
  ChannelBank excitation(const CalibratedSignal& signal) const {
    const double e0 = reference_excitation();
    return run(signal, [e0](std::vector<double>& e, std::size_t) {
      for (double& v : e) v /= e0;
    });
  }

  LoudnessResult analyze(const CalibratedSignal& signal) const {
    const double e0 = reference_excitation();
    ChannelBank specific = run(signal, [this, e0](std::vector<double>& e, std::size_t k) {
      const SpecificLoudnessLaw& law = laws_[k];
      for (double& v : e) v = law(v / e0);
    });
    return make_loudness_result(std::move(specific), options_.warmup_s);
  }

  double mean_loudness(const CalibratedSignal& signal) const { return analyze(signal).mean; }

  // Peak-channel steady excitation of a 1 kHz tone at 0 dB SPL.
  double reference_excitation() const {
    if (!e0_) e0_ = compute_reference_excitation();
    return *e0_;
  }

  static std::vector<double> default_map_levels() {
    std::vector<double> levels;
    for (int l = 0; l <= 100; l += 5) levels.push_back(l);
    return levels;
  }

  const SonePhonMap& sone_phon_map() const {
    if (!map_) map_ = build_sone_phon_map(default_map_levels());
    return *map_;
  }

  SonePhonMap build_sone_phon_map(std::span<const double> levels_db) const {
    std::vector<double> phon(levels_db.begin(), levels_db.end());
    std::vector<double> sone;
    for (double l : phon) {
      sone.push_back(mean_loudness(
          gen_sine(kReferenceToneHz, kReferenceDurationS, l, sample_rate_)));
    }
    return SonePhonMap(std::move(phon), std::move(sone));
  }

 private:
  void check_rate(const CalibratedSignal& signal) const {
    if (signal.sample_rate() != sample_rate_) {
      throw std::invalid_argument("signal sample rate differs from the model rate");
    }
  }

  // Channel-by-channel: filter, excite, then `finish(buffer, k)`; only the
  // finished series are kept.
  template <typename Finish>
  ChannelBank run(const CalibratedSignal& signal, Finish finish) const {
    const CalibratedSignal y = apply_ear(signal);
    const Filterbank fb = filterbank_for(y);
    std::vector<std::vector<double>> rows(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      fb.filter_channel(k, y.samples(), rows[k]);
      integrator_.excite(rows[k]);
      finish(rows[k], k);
    }
    return ChannelBank(grid_, sample_rate_, std::move(rows));
  }

  double compute_reference_excitation() const {
    const CalibratedSignal tone =
        gen_sine(kReferenceToneHz, kReferenceDurationS, 0.0, sample_rate_);
    const ChannelBank e = run(tone, [](std::vector<double>&, std::size_t) {});
    const std::size_t begin = steady_start(e.length(), sample_rate_, options_.warmup_s);
    double best = 0.0;
    for (std::size_t k = 0; k < e.channels(); ++k) {
      best = std::max(best, mean(e[k].subspan(begin)));
    }
    if (!(best > 0.0)) throw std::runtime_error("reference excitation is zero");
    return best;
  }

  LoudnessOptions options_;
  double sample_rate_;
  ChannelGrid grid_;
  std::shared_ptr<const EarFilter> ear_;
  std::shared_ptr<const Filterbank> gtfb_;
  LeakyIntegrator integrator_;
  std::vector<SpecificLoudnessLaw> laws_;
  mutable std::optional<double> e0_;
  mutable std::optional<SonePhonMap> map_;
};

}  // namespace sqm
