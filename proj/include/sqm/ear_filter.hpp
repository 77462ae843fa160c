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

// Outer- and middle-ear transfer stage: tabulated gain realised as a
// minimum-phase FIR.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqm/fft.hpp"
#include "sqm/signal.hpp"

namespace sqm {

enum class SoundField { kFree, kDiffuse };

inline const char* to_string(SoundField field) {
  return field == SoundField::kFree ? "free" : "diffuse";
}

// Gain (dB) on a strictly increasing frequency grid, interpolated linearly
// in log frequency and held constant beyond the end points.
class EarTransferTable {
 public:
  EarTransferTable() = default;
  EarTransferTable(std::vector<double> freq_hz, std::vector<double> gain_db,
                   SoundField field = SoundField::kFree)
      : freq_hz_(std::move(freq_hz)), gain_db_(std::move(gain_db)), field_(field) {
    if (freq_hz_.empty() || freq_hz_.size() != gain_db_.size()) {
      throw std::invalid_argument("ear table needs matching, non-empty columns");
    }
    for (std::size_t i = 0; i < freq_hz_.size(); ++i) {
      if (!(freq_hz_[i] > 0.0) || !std::isfinite(gain_db_[i])) {
        throw std::invalid_argument("ear table entries must be positive and finite");
      }
      if (i > 0 && !(freq_hz_[i] > freq_hz_[i - 1])) {
        throw std::invalid_argument("ear table frequencies must increase strictly");
      }
    }
  }

  const std::vector<double>& freqs() const { return freq_hz_; }
  const std::vector<double>& gains_db() const { return gain_db_; }
  SoundField field() const { return field_; }

  double gain_db(double f_hz) const {
    if (f_hz <= freq_hz_.front()) return gain_db_.front();
    if (f_hz >= freq_hz_.back()) return gain_db_.back();
    const auto it = std::upper_bound(freq_hz_.begin(), freq_hz_.end(), f_hz);
    const std::size_t i = static_cast<std::size_t>(it - freq_hz_.begin());
    const double t = std::log(f_hz / freq_hz_[i - 1]) / std::log(freq_hz_[i] / freq_hz_[i - 1]);
    return gain_db_[i - 1] + t * (gain_db_[i] - gain_db_[i - 1]);
  }

  static EarTransferTable flat() { return EarTransferTable({1000.0}, {0.0}); }

  // Free-field (frontal incidence) to eardrum plus middle-ear transfer.
  static EarTransferTable free_field() {
    return combine(kOuterFreeField, SoundField::kFree);
  }
  // Diffuse-field to eardrum plus middle-ear transfer.
  static EarTransferTable diffuse_field() {
    return combine(kOuterDiffuseField, SoundField::kDiffuse);
  }
  static EarTransferTable for_field(SoundField field) {
    return field == SoundField::kFree ? free_field() : diffuse_field();
  }

 private:
  static constexpr std::size_t kRows = 41;
  static constexpr double kFreq[kRows] = {
      20,   25,   31.5, 40,    50,    63,    80,    100,   125,   160,   200,
      250,  315,  400,  500,   630,   750,   800,   1000,  1250,  1500,  1600,
      2000, 2500, 3000, 3150,  4000,  5000,  6000,  6300,  8000,  9000,  10000,
      11200, 12500, 14000, 15000, 16000, 18000, 20000, 22050};
  static constexpr double kOuterFreeField[kRows] = {
      0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.1,  0.3, 0.5,
      0.9,  1.4,  1.6,  1.7,  2.5,  2.7,  2.6,  2.6,  3.2,  5.2, 6.6,
      12.0, 16.8, 15.3, 15.2, 14.2, 10.7, 7.1,  6.4,  1.8,  -0.9, -1.6,
      1.9,  4.9,  2.0,  -2.0, 2.5,  2.5,  2.5,  2.5};
  static constexpr double kOuterDiffuseField[kRows] = {
      0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.1,  0.3, 0.4,
      0.5,  1.0,  1.6,  1.7,  2.2,  2.7,  2.9,  3.8,  5.3,  6.8, 7.2,
      10.2, 14.9, 14.5, 14.4, 12.7, 10.8, 8.9,  8.7,  8.5,  6.2, 5.0,
      4.5,  4.0,  3.3,  2.6,  2.0,  2.0,  2.0,  2.0};
  static constexpr double kMiddleEar[kRows] = {
      -39.6, -32.0, -25.85, -21.4, -18.5, -15.9, -14.1, -12.4, -11.0, -9.6,  -8.3,
      -7.4,  -6.2,  -4.8,   -3.8,  -3.3,  -2.9,  -2.6,  -2.6,  -4.5,  -5.4,  -6.1,
      -8.5,  -10.4, -7.3,   -7.0,  -6.6,  -7.0,  -9.2,  -10.2, -12.2, -10.8, -10.1,
      -12.7, -15.0, -18.2,  -23.8, -32.3, -45.5, -50.0, -50.0};

  static EarTransferTable combine(const double (&outer)[kRows], SoundField field) {
    std::vector<double> f(kFreq, kFreq + kRows), g(kRows);
    for (std::size_t i = 0; i < kRows; ++i) g[i] = outer[i] + kMiddleEar[i];
    return EarTransferTable(std::move(f), std::move(g), field);
  }

  std::vector<double> freq_hz_;
  std::vector<double> gain_db_;
  SoundField field_ = SoundField::kFree;
};

// Parses `frequency_hz gain_db` rows; `#` starts a comment.
inline EarTransferTable parse_ear_table(std::istream& in,
                                        SoundField field = SoundField::kFree) {
  std::vector<double> f, g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double freq = 0.0, gain = 0.0;
    if (!(row >> freq)) continue;
    std::string extra;
    if (!(row >> gain) || (row >> extra)) {
      throw std::runtime_error("ear table line " + std::to_string(line_no) +
                               ": expected `frequency_hz gain_db`");
    }
    f.push_back(freq);
    g.push_back(gain);
  }
  return EarTransferTable(std::move(f), std::move(g), field);
}

inline EarTransferTable load_ear_table(const std::string& path,
                                       SoundField field = SoundField::kFree) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ear table: " + path);
  return parse_ear_table(in, field);
}

// Minimum-phase FIR whose magnitude follows an EarTransferTable, designed by
// folding the real cepstrum of the tabulated log magnitude.
class EarFilter {
 public:
  static constexpr double kMinSampleRate = 32000.0;
  static constexpr std::size_t kDesignFftSize = 1 << 16;
  static constexpr std::size_t kDefaultTaps = 4096;

  EarFilter(const EarTransferTable& table, double sample_rate,
            std::size_t taps = kDefaultTaps)
      : sample_rate_(sample_rate) {
    if (!(sample_rate >= kMinSampleRate)) {
      throw std::invalid_argument("ear filter needs a sample rate of at least 32 kHz");
    }
    if (taps == 0 || taps > kDesignFftSize / 2) {
      throw std::invalid_argument("ear filter tap count out of range");
    }
    const std::size_t n = kDesignFftSize;
    const std::size_t bins = n / 2 + 1;
    std::vector<Complex> log_mag(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      const double f = static_cast<double>(i) * sample_rate / static_cast<double>(n);
      log_mag[i] = table.gain_db(std::max(f, 1.0)) * std::numbers::ln10 / 20.0;
    }
    RealFft fft(n);
    std::vector<double> cep = fft.inverse(log_mag);
    // Fold the even cepstrum onto positive quefrencies.
    for (std::size_t i = 1; i < n / 2; ++i) cep[i] *= 2.0;
    std::fill(cep.begin() + static_cast<long>(n / 2) + 1, cep.end(), 0.0);
    std::vector<Complex> spec = fft.forward(cep);
    for (Complex& s : spec) s = std::exp(s);
    std::vector<double> h = fft.inverse(spec);
    h.resize(taps);
    // Half-Hann taper over the last eighth of the response.
    const std::size_t fade = taps / 8;
    for (std::size_t i = 0; i < fade; ++i) {
      const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * (i + 1.0) / fade));
      h[taps - fade + i] *= w;
    }
    taps_ = std::move(h);
  }

  double sample_rate() const { return sample_rate_; }
  const std::vector<double>& taps() const { return taps_; }

  // Magnitude (dB) of the realised FIR at f_hz by direct DTFT evaluation.
  double response_db(double f_hz) const {
    const double w = kTwoPi * f_hz / sample_rate_;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < taps_.size(); ++i) {
      re += taps_[i] * std::cos(w * static_cast<double>(i));
      im -= taps_[i] * std::sin(w * static_cast<double>(i));
    }
    return 10.0 * std::log10(re * re + im * im);
  }

  CalibratedSignal apply(const CalibratedSignal& signal) const {
    if (signal.sample_rate() != sample_rate_) {
      throw std::invalid_argument("ear filter designed for a different sample rate");
    }
    return CalibratedSignal(fft_convolve_causal(signal.samples(), taps_), sample_rate_);
  }

 private:
  double sample_rate_;
  std::vector<double> taps_;
};

inline CalibratedSignal apply_ear_filter(const CalibratedSignal& signal,
                                         const EarTransferTable& table) {
  return EarFilter(table, signal.sample_rate()).apply(signal);
}

}  // namespace sqm
