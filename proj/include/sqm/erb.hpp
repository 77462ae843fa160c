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

// ERB_N scale and the 0.1-Cam channel grids.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sqm {

// Equivalent rectangular bandwidth (Hz) of the normal-hearing auditory
// filter centred at f_hz.
inline double erb_of(double f_hz) {
  if (!(f_hz >= 0.0)) throw std::domain_error("erb_of: frequency must be >= 0");
  return 24.7 * (4.37 * f_hz / 1000.0 + 1.0);
}

inline double cam_to_freq(double cam) {
  if (!(cam > 0.0)) throw std::domain_error("cam_to_freq: ERB number must be > 0");
  return (std::pow(10.0, cam / 21.4) - 1.0) * 1000.0 / 4.37;
}

inline double freq_to_cam(double f_hz) {
  if (!(f_hz > 0.0)) throw std::domain_error("freq_to_cam: frequency must be > 0");
  return 21.4 * std::log10(4.37 * f_hz / 1000.0 + 1.0);
}

// Channels spaced evenly on the ERB-number axis.
//
// The grid is stored as integer tenths of a Cam so that channel k sits at
// exactly start + k * step with no accumulated rounding.
class ChannelGrid {
 public:
  static constexpr double kStepCam = 0.1;

  ChannelGrid() = default;
  ChannelGrid(double start_cam, double end_cam) {
    first_tenth_ = static_cast<long>(std::lround(start_cam * 10.0));
    const long last = static_cast<long>(std::lround(end_cam * 10.0));
    if (first_tenth_ <= 0 || last < first_tenth_) {
      throw std::invalid_argument("invalid channel grid range");
    }
    count_ = static_cast<std::size_t>(last - first_tenth_ + 1);
  }

  // 1.8-38.9 Cam, 372 channels.
  static ChannelGrid gammatone() { return ChannelGrid(1.8, 38.9); }
  // 2.6-36.9 Cam, 344 channels.
  static ChannelGrid gammachirp() { return ChannelGrid(2.6, 36.9); }

  std::size_t size() const { return count_; }
  double start_cam() const { return first_tenth_ / 10.0; }
  double end_cam() const { return cam(count_ - 1); }
  double step_cam() const { return kStepCam; }

  double cam(std::size_t k) const {
    return static_cast<double>(first_tenth_ + static_cast<long>(k)) / 10.0;
  }
  double freq(std::size_t k) const { return cam_to_freq(cam(k)); }
  double erb(std::size_t k) const { return erb_of(freq(k)); }

  std::vector<double> cams() const {
    std::vector<double> out(count_);
    for (std::size_t k = 0; k < count_; ++k) out[k] = cam(k);
    return out;
  }
  std::vector<double> freqs() const {
    std::vector<double> out(count_);
    for (std::size_t k = 0; k < count_; ++k) out[k] = freq(k);
    return out;
  }

  // Index of the channel whose centre is closest to f_hz on the Cam axis.
  std::size_t nearest(double f_hz) const {
    const double c = freq_to_cam(f_hz);
    const long t = std::lround(c * 10.0) - first_tenth_;
    if (t < 0) return 0;
    if (static_cast<std::size_t>(t) >= count_) return count_ - 1;
    return static_cast<std::size_t>(t);
  }

  bool operator==(const ChannelGrid&) const = default;

 private:
  long first_tenth_ = 18;
  std::size_t count_ = 0;
};

}  // namespace sqm
