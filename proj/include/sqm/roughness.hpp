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

// Roughness from the modulation analysis of specific loudness.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqm/filterbank.hpp"
#include "sqm/loudness.hpp"
#include "sqm/metric_series.hpp"
#include "sqm/modulation.hpp"

namespace sqm {

// Channel weighting w_R over the ERB-number, interpolated linearly and held
// constant beyond the ends.
class RoughnessWeights {
 public:
  // Flat weight giving 1 asper for a 1 kHz, 60 dB tone fully modulated at
  // 70 Hz through the gammatone pipeline.
  static constexpr double kDefaultWeight = 0.05782;

  RoughnessWeights() : RoughnessWeights({1.0, 40.0}, {kDefaultWeight, kDefaultWeight}) {}
  RoughnessWeights(std::vector<double> cam, std::vector<double> weight)
      : cam_(std::move(cam)), weight_(std::move(weight)) {
    if (cam_.empty() || cam_.size() != weight_.size()) {
      throw std::invalid_argument("roughness weight table needs matching columns");
    }
    for (std::size_t i = 0; i < cam_.size(); ++i) {
      if (!std::isfinite(cam_[i]) || !(weight_[i] >= 0.0) || !std::isfinite(weight_[i])) {
        throw std::invalid_argument("roughness weights must be finite and non-negative");
      }
      if (i > 0 && !(cam_[i] > cam_[i - 1])) {
        throw std::invalid_argument("roughness weight Cam values must increase strictly");
      }
    }
  }

  const std::vector<double>& cams() const { return cam_; }
  const std::vector<double>& weights() const { return weight_; }

  double operator()(double cam) const {
    if (cam <= cam_.front()) return weight_.front();
    if (cam >= cam_.back()) return weight_.back();
    const auto it = std::upper_bound(cam_.begin(), cam_.end(), cam);
    const std::size_t i = static_cast<std::size_t>(it - cam_.begin());
    const double t = (cam - cam_[i - 1]) / (cam_[i] - cam_[i - 1]);
    return weight_[i - 1] + t * (weight_[i] - weight_[i - 1]);
  }

  RoughnessWeights scaled(double factor) const {
    std::vector<double> w(weight_);
    for (double& v : w) v *= factor;
    return RoughnessWeights(cam_, std::move(w));
  }

 private:
  std::vector<double> cam_;
  std::vector<double> weight_;
};

// Parses `cam weight` rows; `#` starts a comment.
inline RoughnessWeights parse_roughness_weights(std::istream& in) {
  std::vector<double> cam, weight;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream s(line);
    double c = 0.0, w = 0.0;
    if (!(s >> c)) continue;
    std::string extra;
    if (!(s >> w) || (s >> extra)) {
      throw std::runtime_error("roughness weight line " + std::to_string(line_no) +
                               ": expected `cam weight`");
    }
    cam.push_back(c);
    weight.push_back(w);
  }
  return RoughnessWeights(std::move(cam), std::move(weight));
}

inline RoughnessWeights load_roughness_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open roughness weight table: " + path);
  return parse_roughness_weights(in);
}

struct RoughnessParams {
  double q_r = 3.15e-3;
  RoughnessWeights weights;

  static RoughnessParams defaults(FilterbankKind kind) {
    RoughnessParams p;
    p.q_r = kind == FilterbankKind::kGammatone ? 3.15e-3 : 3.20e-3;
    return p;
  }
};

// R'_k = (w_R,k dL_k I_k)^2 with I_k the edge-dependent correlation factor.
inline double specific_roughness(double delta_level, double correlation_factor,
                                 double weight) {
  const double v = weight * delta_level * correlation_factor;
  return v * v;
}

// R = Q_R sum_k R'_k with dL_k averaged over the steady window. The series
// applies the same sum to the instantaneous dL_k(t).
inline MetricSeries roughness(const LoudnessResult& loudness, const SonePhonMap& map,
                              const RoughnessParams& params,
                              ModulationAnalysis* analysis = nullptr) {
  const ChannelBank& bank = loudness.specific;
  MetricSeries out;
  out.unit = "asper";
  out.sample_rate = bank.sample_rate();
  out.start_s = loudness.steady_begin / bank.sample_rate();
  out.series.assign(bank.length() - loudness.steady_begin, 0.0);
  std::vector<double> w(bank.channels());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = params.weights(bank.grid().cam(k));

  ModulationAnalysis a = analyze_modulation(
      loudness, map, ModulationSettings::roughness(),
      [&](std::size_t k, std::span<const double> dl, const CorrelationSet& c) {
        const double f = c.factor(k);
        for (std::size_t t = 0; t < dl.size(); ++t) {
          out.series[t] += params.q_r * specific_roughness(dl[t], f, w[k]);
        }
      });
  out.per_channel.resize(bank.channels());
  double total = 0.0;
  for (std::size_t k = 0; k < out.per_channel.size(); ++k) {
    out.per_channel[k] = specific_roughness(a.mean_delta[k], a.correlations.factor(k), w[k]);
    total += out.per_channel[k];
  }
  out.value = params.q_r * total;
  if (analysis != nullptr) *analysis = std::move(a);
  return out;
}

}  // namespace sqm
