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

// Loudness-dependent sharpness from the specific-loudness bank.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sqm/filterbank.hpp"
#include "sqm/loudness.hpp"
#include "sqm/metric_series.hpp"
#include "sqm/signal.hpp"

namespace sqm {

struct SharpnessParams {
  double q_s = 2.29e-3;

  static SharpnessParams defaults(FilterbankKind kind) {
    return {kind == FilterbankKind::kGammatone ? 2.29e-3 : 2.23e-3};
  }
};

// Cubic weighting in the ERB-number.
inline double sharpness_weight(double cam) {
  return ((1.19e-3 * cam - 4.90e-2) * cam + 7.17e-1) * cam - 2.01;
}

// S(t) = Q_s sum_k q_k N'_k cam_k / sum_k N'_k with
// q_k = w_k sum_k N'_k / (cam_k ln((N + 20) / 20)).
// Samples with zero loudness are undefined; they are written as 0 and left
// out of the average. `per_channel` holds each channel's mean share of S.
// Throws SilentInputError if no steady sample is defined.
inline MetricSeries sharpness(const LoudnessResult& loudness,
                              const SharpnessParams& params) {
  const ChannelBank& bank = loudness.specific;
  const ChannelGrid& grid = bank.grid();
  const std::size_t n = bank.length();
  std::vector<double> cam(grid.size()), w(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cam[k] = grid.cam(k);
    w[k] = sharpness_weight(cam[k]);
  }
  std::vector<double> sum(n, 0.0), log_term(n, 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto row = bank[k];
    for (std::size_t t = 0; t < n; ++t) sum[t] += row[t];
  }
  std::vector<char> defined(n, 0);
  std::size_t steady_defined = 0;
  for (std::size_t t = 0; t < n; ++t) {
    log_term[t] = std::log1p(loudness.total[t] / 20.0);
    defined[t] = sum[t] > 0.0 && log_term[t] > 0.0;
    if (defined[t] && t >= loudness.steady_begin) ++steady_defined;
  }
  if (steady_defined == 0) throw SilentInputError("sharpness is undefined for silent input");

  MetricSeries out;
  out.unit = "acum";
  out.sample_rate = bank.sample_rate();
  out.series.assign(n, 0.0);
  out.per_channel.assign(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto row = bank[k];
    long double acc = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      if (!defined[t]) continue;
      const double q = w[k] * sum[t] / (cam[k] * log_term[t]);
      const double s = params.q_s * q * row[t] * cam[k] / sum[t];
      out.series[t] += s;
      if (t >= loudness.steady_begin) acc += s;
    }
    out.per_channel[k] = static_cast<double>(acc / steady_defined);
  }
  long double acc = 0.0L;
  for (std::size_t t = loudness.steady_begin; t < n; ++t) acc += out.series[t];
  out.value = static_cast<double>(acc / steady_defined);
  return out;
}

}  // namespace sqm
