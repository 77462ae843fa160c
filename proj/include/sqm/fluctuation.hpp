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

// Fluctuation strength from the modulation analysis of specific loudness.

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sqm/filterbank.hpp"
#include "sqm/loudness.hpp"
#include "sqm/metric_series.hpp"
#include "sqm/modulation.hpp"

namespace sqm {

struct FluctuationParams {
  double q_f = 30.2e-3;
  double level_exponent = 0.6;

  static FluctuationParams defaults(FilterbankKind kind) {
    FluctuationParams p;
    p.q_f = kind == FilterbankKind::kGammatone ? 30.2e-3 : 30.0e-3;
    return p;
  }
};

// F'_k = dL_k^0.6 I_k^2 with I_k the edge-dependent correlation factor.
inline double specific_fluctuation(double delta_level, double correlation_factor,
                                   double exponent = 0.6) {
  return std::pow(delta_level, exponent) * correlation_factor * correlation_factor;
}

// F = Q_F sum_k F'_k with dL_k averaged over the steady window. The series
// applies the same sum to the instantaneous dL_k(t).
inline MetricSeries fluctuation(const LoudnessResult& loudness, const SonePhonMap& map,
                                const FluctuationParams& params,
                                ModulationAnalysis* analysis = nullptr) {
  const ChannelBank& bank = loudness.specific;
  MetricSeries out;
  out.unit = "vacil";
  out.sample_rate = bank.sample_rate();
  out.start_s = loudness.steady_begin / bank.sample_rate();
  out.series.assign(bank.length() - loudness.steady_begin, 0.0);

  ModulationAnalysis a = analyze_modulation(
      loudness, map, ModulationSettings::fluctuation(),
      [&](std::size_t k, std::span<const double> dl, const CorrelationSet& c) {
        const double f = c.factor(k);
        for (std::size_t t = 0; t < dl.size(); ++t) {
          out.series[t] += params.q_f * specific_fluctuation(dl[t], f, params.level_exponent);
        }
      });
  out.per_channel.resize(bank.channels());
  double total = 0.0;
  for (std::size_t k = 0; k < out.per_channel.size(); ++k) {
    out.per_channel[k] =
        specific_fluctuation(a.mean_delta[k], a.correlations.factor(k), params.level_exponent);
    total += out.per_channel[k];
  }
  out.value = params.q_f * total;
  if (analysis != nullptr) *analysis = std::move(a);
  return out;
}

}  // namespace sqm
