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

// One filterbank variant with all four metrics and their defaults.

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "sqm/filterbank.hpp"
#include "sqm/fluctuation.hpp"
#include "sqm/loudness.hpp"
#include "sqm/metric_series.hpp"
#include "sqm/roughness.hpp"
#include "sqm/sharpness.hpp"
#include "sqm/signal.hpp"

namespace sqm {

enum class Metric { kLoudness, kSharpness, kRoughness, kFluctuation };

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::kLoudness: return "loudness";
    case Metric::kSharpness: return "sharpness";
    case Metric::kRoughness: return "roughness";
    case Metric::kFluctuation: return "fluctuation";
  }
  return "?";
}

inline Metric parse_metric(const std::string& name) {
  for (Metric m : {Metric::kLoudness, Metric::kSharpness, Metric::kRoughness,
                   Metric::kFluctuation}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown metric: " + name);
}

inline FilterbankKind parse_filterbank(const std::string& name) {
  if (name == "gt") return FilterbankKind::kGammatone;
  if (name == "gc") return FilterbankKind::kGammachirp;
  throw std::invalid_argument("unknown filterbank: " + name + " (expected gt or gc)");
}

inline const char* short_name(FilterbankKind kind) {
  return kind == FilterbankKind::kGammatone ? "gt" : "gc";
}

struct AnalyzerOptions {
  LoudnessOptions loudness;
  SharpnessParams sharpness;
  RoughnessParams roughness;
  FluctuationParams fluctuation;

  static AnalyzerOptions defaults(FilterbankKind kind) {
    return {LoudnessOptions::defaults(kind), SharpnessParams::defaults(kind),
            RoughnessParams::defaults(kind), FluctuationParams::defaults(kind)};
  }
  FilterbankKind kind() const { return loudness.kind; }
};

// Caches E_0 and the sone/phon map of its loudness model; not thread-safe.
class Analyzer {
 public:
  explicit Analyzer(AnalyzerOptions options, double sample_rate = kDefaultSampleRate)
      : options_(std::move(options)), model_(options_.loudness, sample_rate) {}

  const AnalyzerOptions& options() const { return options_; }
  FilterbankKind kind() const { return options_.kind(); }
  double sample_rate() const { return model_.sample_rate(); }
  const LoudnessModel& model() const { return model_; }
  const SonePhonMap& sone_phon_map() const { return model_.sone_phon_map(); }

  LoudnessResult loudness(const CalibratedSignal& signal) const { return model_.analyze(signal); }

  // Metric of an already computed loudness result.
  MetricSeries compute(Metric metric, const LoudnessResult& n) const {
    switch (metric) {
      case Metric::kLoudness: {
        MetricSeries out;
        out.unit = "sone";
        out.sample_rate = n.specific.sample_rate();
        out.series = n.total;
        out.value = n.mean;
        out.per_channel = n.mean_specific();
        return out;
      }
      case Metric::kSharpness: return sharpness(n, options_.sharpness);
      case Metric::kRoughness: return roughness(n, sone_phon_map(), options_.roughness);
      case Metric::kFluctuation: return fluctuation(n, sone_phon_map(), options_.fluctuation);
    }
    throw std::invalid_argument("unknown metric");
  }

  MetricSeries compute(Metric metric, const CalibratedSignal& signal) const {
    return compute(metric, loudness(signal));
  }

  double value(Metric metric, const CalibratedSignal& signal) const {
    return compute(metric, signal).value;
  }

 private:
  AnalyzerOptions options_;
  LoudnessModel model_;
};

}  // namespace sqm
