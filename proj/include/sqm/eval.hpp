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

// Evaluation grids: stimulus sweeps run through both filterbank variants and
// written as CSV.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqm/analyzer.hpp"
#include "sqm/stimuli.hpp"

namespace sqm {

enum class EvalGrid {
  kTable1,
  kSharpnessNoise,
  kSharpnessLoudness,
  kRoughModfreq,
  kRoughSpl,
  kRoughCarrier,
  kRoughDepth,
  kFluctModfreq,
  kFluctSpl,
  kFluctDepth,
};

inline constexpr std::array<EvalGrid, 10> kAllEvalGrids = {
    EvalGrid::kTable1,       EvalGrid::kSharpnessNoise, EvalGrid::kSharpnessLoudness,
    EvalGrid::kRoughModfreq, EvalGrid::kRoughSpl,       EvalGrid::kRoughCarrier,
    EvalGrid::kRoughDepth,   EvalGrid::kFluctModfreq,   EvalGrid::kFluctSpl,
    EvalGrid::kFluctDepth,
};

inline const char* to_string(EvalGrid g) {
  switch (g) {
    case EvalGrid::kTable1: return "table1";
    case EvalGrid::kSharpnessNoise: return "sharpness-noise";
    case EvalGrid::kSharpnessLoudness: return "sharpness-loudness";
    case EvalGrid::kRoughModfreq: return "rough-modfreq";
    case EvalGrid::kRoughSpl: return "rough-spl";
    case EvalGrid::kRoughCarrier: return "rough-carrier";
    case EvalGrid::kRoughDepth: return "rough-depth";
    case EvalGrid::kFluctModfreq: return "fluct-modfreq";
    case EvalGrid::kFluctSpl: return "fluct-spl";
    case EvalGrid::kFluctDepth: return "fluct-depth";
  }
  return "?";
}

inline EvalGrid parse_eval_grid(const std::string& name) {
  for (EvalGrid g : kAllEvalGrids) {
    if (name == to_string(g)) return g;
  }
  throw std::invalid_argument("unknown eval grid: " + name);
}

inline Metric grid_metric(EvalGrid g) {
  switch (g) {
    case EvalGrid::kTable1: return Metric::kLoudness;
    case EvalGrid::kSharpnessNoise:
    case EvalGrid::kSharpnessLoudness: return Metric::kSharpness;
    case EvalGrid::kRoughModfreq:
    case EvalGrid::kRoughSpl:
    case EvalGrid::kRoughCarrier:
    case EvalGrid::kRoughDepth: return Metric::kRoughness;
    default: return Metric::kFluctuation;
  }
}

struct EvalDurations {
  double loudness_s = 0.5;
  double sharpness_s = 0.5;
  double roughness_s = 1.0;
  double fluctuation_s = 4.0;
};

// One stimulus of a grid. `target_sone` > 0 asks for loudness scaling per
// variant before the metric is computed.
struct EvalPoint {
  std::vector<std::string> labels;  // values of the grid's parameter columns
  StimulusSpec spec;
  double target_sone = 0.0;
};

struct EvalGridSpec {
  EvalGrid grid;
  Metric metric;
  std::vector<std::string> columns;
  std::vector<EvalPoint> points;
};

// Fixed-format number used in every CSV cell.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// `count` points from `a` to `b` spaced evenly in log frequency, rounded to
// whole hertz.
inline std::vector<double> log_spaced_hz(double a, double b, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(std::round(a * std::pow(b / a, t)));
  }
  return out;
}

inline std::vector<double> third_octave_centres(double lo, double hi) {
  static constexpr double kCentres[] = {200,  250,  315,  400,  500,  630,  800,
                                        1000, 1250, 1600, 2000, 2500, 3150, 4000,
                                        5000, 6300, 8000, 10000};
  std::vector<double> out;
  for (double c : kCentres) {
    if (c >= lo && c <= hi) out.push_back(c);
  }
  return out;
}

inline EvalGridSpec eval_grid_spec(EvalGrid grid, const EvalDurations& dur = {},
                                   std::uint64_t seed = 1,
                                   double sample_rate = kDefaultSampleRate) {
  EvalGridSpec g{grid, grid_metric(grid), {}, {}};
  const auto f = format_number;
  auto point = [&](std::vector<std::string> labels, StimulusSpec s, double target = 0.0) {
    s.sample_rate = sample_rate;
    g.points.push_back({std::move(labels), s, target});
  };
  auto sine = [](double hz, double spl, double d) {
    StimulusSpec s;
    s.kind = StimulusKind::kSine;
    s.carrier_hz = hz;
    s.level_db_spl = spl;
    s.duration_s = d;
    return s;
  };
  auto am = [](double carrier, double fm, double depth, double spl, double d) {
    StimulusSpec s;
    s.kind = StimulusKind::kAm;
    s.carrier_hz = carrier;
    s.mod_freq_hz = fm;
    s.mod_depth = depth;
    s.level_db_spl = spl;
    s.duration_s = d;
    return s;
  };
  auto fm_tone = [](double carrier, double fm, double dev, double spl, double d) {
    StimulusSpec s;
    s.kind = StimulusKind::kFm;
    s.carrier_hz = carrier;
    s.mod_freq_hz = fm;
    s.freq_deviation_hz = dev;
    s.level_db_spl = spl;
    s.duration_s = d;
    return s;
  };
  constexpr double kRoughModFreqs[] = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200};
  constexpr double kFluctModFreqs[] = {0.25, 0.5, 1, 2, 4, 8, 16, 32};

  switch (grid) {
    case EvalGrid::kTable1:
      g.columns = {"freq_hz", "spl_db"};
      point({"100", "50"}, sine(100, 50, dur.loudness_s));
      for (int l = 20; l <= 80; l += 10) point({"1000", f(l)}, sine(1000, l, dur.loudness_s));
      for (int l = 20; l <= 80; l += 20) point({"3000", f(l)}, sine(3000, l, dur.loudness_s));
      break;
    case EvalGrid::kSharpnessNoise: {
      g.columns = {"noise", "center_hz", "bandwidth_hz", "low_hz", "high_hz"};
      // Initial level only; every point is rescaled to 4 sones.
      auto noise = [&](StimulusKind kind, double lo, double hi) {
        StimulusSpec s;
        s.kind = kind;
        s.low_cut_hz = lo;
        s.high_cut_hz = hi;
        s.level_db_spl = 60.0;
        s.duration_s = dur.sharpness_s;
        s.seed = seed;
        return s;
      };
      for (double c : third_octave_centres(200, 10000)) {
        StimulusSpec s = noise(StimulusKind::kNbNoise, 0, 0);
        s.center_hz = c;
        s.bandwidth_hz = critical_bandwidth(c);
        point({"nb", f(c), f(s.bandwidth_hz), f(c - s.bandwidth_hz / 2), f(c + s.bandwidth_hz / 2)},
              s, 4.0);
      }
      for (double lo : log_spaced_hz(250, 8500, 7)) {
        point({"hp", "", f(10000 - lo), f(lo), "10000"}, noise(StimulusKind::kHpNoise, lo, 10000),
              4.0);
      }
      for (double hi : log_spaced_hz(350, 10500, 7)) {
        point({"lp", "", f(hi - 200), "200", f(hi)}, noise(StimulusKind::kLpNoise, 200, hi), 4.0);
      }
      break;
    }
    case EvalGrid::kSharpnessLoudness:
      g.columns = {"freq_hz", "target_sone"};
      for (double hz : {500.0, 1000.0, 2000.0, 4000.0, 8000.0}) {
        for (double n : {2.0, 7.0, 14.0, 28.0}) {
          point({f(hz), f(n)}, sine(hz, 60.0, dur.sharpness_s), n);
        }
      }
      break;
    case EvalGrid::kRoughModfreq:
      g.columns = {"signal", "carrier_hz", "mod_freq_hz", "spl_db"};
      for (double m : kRoughModFreqs) {
        point({"am", "1000", f(m), "70"}, am(1000, m, 1.0, 70, dur.roughness_s));
      }
      for (double m : kRoughModFreqs) {
        point({"fm", "1500", f(m), "70"}, fm_tone(1500, m, 700, 70, dur.roughness_s));
      }
      break;
    case EvalGrid::kRoughSpl:
      g.columns = {"signal", "carrier_hz", "mod_freq_hz", "spl_db"};
      for (int l = 40; l <= 80; l += 10) {
        point({"am", "1000", "70", f(l)}, am(1000, 70, 1.0, l, dur.roughness_s));
      }
      for (int l = 40; l <= 80; l += 10) {
        point({"fm", "1500", "70", f(l)}, fm_tone(1500, 70, 700, l, dur.roughness_s));
      }
      break;
    case EvalGrid::kRoughCarrier:
      g.columns = {"carrier_hz", "mod_freq_hz", "spl_db"};
      for (double c : {1000.0, 2000.0, 4000.0, 8000.0}) {
        for (double m : kRoughModFreqs) {
          point({f(c), f(m), "60"}, am(c, m, 1.0, 60, dur.roughness_s));
        }
      }
      break;
    case EvalGrid::kRoughDepth:
      g.columns = {"depth", "carrier_hz", "mod_freq_hz", "spl_db"};
      for (int d = 0; d <= 10; ++d) {
        point({f(d / 10.0), "1000", "70", "60"}, am(1000, 70, d / 10.0, 60, dur.roughness_s));
      }
      break;
    case EvalGrid::kFluctModfreq:
      g.columns = {"signal", "carrier_hz", "mod_freq_hz", "spl_db"};
      for (double m : kFluctModFreqs) {
        point({"am", "1000", f(m), "70"}, am(1000, m, 1.0, 70, dur.fluctuation_s));
      }
      for (double m : kFluctModFreqs) {
        point({"fm", "1500", f(m), "70"}, fm_tone(1500, m, 700, 70, dur.fluctuation_s));
      }
      break;
    case EvalGrid::kFluctSpl:
      g.columns = {"carrier_hz", "mod_freq_hz", "spl_db"};
      for (int l = 50; l <= 80; l += 10) {
        point({"1000", "4", f(l)}, am(1000, 4, 1.0, l, dur.fluctuation_s));
      }
      break;
    case EvalGrid::kFluctDepth:
      g.columns = {"depth", "carrier_hz", "mod_freq_hz", "spl_db"};
      for (int d = 0; d <= 10; ++d) {
        point({f(d / 10.0), "1000", "4", "70"}, am(1000, 4, d / 10.0, 70, dur.fluctuation_s));
      }
      break;
  }
  return g;
}

struct EvalResult {
  EvalGridSpec spec;
  std::vector<double> gt;
  std::vector<double> gc;

  // Values divided by the largest value of the column (0 if that is 0).
  static std::vector<double> normalized(const std::vector<double>& v) {
    const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    std::vector<double> out(v.size(), 0.0);
    if (peak > 0.0) {
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / peak;
    }
    return out;
  }

  std::string to_csv() const {
    std::ostringstream out;
    for (const auto& c : spec.columns) out << c << ',';
    out << "gt_value,gc_value,gt_normalized,gc_normalized\n";
    const auto gt_n = normalized(gt), gc_n = normalized(gc);
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
      for (const auto& l : spec.points[i].labels) out << l << ',';
      out << format_number(gt[i]) << ',' << format_number(gc[i]) << ','
          << format_number(gt_n[i]) << ',' << format_number(gc_n[i]) << '\n';
    }
    return out.str();
  }
};

// Stimulus as analysed by one variant: loudness-targeted points are scaled
// with that variant's own loudness.
inline CalibratedSignal prepare_stimulus(const EvalPoint& p, const Analyzer& analyzer) {
  CalibratedSignal s = generate(p.spec);
  if (p.target_sone > 0.0) {
    s = scale_to_loudness(s, p.target_sone, [&](const CalibratedSignal& x) {
      return analyzer.loudness(x).mean;
    });
  }
  return s;
}

using EvalProgress = std::function<void(FilterbankKind, std::size_t, std::size_t)>;

// Runs every point through both analyzers, in grid order.
inline EvalResult run_eval(const EvalGridSpec& spec, const Analyzer& gt, const Analyzer& gc,
                           const EvalProgress& progress = {}) {
  EvalResult r{spec, {}, {}};
  for (const Analyzer* a : {&gt, &gc}) {
    auto& out = a->kind() == FilterbankKind::kGammatone ? r.gt : r.gc;
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
      if (progress) progress(a->kind(), i, spec.points.size());
      out.push_back(a->value(spec.metric, prepare_stimulus(spec.points[i], *a)));
    }
  }
  return r;
}

}  // namespace sqm
