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


#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "sqm/analyzer.hpp"
#include "sqm/fluctuation.hpp"
#include "sqm/roughness.hpp"
#include "sqm/stimuli.hpp"

namespace sqm {
namespace {

const Analyzer& gt() {
  static const Analyzer a(AnalyzerOptions::defaults(FilterbankKind::kGammatone));
  return a;
}

TEST(RoughnessWeightsTest, InterpolationAndHold) {
  const RoughnessWeights w({2.0, 4.0}, {1.0, 3.0});
  EXPECT_DOUBLE_EQ(w(1.0), 1.0);
  EXPECT_DOUBLE_EQ(w(3.0), 2.0);
  EXPECT_DOUBLE_EQ(w(10.0), 3.0);
  EXPECT_DOUBLE_EQ(w.scaled(2.0)(3.0), 4.0);
  EXPECT_THROW(RoughnessWeights({2.0, 2.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(RoughnessWeights({2.0}, {-1.0}), std::invalid_argument);
}

TEST(RoughnessWeightsTest, Parse) {
  std::istringstream in("# cam weight\n1 0.5\n\n20 0.7  # mid\n40 0.9\n");
  const RoughnessWeights w = parse_roughness_weights(in);
  ASSERT_EQ(w.cams().size(), 3u);
  EXPECT_DOUBLE_EQ(w(20.0), 0.7);
  std::istringstream bad("1 0.5 9\n");
  EXPECT_THROW(parse_roughness_weights(bad), std::runtime_error);
  EXPECT_THROW(load_roughness_weights("/nonexistent/weights.txt"), std::runtime_error);
}

TEST(SpecificMetrics, Formulas) {
  EXPECT_DOUBLE_EQ(specific_roughness(10.0, 0.5, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(specific_fluctuation(32.0, 0.5, 0.6), std::pow(32.0, 0.6) * 0.25);
  EXPECT_EQ(specific_fluctuation(0.0, 1.0), 0.0);
}

TEST(Defaults, Coefficients) {
  EXPECT_EQ(RoughnessParams::defaults(FilterbankKind::kGammatone).q_r, 3.15e-3);
  EXPECT_EQ(RoughnessParams::defaults(FilterbankKind::kGammachirp).q_r, 3.20e-3);
  EXPECT_EQ(FluctuationParams::defaults(FilterbankKind::kGammatone).q_f, 30.2e-3);
  EXPECT_EQ(FluctuationParams::defaults(FilterbankKind::kGammachirp).q_f, 30.0e-3);
  EXPECT_EQ(SharpnessParams::defaults(FilterbankKind::kGammachirp).q_s, 2.23e-3);
}

TEST(Roughness, ReferenceToneIsAboutOneAsper) {
  const auto r = gt().compute(Metric::kRoughness, gen_am(1000.0, 70.0, 1.0, 1.0, 60.0));
  EXPECT_NEAR(r.value, 1.0, 0.05);
  EXPECT_EQ(r.unit, "asper");
  double sum = 0.0;
  for (double v : r.per_channel) sum += v;
  EXPECT_NEAR(RoughnessParams::defaults(FilterbankKind::kGammatone).q_r * sum, r.value,
              1e-12);
  EXPECT_EQ(r.series.size(), 44100u - steady_start(44100, 44100.0));
}

TEST(Roughness, SilenceAndUnmodulatedToneAreNearZero) {
  const CalibratedSignal silence(std::vector<double>(22050, 0.0), 44100.0);
  EXPECT_EQ(gt().value(Metric::kRoughness, silence), 0.0);
  EXPECT_EQ(gt().value(Metric::kFluctuation, silence), 0.0);
  EXPECT_LT(gt().value(Metric::kRoughness, gen_sine(1000.0, 1.0, 60.0)), 0.01);
}

TEST(Roughness, AnalysisOutputIsConsistent) {
  const LoudnessResult n = gt().loudness(gen_am(2000.0, 50.0, 1.0, 0.6, 60.0));
  ModulationAnalysis a;
  const auto r = roughness(n, gt().sone_phon_map(), gt().options().roughness, &a);
  ASSERT_EQ(a.mean_delta.size(), n.specific.channels());
  const RoughnessWeights& w = gt().options().roughness.weights;
  for (std::size_t k = 0; k < a.mean_delta.size(); k += 37) {
    EXPECT_DOUBLE_EQ(r.per_channel[k],
                     specific_roughness(a.mean_delta[k], a.correlations.factor(k),
                                        w(n.specific.grid().cam(k))));
  }
}

TEST(Fluctuation, SlowModulationBeatsFast) {
  const double slow = gt().value(Metric::kFluctuation, gen_am(1000.0, 4.0, 1.0, 2.0, 70.0));
  const double fast = gt().value(Metric::kFluctuation, gen_am(1000.0, 70.0, 1.0, 2.0, 70.0));
  EXPECT_GT(slow, 3.0 * fast);
  EXPECT_GT(slow, 0.0);
}

TEST(AnalyzerTest, Names) {
  EXPECT_EQ(parse_metric("fluctuation"), Metric::kFluctuation);
  EXPECT_THROW(parse_metric("tonality"), std::invalid_argument);
  EXPECT_EQ(parse_filterbank("gc"), FilterbankKind::kGammachirp);
  EXPECT_THROW(parse_filterbank("roex"), std::invalid_argument);
  EXPECT_STREQ(short_name(FilterbankKind::kGammatone), "gt");
}

TEST(AnalyzerTest, LoudnessSeries) {
  const auto l = gt().compute(Metric::kLoudness, gen_sine(1000.0, 0.4, 40.0));
  EXPECT_EQ(l.unit, "sone");
  EXPECT_NEAR(l.value, 1.0, 0.15);
  EXPECT_EQ(l.per_channel.size(), 372u);
}

}  // namespace
}  // namespace sqm
