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
#include <vector>

#include <gtest/gtest.h>

#include "sqm/loudness.hpp"
#include "sqm/sharpness.hpp"

namespace sqm {
namespace {

constexpr double kFs = 1000.0;

// Steady bank with N'_k = value[k] at every sample.
LoudnessResult steady_bank(const std::vector<double>& value) {
  const ChannelGrid grid = ChannelGrid::gammatone();
  std::vector<std::vector<double>> rows(grid.size());
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].assign(50, value[k]);
  return make_loudness_result(ChannelBank(grid, kFs, std::move(rows)), 0.01);
}

LoudnessResult single_channel(std::size_t k, double level) {
  std::vector<double> v(ChannelGrid::gammatone().size(), 0.0);
  v[k] = level;
  return steady_bank(v);
}

TEST(Sharpness, WeightPolynomial) {
  EXPECT_NEAR(sharpness_weight(10.0), 1.19 - 4.9 + 7.17 - 2.01, 1e-12);
  for (double c = 1.0; c < 40.0; c += 0.5) {
    EXPECT_GT(sharpness_weight(c + 0.5), sharpness_weight(c));
  }
}

TEST(Sharpness, SingleChannelClosedForm) {
  const SharpnessParams p{2.29e-3};
  const ChannelGrid grid = ChannelGrid::gammatone();
  for (std::size_t k : {0u, 100u, 371u}) {
    const double level = 3.0;
    const double n = 0.1 * level;
    const double expected =
        p.q_s * sharpness_weight(grid.cam(k)) * level / std::log((n + 20.0) / 20.0);
    EXPECT_NEAR(sharpness(single_channel(k, level), p).value, expected,
                1e-9 * std::abs(expected));
  }
}

TEST(Sharpness, IncreasesWithChannel) {
  const SharpnessParams p = SharpnessParams::defaults(FilterbankKind::kGammatone);
  double prev = -1e300;
  for (std::size_t k = 0; k < ChannelGrid::gammatone().size(); k += 4) {
    const double s = sharpness(single_channel(k, 1.0), p).value;
    EXPECT_GT(s, prev) << k;
    prev = s;
  }
}

TEST(Sharpness, DependsOnLevelOnlyThroughLogTerm) {
  const SharpnessParams p{1.0};
  std::vector<double> shape(ChannelGrid::gammatone().size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    shape[k] = std::exp(-0.5 * std::pow((k - 150.0) / 30.0, 2));
  }
  for (double c : {0.5, 2.0, 10.0}) {
    std::vector<double> scaled(shape);
    for (double& v : scaled) v *= c;
    const LoudnessResult a = steady_bank(shape);
    const LoudnessResult b = steady_bank(scaled);
    const double ratio = sharpness(b, p).value / sharpness(a, p).value;
    const double expected =
        c * std::log((a.mean + 20.0) / 20.0) / std::log((b.mean + 20.0) / 20.0);
    EXPECT_NEAR(ratio, expected, 1e-9);
  }
}

TEST(Sharpness, SilentInputIsUndefined) {
  const std::vector<double> zero(ChannelGrid::gammatone().size(), 0.0);
  EXPECT_THROW(sharpness(steady_bank(zero), SharpnessParams{}), SilentInputError);
}

TEST(Sharpness, UndefinedSamplesAreSkipped) {
  const ChannelGrid grid = ChannelGrid::gammatone();
  std::vector<std::vector<double>> rows(grid.size(), std::vector<double>(40, 0.0));
  for (std::size_t t = 20; t < 40; ++t) rows[200][t] = 2.0;
  const LoudnessResult r = make_loudness_result(ChannelBank(grid, kFs, std::move(rows)), 0.01);
  const SharpnessParams p{1.0};
  const auto s = sharpness(r, p);
  EXPECT_EQ(s.series[15], 0.0);
  EXPECT_NEAR(s.value, s.series[30], 1e-12);
  EXPECT_EQ(s.unit, "acum");
}

}  // namespace
}  // namespace sqm
