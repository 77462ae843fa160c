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
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "sqm/fft.hpp"
#include "sqm/iir.hpp"
#include "sqm/stimuli.hpp"

namespace sqm {
namespace {

double db(double v) { return 20.0 * std::log10(v); }

TEST(Butterworth, CutoffIsMinusThreeDb) {
  const double fs = 44100.0;
  for (int order : {1, 2, 3, 9}) {
    for (double fc : {0.4, 7.0, 1000.0}) {
      const SosFilter lp(butterworth(FilterType::kLowPass, order, fc, fs));
      const SosFilter hp(butterworth(FilterType::kHighPass, order, fc, fs));
      EXPECT_NEAR(db(std::abs(lp.response(fc, fs))), -3.0103, 0.01) << order << " " << fc;
      EXPECT_NEAR(db(std::abs(hp.response(fc, fs))), -3.0103, 0.01) << order << " " << fc;
      EXPECT_NEAR(std::abs(lp.response(0.0, fs)), 1.0, 1e-6);
      EXPECT_NEAR(std::abs(hp.response(0.0, fs)), 0.0, 1e-9);
    }
  }
}

TEST(Butterworth, RolloffMatchesOrder) {
  const double fs = 44100.0;
  const SosFilter lp(butterworth(FilterType::kLowPass, 9, 7.0, fs));
  // 9th order: about -54 dB per octave well above cutoff.
  const double a = db(std::abs(lp.response(28.0, fs)));
  const double b = db(std::abs(lp.response(56.0, fs)));
  EXPECT_NEAR(a - b, 54.2, 1.0);
}

TEST(Butterworth, RejectsBadCutoff) {
  EXPECT_THROW(butterworth(FilterType::kLowPass, 2, 0.0, 44100.0), std::invalid_argument);
  EXPECT_THROW(butterworth(FilterType::kLowPass, 2, 30000.0, 44100.0), std::invalid_argument);
}

TEST(SosFilter, SettleGivesSteadyOutput) {
  SosFilter lp(butterworth(FilterType::kLowPass, 9, 7.0, 44100.0));
  lp.settle(3.5);
  std::vector<double> x(1000, 3.5);
  lp.process(x);
  for (double v : x) EXPECT_NEAR(v, 3.5, 1e-7);
}

TEST(SosFilter, ProcessMatchesStep) {
  const auto sections = butterworth(FilterType::kHighPass, 3, 50.0, 44100.0);
  const auto x = white_noise(2000, 11);
  SosFilter a(sections), b(sections);
  std::vector<double> y(x);
  a.process(y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y[i], b.step(x[i]));
}

TEST(Fft, RoundTrip) {
  const auto x = white_noise(1001, 2);
  RealFft fft(1001);
  const auto y = fft.inverse(fft.forward(x));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-12);
}

TEST(Fft, ForwardMatchesDft) {
  const auto x = white_noise(30, 4);
  RealFft fft(30);
  const auto s = fft.forward(x);
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      acc += x[n] * std::polar(1.0, -kTwoPi * k * n / 30.0);
    }
    EXPECT_NEAR(std::abs(acc - s[k]), 0.0, 1e-10);
  }
}

TEST(Fft, FastSizeIsSevenSmooth) {
  for (std::size_t n : {1u, 2u, 11u, 97u, 1009u, 44100u}) {
    std::size_t m = fast_fft_size(n);
    EXPECT_GE(m, n);
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (m % p == 0) m /= p;
    }
    EXPECT_EQ(m, 1u);
  }
}

TEST(Fft, CausalConvolutionMatchesDirect) {
  const auto x = white_noise(300, 5);
  const auto h = white_noise(40, 6);
  const auto y = fft_convolve_causal(x, h);
  ASSERT_EQ(y.size(), x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < h.size() && j <= n; ++j) acc += h[j] * x[n - j];
    EXPECT_NEAR(y[n], acc, 1e-10);
  }
}

}  // namespace
}  // namespace sqm
