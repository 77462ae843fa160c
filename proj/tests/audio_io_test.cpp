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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sqm/audio_io.hpp"
#include "sqm/stimuli.hpp"

namespace sqm {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sqm_audio_io_" + name)).string();
}

TEST(AudioIo, FullScaleCalibration) {
  // A full-scale sinusoid has rms 1/sqrt(2) and so reads at fullscale_db.
  EXPECT_NEAR(fullscale_pressure(94.0) / std::sqrt(2.0), db_to_pressure_rms(94.0), 1e-15);
}

TEST(AudioIo, FloatRoundTripKeepsLevel) {
  const auto s = gen_sine(1000.0, 0.25, 70.0);
  const std::string path = temp_path("float.wav");
  write_wav(path, s, 94.0);
  const auto r = read_wav(path, 94.0);
  EXPECT_EQ(r.size(), s.size());
  EXPECT_EQ(r.sample_rate(), 44100.0);
  EXPECT_NEAR(r.spl_db(), 70.0, 1e-5);
  const auto r2 = read_wav(path, 100.0);
  EXPECT_NEAR(r2.spl_db(), 76.0, 1e-5);
  std::remove(path.c_str());
}

TEST(AudioIo, PcmRoundTrip) {
  const auto s = gen_sine(440.0, 0.1, 80.0, 48000.0);
  for (auto enc : {WavEncoding::kPcm16, WavEncoding::kPcm24}) {
    const std::string path = temp_path("pcm.wav");
    write_wav(path, s, 94.0, enc);
    const auto r = read_wav(path, 94.0);
    EXPECT_EQ(r.sample_rate(), 48000.0);
    EXPECT_NEAR(r.spl_db(), 80.0, enc == WavEncoding::kPcm16 ? 1e-3 : 1e-5);
    std::remove(path.c_str());
  }
}

TEST(AudioIo, PcmClipsAtFullScale) {
  const CalibratedSignal loud({10.0, -10.0}, 44100.0);
  const std::string path = temp_path("clip.wav");
  write_wav(path, loud, 94.0, WavEncoding::kPcm16);
  const auto r = read_wav(path, 94.0);
  EXPECT_NEAR(r.samples()[0] / fullscale_pressure(94.0), 32767.0 / 32768.0, 1e-12);
  EXPECT_NEAR(r.samples()[1] / fullscale_pressure(94.0), -1.0, 1e-12);
  std::remove(path.c_str());
}

TEST(AudioIo, ErrorsNameThePath) {
  const std::string missing = temp_path("missing.wav");
  try {
    read_wav(missing);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(missing), std::string::npos);
  }
  const std::string junk = temp_path("junk.wav");
  std::ofstream(junk) << "not audio";
  try {
    read_wav(junk);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(junk), std::string::npos);
  }
  std::remove(junk.c_str());
}

TEST(AudioIo, RejectsStereo) {
  const std::string path = temp_path("stereo.wav");
  write_wav(path, CalibratedSignal({0.1, 0.2, 0.3, 0.4}, 44100.0), 94.0, WavEncoding::kPcm16);
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(22);
  f.put(2);
  f.close();
  EXPECT_THROW(read_wav(path), std::runtime_error);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace sqm
