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

// Mono WAV input and output (PCM 16/24-bit, IEEE float 32-bit).
//
// Calibration: a full-scale sinusoid (peak 1.0) corresponds to
// `fullscale_db` dB SPL, so a sample value v maps to
// v * sqrt(2) * p_ref * 10^(fullscale_db / 20) pascals.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqm/signal.hpp"

namespace sqm {

inline constexpr double kDefaultFullScaleDb = 94.0;

enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

// Pascals corresponding to a sample value of 1.0.
inline double fullscale_pressure(double fullscale_db) {
  return std::sqrt(2.0) * db_to_pressure_rms(fullscale_db);
}

namespace detail {

inline std::uint32_t read_le(const unsigned char* p, int bytes) {
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void write_le(std::vector<unsigned char>& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline void append_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace detail

inline CalibratedSignal read_wav(const std::string& path,
                                 double fullscale_db = kDefaultFullScaleDb) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open audio file: " + path);
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) {
    return std::runtime_error(path + ": " + why);
  };
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }
  int format = -1, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* samples = nullptr;
  std::size_t sample_bytes = 0;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* chunk = data.data() + pos;
    const std::size_t size = detail::read_le(chunk + 4, 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw fail("truncated fmt chunk");
      format = static_cast<int>(detail::read_le(chunk + 8, 2));
      channels = static_cast<int>(detail::read_le(chunk + 10, 2));
      rate = detail::read_le(chunk + 12, 4);
      bits = static_cast<int>(detail::read_le(chunk + 22, 2));
      if (format == 0xFFFE && avail >= 26) format = static_cast<int>(detail::read_le(chunk + 32, 2));
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      samples = data.data() + body;
      sample_bytes = avail;
    }
    pos = body + size + (size & 1);
  }
  if (format < 0) throw fail("missing fmt chunk");
  if (samples == nullptr) throw fail("missing data chunk");
  if (channels != 1) {
    throw fail("expected mono audio, found " + std::to_string(channels) + " channels");
  }
  const bool pcm = format == 1 && (bits == 16 || bits == 24);
  const bool flt = format == 3 && bits == 32;
  if (!pcm && !flt) {
    throw fail("unsupported encoding (format " + std::to_string(format) + ", " +
               std::to_string(bits) + " bits)");
  }
  if (rate == 0) throw fail("invalid sample rate");
  const int width = bits / 8;
  const std::size_t n = sample_bytes / width;
  const double scale = fullscale_pressure(fullscale_db);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = samples + i * width;
    double v = 0.0;
    if (flt) {
      const std::uint32_t u = detail::read_le(p, 4);
      float f;
      std::memcpy(&f, &u, 4);
      v = f;
    } else if (bits == 16) {
      v = static_cast<std::int16_t>(detail::read_le(p, 2)) / 32768.0;
    } else {
      std::uint32_t u = detail::read_le(p, 3);
      if (u & 0x800000u) u |= 0xFF000000u;
      v = static_cast<std::int32_t>(u) / 8388608.0;
    }
    out[i] = v * scale;
  }
  return CalibratedSignal(std::move(out), static_cast<double>(rate));
}

// Writes the signal; PCM samples beyond full scale are clipped.
inline void write_wav(const std::string& path, const CalibratedSignal& signal,
                      double fullscale_db = kDefaultFullScaleDb,
                      WavEncoding encoding = WavEncoding::kFloat32) {
  const double rate = signal.sample_rate();
  if (rate != std::round(rate) || rate > 4294967295.0) {
    throw std::invalid_argument("WAV needs an integral sample rate");
  }
  const int bits = encoding == WavEncoding::kPcm16 ? 16 : encoding == WavEncoding::kPcm24 ? 24 : 32;
  const int width = bits / 8;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(signal.size() * width);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  detail::append_tag(out, "RIFF");
  detail::write_le(out, 36 + data_bytes, 4);
  detail::append_tag(out, "WAVE");
  detail::append_tag(out, "fmt ");
  detail::write_le(out, 16, 4);
  detail::write_le(out, encoding == WavEncoding::kFloat32 ? 3 : 1, 2);
  detail::write_le(out, 1, 2);
  detail::write_le(out, static_cast<std::uint32_t>(rate), 4);
  detail::write_le(out, static_cast<std::uint32_t>(rate) * width, 4);
  detail::write_le(out, width, 2);
  detail::write_le(out, bits, 2);
  detail::append_tag(out, "data");
  detail::write_le(out, data_bytes, 4);
  const double scale = 1.0 / fullscale_pressure(fullscale_db);
  for (double pa : signal.samples()) {
    const double v = pa * scale;
    if (encoding == WavEncoding::kFloat32) {
      const float f = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      detail::write_le(out, u, 4);
    } else {
      const double full = encoding == WavEncoding::kPcm16 ? 32768.0 : 8388608.0;
      const double q = std::clamp(std::round(v * full), -full, full - 1.0);
      detail::write_le(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(q)), width);
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write audio file: " + path);
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("failed writing audio file: " + path);
}

}  // namespace sqm
