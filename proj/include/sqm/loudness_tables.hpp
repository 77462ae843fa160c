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

// Cochlear gain, input/output and threshold tables of the specific-loudness
// law, and the three-branch law itself.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sqm/erb.hpp"

namespace sqm {

struct LoudnessRow {
  double cam = 0.0;
  double g_db = 0.0;       // low-level cochlear gain, 10 log10 G
  double a = 0.0;          // input/output constant A
  double alpha = 0.0;      // compressive exponent before the variant offset
  double e_thrq_db = 0.0;  // threshold excitation, 10 log10 (E_THRQ / E_0)

  bool operator==(const LoudnessRow&) const = default;
};

// Rows on a strictly increasing Cam axis, interpolated linearly and held
// constant beyond the ends.
class LoudnessTable {
 public:
  static constexpr double kThresholdHighDb = 3.63;
  static constexpr double kMinGainDb = -25.0;

  LoudnessTable() = default;
  explicit LoudnessTable(std::vector<LoudnessRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw std::invalid_argument("loudness table is empty");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const LoudnessRow& r = rows_[i];
      if (!(r.a > 0.0) || !(r.alpha > 0.0) || !std::isfinite(r.g_db) ||
          !std::isfinite(r.e_thrq_db) || !std::isfinite(r.cam)) {
        throw std::invalid_argument("loudness table row " + std::to_string(i) +
                                    " is out of range");
      }
      if (i > 0 && !(r.cam > rows_[i - 1].cam)) {
        throw std::invalid_argument("loudness table Cam values must increase strictly");
      }
    }
  }

  const std::vector<LoudnessRow>& rows() const { return rows_; }

  LoudnessRow at(double cam) const {
    if (cam <= rows_.front().cam) return with_cam(rows_.front(), cam);
    if (cam >= rows_.back().cam) return with_cam(rows_.back(), cam);
    const auto it = std::upper_bound(rows_.begin(), rows_.end(), cam,
                                     [](double c, const LoudnessRow& r) { return c < r.cam; });
    const LoudnessRow& hi = *it;
    const LoudnessRow& lo = *(it - 1);
    const double t = (cam - lo.cam) / (hi.cam - lo.cam);
    auto lerp = [t](double x, double y) { return x + t * (y - x); };
    return {cam, lerp(lo.g_db, hi.g_db), lerp(lo.a, hi.a), lerp(lo.alpha, hi.alpha),
            lerp(lo.e_thrq_db, hi.e_thrq_db)};
  }

  // A and alpha as functions of the low-level gain, linear between
  // (0 dB: 4.72, 0.200) and (-25 dB: 9.19, 0.267).
  static double a_of_gain(double g_db) {
    const double t = std::clamp(-g_db / -kMinGainDb, 0.0, 1.0);
    return 4.72 + t * (9.19 - 4.72);
  }
  static double alpha_of_gain(double g_db) {
    const double t = std::clamp(-g_db / -kMinGainDb, 0.0, 1.0);
    return 0.200 + t * (0.267 - 0.200);
  }

  // Gain falls below 500 Hz; threshold excitation rises by the same amount.
  static LoudnessTable defaults() {
    static constexpr double kFreq[] = {20,  25,  31.5, 40,  50,  63,  80,  100,
                                       125, 160, 200,  250, 315, 400, 500};
    static constexpr double kGainDb[] = {-36.6, -34.4, -31.35, -27.4, -23.2,
                                         -19.3, -15.1, -11.8,  -8.9,  -6.3,
                                         -4.3,  -2.6,  -1.5,   -0.7,  0.0};
    std::vector<LoudnessRow> rows;
    for (std::size_t i = 0; i < std::size(kFreq); ++i) {
      rows.push_back(row_for_gain(freq_to_cam(kFreq[i]), kGainDb[i]));
    }
    rows.push_back(row_for_gain(40.0, 0.0));
    return LoudnessTable(std::move(rows));
  }

  static LoudnessRow row_for_gain(double cam, double g_db) {
    const double g = std::max(g_db, kMinGainDb);
    return {cam, g, a_of_gain(g), alpha_of_gain(g), kThresholdHighDb - g};
  }

 private:
  static LoudnessRow with_cam(LoudnessRow r, double cam) {
    r.cam = cam;
    return r;
  }

  std::vector<LoudnessRow> rows_;
};

// Parses `cam g_db a alpha e_thrq_db` rows; `#` starts a comment.
inline LoudnessTable parse_loudness_table(std::istream& in) {
  std::vector<LoudnessRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream s(line);
    LoudnessRow r;
    if (!(s >> r.cam)) continue;
    std::string extra;
    if (!(s >> r.g_db >> r.a >> r.alpha >> r.e_thrq_db) || (s >> extra)) {
      throw std::runtime_error("loudness table line " + std::to_string(line_no) +
                               ": expected `cam g_db a alpha e_thrq_db`");
    }
    rows.push_back(r);
  }
  return LoudnessTable(std::move(rows));
}

inline LoudnessTable load_loudness_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open loudness table: " + path);
  return parse_loudness_table(in);
}

// Three-branch specific-loudness law of one channel, in linear units.
//
// The high branch keeps the 0.2 exponent but its divisor is chosen per
// channel so that the law is continuous at E/E_0 = 1e10.
struct SpecificLoudnessLaw {
  static constexpr double kHighThreshold = 1e10;
  static constexpr double kHighExponent = 0.2;

  double q_n = 0.0;
  double g = 1.0;       // linear gain
  double a = 0.0;
  double alpha = 0.0;   // including the variant offset
  double e_thrq = 0.0;  // linear threshold excitation
  double a_pow = 0.0;   // A^alpha
  double high_divisor = 0.0;

  SpecificLoudnessLaw() = default;
  SpecificLoudnessLaw(double q_n_, const LoudnessRow& row, double alpha_offset)
      : q_n(q_n_),
        g(std::pow(10.0, row.g_db / 10.0)),
        a(row.a),
        alpha(row.alpha + alpha_offset),
        e_thrq(std::pow(10.0, row.e_thrq_db / 10.0)),
        a_pow(std::pow(a, alpha)) {
    if (!(q_n > 0.0)) throw std::invalid_argument("loudness coefficient must be positive");
    const double at_edge = mid(kHighThreshold) / q_n;
    high_divisor = kHighThreshold / std::pow(at_edge, 1.0 / kHighExponent);
  }

  double low(double e) const {
    return std::pow(2.0 * e / (e + e_thrq), 1.5) * mid(e);
  }
  double mid(double e) const {
    return q_n * (std::pow(g * e + a, alpha) - a_pow);
  }
  double high(double e) const {
    return q_n * std::pow(e / high_divisor, kHighExponent);
  }

  // `e` is E/E_0.
  double operator()(double e) const {
    if (!(e >= 0.0)) throw std::domain_error("excitation must be finite and non-negative");
    if (e < e_thrq) return low(e);
    if (e < kHighThreshold) return mid(e);
    return high(e);
  }
};

}  // namespace sqm
