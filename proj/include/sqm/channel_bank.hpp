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

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sqm/erb.hpp"

namespace sqm {

// One equal-length time series per grid channel; channel k belongs to grid
// entry k.
class ChannelBank {
 public:
  ChannelBank() = default;
  ChannelBank(ChannelGrid grid, double sample_rate, std::size_t length)
      : grid_(std::move(grid)),
        sample_rate_(sample_rate),
        length_(length),
        data_(grid_.size(), std::vector<double>(length, 0.0)) {}
  ChannelBank(ChannelGrid grid, double sample_rate, std::vector<std::vector<double>> data)
      : grid_(std::move(grid)), sample_rate_(sample_rate), data_(std::move(data)) {
    if (data_.size() != grid_.size()) {
      throw std::invalid_argument("one series per grid channel required");
    }
    length_ = data_.empty() ? 0 : data_.front().size();
    for (const auto& row : data_) {
      if (row.size() != length_) throw std::invalid_argument("channel length mismatch");
    }
  }

  const ChannelGrid& grid() const { return grid_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t channels() const { return data_.size(); }
  std::size_t length() const { return length_; }

  std::span<double> operator[](std::size_t k) { return data_[k]; }
  std::span<const double> operator[](std::size_t k) const { return data_[k]; }

  void set(std::size_t k, std::vector<double> series) {
    if (series.size() != length_) {
      throw std::invalid_argument("channel length mismatch");
    }
    data_.at(k) = std::move(series);
  }

  // Sub-range [begin, begin + count) of every channel.
  ChannelBank slice(std::size_t begin, std::size_t count) const {
    if (begin + count > length_) throw std::out_of_range("bank slice");
    ChannelBank out(grid_, sample_rate_, 0);
    out.length_ = count;
    for (std::size_t k = 0; k < data_.size(); ++k) {
      out.data_[k].assign(data_[k].begin() + begin,
                          data_[k].begin() + begin + count);
    }
    return out;
  }

 private:
  ChannelGrid grid_;
  double sample_rate_ = 0.0;
  std::size_t length_ = 0;
  std::vector<std::vector<double>> data_;
};

}  // namespace sqm
