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
#include <string>
#include <vector>

namespace sqm {

// Time series of one sound-quality metric plus its scalar summary. The series
// starts at `start_s` seconds into the analysed signal.
struct MetricSeries {
  std::string unit;
  double sample_rate = 0.0;
  double start_s = 0.0;
  std::vector<double> series;
  double value = 0.0;
  // Per-channel contributions to `value` where the metric defines them.
  std::vector<double> per_channel;
};

}  // namespace sqm
