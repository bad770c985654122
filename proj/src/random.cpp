// Copyright 2026 The ionabsorb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ionabsorb/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ionabsorb {

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t key) {
  std::uint64_t z = master_seed ^ (key * 0x9E3779B97F4A7C15ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return -std::log1p(-uniform()) / rate;
}

double RngStream::normal() {
  if (spare_normal_) {
    double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  return u * f;
}

double RngStream::cauchy(double center, double half_width) {
  double u = uniform();
  return center + half_width * std::tan(std::numbers::pi * (u - 0.5));
}

}  // namespace ionabsorb
