// Copyright 2026 The eprsim authors
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

#pragma once

// Deterministic random streams. Monte Carlo runs each own a substream
// derived from (seed, run index), so ensemble results are independent of
// scheduling and thread count. Gaussian variates use explicit Box-Muller
// rather than std::normal_distribution, whose output is
// implementation-defined.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace eprsim {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : engine_(detail::splitmix64(seed)) {}

  /// Substream for run `index` of a run seeded with `seed`.
  static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(detail::splitmix64(seed) ^
                        detail::splitmix64(index + 0x51ed2701ULL));
  }

  /// Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace eprsim
