// Copyright 2026 The Stocheq Authors
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

#ifndef STOCHEQ_RNG_HPP_
#define STOCHEQ_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

namespace stocheq {

// splitmix64. Seeded outputs must be identical across platforms and standard
// libraries, so the generator and the draw helpers are spelled out here
// instead of using <random> distributions (whose results are
// implementation-defined).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi].
  double next_real(double lo, double hi) { return lo + (hi - lo) * next_real(); }

  // Uniform integer in [lo, hi]. Modulo bias is irrelevant at these ranges.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool next_bool(double p_true) { return next_real() < p_true; }

  // A point drawn from the interior of the probability simplex
  // (normalized exponentials, i.e. a flat Dirichlet draw).
  std::vector<double> next_simplex(int size) {
    std::vector<double> w(static_cast<size_t>(size));
    double sum = 0.0;
    for (double& x : w) {
      x = -std::log(1.0 - next_real());
      sum += x;
    }
    for (double& x : w) x /= sum;
    return w;
  }

 private:
  std::uint64_t state_;
};

}  // namespace stocheq

#endif  // STOCHEQ_RNG_HPP_
