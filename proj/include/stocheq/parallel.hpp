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

#ifndef STOCHEQ_PARALLEL_HPP_
#define STOCHEQ_PARALLEL_HPP_

#include <exception>
#include <functional>
#include <thread>
#include <utility>
#include <vector>

namespace stocheq {

// Contiguous [begin, end) ranges covering [0, n), sizes differing by at most
// one, larger chunks first. Always returns exactly d ranges (empty ones at
// the tail when d > n).
inline std::vector<std::pair<int, int>> partition_ranges(int n, int d) {
  std::vector<std::pair<int, int>> ranges;
  ranges.reserve(static_cast<size_t>(d));
  const int base = n / d;
  const int extra = n % d;
  int begin = 0;
  for (int c = 0; c < d; ++c) {
    const int size = base + (c < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + size);
    begin += size;
  }
  return ranges;
}

// Runs fn(i) for every i in [0, n), chunked over `workers` threads. Workers
// own fixed contiguous chunks, so results written to per-index slots are
// independent of the worker count; the join below is the phase barrier.
// If several calls throw, the exception for the lowest index wins.
inline void run_partitioned(int n, int workers, const std::function<void(int)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto ranges = partition_ranges(n, workers);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  std::vector<int> error_index(static_cast<size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int c = 0; c < workers; ++c) {
    pool.emplace_back([&, c] {
      for (int i = ranges[static_cast<size_t>(c)].first;
           i < ranges[static_cast<size_t>(c)].second; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(c)] = std::current_exception();
          error_index[static_cast<size_t>(c)] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  int first = n;
  std::exception_ptr to_throw;
  for (int c = 0; c < workers; ++c) {
    if (errors[static_cast<size_t>(c)] && error_index[static_cast<size_t>(c)] < first) {
      first = error_index[static_cast<size_t>(c)];
      to_throw = errors[static_cast<size_t>(c)];
    }
  }
  if (to_throw) std::rethrow_exception(to_throw);
}

}  // namespace stocheq

#endif  // STOCHEQ_PARALLEL_HPP_
