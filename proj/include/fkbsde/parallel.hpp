// Copyright 2026 The fkbsde Authors
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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace fkbsde {

/// Thread budget for path-parallel loops. Results never depend on it.
struct Exec {
  unsigned threads = 1;

  unsigned resolved() const {
    if (threads != 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Splits [0, n) into contiguous chunks, one per worker. If several chunks
/// throw, the exception from the lowest chunk is rethrown, so error reports
/// name the same path regardless of thread count.
void parallel_for(std::size_t n, const Exec& exec, const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed reduction block. Partial sums are formed per block and combined in
/// block order, which makes every sum independent of the thread count.
inline constexpr std::size_t kReduceBlock = 2048;

template <class AddFn>
std::vector<double> blocked_reduce(std::size_t n, std::size_t width, const Exec& exec, AddFn&& add) {
  const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks * width, 0.0);
  parallel_for(blocks, exec, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      std::span<double> acc(partial.data() + b * width, width);
      const std::size_t end = std::min(n, (b + 1) * kReduceBlock);
      for (std::size_t i = b * kReduceBlock; i < end; ++i) add(i, acc);
    }
  });
  std::vector<double> total(width, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < width; ++k) total[k] += partial[b * width + k];
  return total;
}

template <class ValueFn>
double blocked_sum(std::size_t n, const Exec& exec, ValueFn&& value) {
  return blocked_reduce(n, 1, exec, [&](std::size_t i, std::span<double> acc) { acc[0] += value(i); })[0];
}

/// Sample mean and standard error of the mean of value(i), i < n.
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

template <class ValueFn>
MeanStderr mean_and_stderr(std::size_t n, const Exec& exec, ValueFn&& value) {
  if (n == 0) return {};
  const double first = value(0);
  auto sums = blocked_reduce(n, 2, exec, [&](std::size_t i, std::span<double> acc) {
    const double v = value(i);
    acc[0] += v;
    acc[1] += v != first ? 1.0 : 0.0;
  });
  if (sums[1] == 0.0) return {first, 0.0};  // a point mass is reported exactly
  const double mean = sums[0] / static_cast<double>(n);
  // second pass around the mean keeps the variance accurate for large offsets
  auto ss = blocked_reduce(n, 1, exec, [&](std::size_t i, std::span<double> acc) {
    const double dv = value(i) - mean;
    acc[0] += dv * dv;
  });
  MeanStderr out;
  out.mean = mean;
  if (n > 1) {
    const double var = ss[0] / static_cast<double>(n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

}  // namespace fkbsde
