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

#include <array>
#include <cstdint>
#include <span>

namespace fkbsde {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Stateless: every output block is a pure function of (counter, key).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Counter-based Gaussian source keyed by (seed, stream, path, step, coordinate).
/// A draw never depends on the order or thread in which draws are requested.
class RngPolicy {
 public:
  explicit RngPolicy(std::uint64_t seed, std::uint32_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t stream() const noexcept { return stream_; }

  /// Fills out[j] with the standard normal for coordinate j of (path, step).
  void normals(std::uint64_t path, std::uint64_t step, std::span<double> out) const noexcept;

  /// Single standard normal; equal to normals(path, step, ...)[coord].
  double normal(std::uint64_t path, std::uint64_t step, std::uint64_t coord) const noexcept;

  /// Uniform on (0, 1), from a separate sub-stream of the same key.
  double uniform(std::uint64_t path, std::uint64_t step, std::uint64_t coord) const noexcept;

 private:
  std::array<double, 2> gaussian_pair(std::uint64_t path, std::uint64_t step, std::uint64_t pair) const noexcept;

  Philox4x32::Key key() const noexcept {
    return {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  }

  std::uint64_t seed_;
  std::uint32_t stream_;
};

/// SplitMix64 finalizer; used to derive disjoint seeds for sub-experiments.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace fkbsde
