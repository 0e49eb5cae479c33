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

#include "fkbsde/rng.hpp"

#include <cmath>
#include <numbers>

namespace fkbsde {

namespace {

constexpr std::uint32_t kW32A = 0x9E3779B9;
constexpr std::uint32_t kW32B = 0xBB67AE85;
constexpr std::uint32_t kM4x32A = 0xD2511F53;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57;

// Bit 31 of counter word 3 separates the uniform sub-stream from the normals.
constexpr std::uint32_t kUniformTag = 0x80000000u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) | (lo >> 11);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM4x32A, ctr[0], lo0, hi0);
    mulhilo(kM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW32A;
    key[1] += kW32B;
  }
  return ctr;
}

std::array<double, 2> RngPolicy::gaussian_pair(std::uint64_t path, std::uint64_t step,
                                               std::uint64_t pair) const noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(step),
                                static_cast<std::uint32_t>(path),
                                (stream_ & ~kUniformTag) ^ static_cast<std::uint32_t>(path >> 32)};
  const auto r = Philox4x32::generate(ctr, key());
  const double radius = std::sqrt(-2.0 * std::log(to_unit(r[0], r[1])));
  const double angle = 2.0 * std::numbers::pi * to_unit(r[2], r[3]);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

void RngPolicy::normals(std::uint64_t path, std::uint64_t step, std::span<double> out) const noexcept {
  for (std::size_t j = 0; j < out.size(); j += 2) {
    const auto z = gaussian_pair(path, step, j / 2);
    out[j] = z[0];
    if (j + 1 < out.size()) out[j + 1] = z[1];
  }
}

double RngPolicy::normal(std::uint64_t path, std::uint64_t step, std::uint64_t coord) const noexcept {
  return gaussian_pair(path, step, coord / 2)[coord % 2];
}

double RngPolicy::uniform(std::uint64_t path, std::uint64_t step, std::uint64_t coord) const noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(coord), static_cast<std::uint32_t>(step),
                                static_cast<std::uint32_t>(path),
                                (stream_ | kUniformTag) ^ static_cast<std::uint32_t>(path >> 32)};
  const auto r = Philox4x32::generate(ctr, key());
  return to_unit(r[0], r[1]);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace fkbsde
