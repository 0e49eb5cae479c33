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

#include <cstdint>
#include <vector>

#include "fkbsde/parallel.hpp"

namespace fkbsde::calibration {

/// One member of the fixed calibration family: OU forward process in d = 1
/// with a constant linear driver and g(x) = x + kappa. The second problem of
/// the stability pair shifts b by d_b and kappa by d_kappa.
struct Draw {
  double lambda = 1.0;
  double q = 1.0;
  double x0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double kappa = 0.0;
  double d_b = 0.0;
  double d_kappa = 0.0;
};

/// The ou_linear preset followed by nine draws from a fixed generator;
/// identical on every platform.
const std::vector<Draw>& family();

struct Ratios {
  double apriori = 0.0;
  double stability = 0.0;
};

/// lhs / rhs of the a priori and stability estimates for one draw and seed.
Ratios measure(const Draw& draw, std::uint64_t seed, const Exec& exec = {});

/// Maxima over family() x kCalibrationSeeds, produced by tools/calibrate.
inline constexpr double kAprioriC = 3.077304;
inline constexpr double kStabilityC = 1.665627;
inline constexpr double kSlack = 1.2;
inline constexpr std::uint64_t kCalibrationSeeds[] = {101, 102, 103};
inline constexpr std::uint64_t kFreshSeeds[] = {201, 202, 203, 204, 205};

}  // namespace fkbsde::calibration
