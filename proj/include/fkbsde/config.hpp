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
#include <string>
#include <string_view>

#include "fkbsde/presets.hpp"

namespace fkbsde::cli {

/// A problem description plus run options. Sections of the text format:
/// [problem] preset; [spectral] generator d lambda c0; [noise] d_xi;
/// [forward] coefficients q beta beta0 beta1 gamma; [driver] name a b c rho shift alpha;
/// [terminal] name kappa k shift; [grid] t0 T N; [solver] M seed degree modes picard_iters;
/// [point] t x. See configs/reference.ini for defaults.
struct RunConfig {
  presets::ProblemSpec spec;
  std::string origin = "<memory>";

  /// Canonical text: every key, fixed order, round-trip precision.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
  /// Builds the problem; invariant violations are reported with the origin.
  fk::PdeProblem problem() const;
};

/// Parses and validates. Syntax errors carry the line number.
RunConfig parse_config(std::string_view text, const std::string& origin = "<memory>");
RunConfig load_config(const std::string& path);

/// Sets "section.key" to value, then re-validates.
void apply_override(RunConfig& config, const std::string& dotted_key, const std::string& value);

}  // namespace fkbsde::cli
