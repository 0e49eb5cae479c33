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
#include <map>
#include <string>
#include <vector>

#include "fkbsde/config.hpp"

namespace fkbsde::cli {

struct Table {
  std::string name;  // file stem of the CSV
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// One verdict block. Verdicts are "pass", "fail" or "error".
struct CheckResult {
  std::string name;
  std::string probe;
  std::string verdict = "error";
  double statistic = 0.0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, double> details;
  std::string message;
  std::vector<Table> tables;
  double seconds = 0.0;  // reported in timing.json only
};

struct RunOptions {
  unsigned threads = 1;
  double tol_scale = 1.0;
};

struct RunReport {
  std::string command;
  RunConfig config;
  double tol_scale = 1.0;
  std::vector<CheckResult> checks;  // sorted by name
  double seconds = 0.0;

  /// Deterministic report (no timing), independent of the thread count.
  std::string json() const;
  std::string timing_json() const;
  /// 0 all pass, 1 any fail, 2 any error.
  int exit_code() const;
};

/// Commands: solve, verify-bsde, verify-fk, sweep.
RunReport run(const RunConfig& config, const std::string& command, const RunOptions& options);

/// Re-runs the command and config embedded in a report.json and compares the
/// check blocks bit for bit.
RunReport reproduce(const std::string& report_path, const RunOptions& options);

/// Writes report.json, timing.json and one CSV per table into out_dir.
void write_report(const RunReport& report, const std::string& out_dir);

const std::vector<std::string>& commands();

}  // namespace fkbsde::cli
