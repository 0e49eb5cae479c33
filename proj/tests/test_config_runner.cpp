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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fkbsde/config.hpp"
#include "fkbsde/runner.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace fkbsde;
using namespace fkbsde::cli;
using fkbsde::testing::code;
using fkbsde::testing::thrown_code;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fkbsde_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("a minimal preset config") {
  const auto cfg = parse_config("[problem]\npreset = heat_d8\n", "heat.ini");
  CHECK(cfg.spec.d == 8);
  CHECK(cfg.spec.d_xi == 8);
  CHECK(cfg.spec.T == 0.1);
  CHECK(cfg.spec.generator == "dirichlet_laplacian");
  CHECK(cfg.hash().size() == 16);
}

TEST_CASE("every shipped config parses") {
  CHECK_NOTHROW(load_config(FKBSDE_SOURCE_DIR "/configs/reference.ini"));
  for (const auto& entry : fs::directory_iterator(FKBSDE_SOURCE_DIR "/configs/examples")) {
    CAPTURE(entry.path().string());
    const auto cfg = load_config(entry.path().string());
    CHECK(cfg.spec.preset == entry.path().stem().string());
  }
}

TEST_CASE("canonical text round-trips") {
  auto cfg = parse_config("[problem]\npreset = nemytskii\n[driver]\nalpha = 0.3\n[point]\nx = 0.5, -0.25\n");
  const auto again = parse_config(cfg.canonical());
  CHECK(again.canonical() == cfg.canonical());
  CHECK(again.hash() == cfg.hash());
  CHECK(again.spec.x == std::vector<double>{0.5, -0.25});
  CHECK(again.spec.driver_params.alpha == 0.3);
  // comments and spacing do not matter
  const auto spaced = parse_config(
      "# comment\n[problem]   \n  preset=nemytskii ; trailing\n[driver]\nalpha=0.3\n"
      "[point]\nx = 0.5 , -0.25\n");
  CHECK(spaced.hash() == cfg.hash());
}

TEST_CASE("overrides") {
  auto cfg = parse_config("[problem]\npreset = ou_linear\n");
  const auto before = cfg.hash();
  apply_override(cfg, "solver.M", "100000");
  apply_override(cfg, "solver.seed", "42");
  CHECK(cfg.spec.solver.paths == 100000);
  CHECK(cfg.spec.solver.seed == 42);
  CHECK(cfg.hash() != before);
  CHECK(thrown_code([&] { apply_override(cfg, "solver.colour", "red"); }) != 0);
  CHECK(thrown_code([&] { apply_override(cfg, "problem.preset", "heat_d8"); }) != 0);
  CHECK(thrown_code([&] { apply_override(cfg, "solver.M", "1"); }) == code(ErrorCode::kInvalidArgument));
}

TEST_CASE("parse errors carry the line number") {
  const auto unknown = message_of([] { parse_config("[problem]\npreset = ou_linear\n\n[solver]\nMM = 3\n", "a.ini"); });
  CHECK(unknown.find("a.ini:5") != std::string::npos);
  CHECK(thrown_code([] { parse_config("[solver]\nM = 3\nnot a pair\n"); }) == code(ErrorCode::kParse));
  CHECK(thrown_code([] { parse_config("M = 3\n"); }) == code(ErrorCode::kParse));
  CHECK(thrown_code([] { parse_config("[solver]\nM = many\n"); }) == code(ErrorCode::kParse));
  CHECK(thrown_code([] { parse_config("[problem]\npreset = galaxy\n"); }) == code(ErrorCode::kParse));
  CHECK(thrown_code([] { load_config("/nonexistent/cfg.ini"); }) == code(ErrorCode::kIo));
}

TEST_CASE("invariant violations name the field") {
  const auto c0 = message_of([] { parse_config("[problem]\npreset = heat_d8\n[spectral]\nc0 = 0\n", "b.ini"); });
  CHECK(c0.find("strong B") != std::string::npos);
  CHECK(c0.find("[spectral]") != std::string::npos);
  const auto lam =
      message_of([] { parse_config("[problem]\npreset = ou_linear\n[spectral]\nlambda = 0\nc0 = 0\n", "c.ini"); });
  CHECK(lam.find("strong B") != std::string::npos);
  const auto t = message_of([] { parse_config("[problem]\npreset = ou_linear\n[point]\nt = 1\n"); });
  CHECK(t.find("[point] t") != std::string::npos);
  const auto x = message_of([] { parse_config("[problem]\npreset = ou_linear\n[point]\nx = 1, 2\n"); });
  CHECK(x.find("[point] x") != std::string::npos);
}

TEST_CASE("exit codes follow the verdicts") {
  RunReport rep;
  CHECK(rep.exit_code() == 0);
  CheckResult c;
  c.name = "a";
  c.verdict = "pass";
  rep.checks.push_back(c);
  CHECK(rep.exit_code() == 0);
  c.verdict = "fail";
  rep.checks.push_back(c);
  CHECK(rep.exit_code() == 1);
  c.verdict = "error";
  rep.checks.push_back(c);
  CHECK(rep.exit_code() == 2);
}

TEST_CASE("solve report") {
  const auto cfg = parse_config("[problem]\npreset = frozen\n");
  const auto rep = run(cfg, "solve", RunOptions{});
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].verdict == "pass");
  CHECK(rep.checks[0].details.at("value") == std::sin(0.7));
  CHECK(rep.exit_code() == 0);
  const auto j = nlohmann::json::parse(rep.json());
  CHECK(j["schema"] == "fkbsde.report/1");
  CHECK(j["provenance"]["config_hash"] == cfg.hash());
  CHECK(j["summary"]["exit_code"] == 0);
  CHECK(rep.json().find("seconds") == std::string::npos);
  CHECK(thrown_code([&] { run(cfg, "dance", RunOptions{}); }) == code(ErrorCode::kInvalidArgument));
}

TEST_CASE("verify-bsde checks and tolerance scaling") {
  auto cfg = parse_config("[problem]\npreset = ou_linear\n[solver]\nM = 4000\n");
  const auto rep = run(cfg, "verify-bsde", RunOptions{});
  std::set<std::string> names;
  for (const auto& c : rep.checks) {
    names.insert(c.name);
    CAPTURE(c.name);
    CHECK(c.verdict == "pass");
  }
  CHECK(names == std::set<std::string>{"apriori", "comparison", "dominance", "gamma_oracle", "stability"});
  CHECK(rep.exit_code() == 0);
  // an absurdly tight tolerance turns statistical checks into failures
  const auto tight = run(cfg, "verify-bsde", RunOptions{1, 1e-9});
  CHECK(tight.exit_code() == 1);
}

TEST_CASE("numerical errors become error verdicts") {
  // Degree 6 in 8 standardized modes on 20 paths cannot be fitted.
  auto cfg = parse_config("[problem]\npreset = heat_d8\n[solver]\nM = 20\ndegree = 6\nmodes = 8\n");
  const auto rep = run(cfg, "solve", RunOptions{});
  CHECK(rep.checks[0].verdict == "error");
  CHECK(!rep.checks[0].message.empty());
  CHECK(rep.exit_code() == 2);
}

TEST_CASE("written reports reproduce") {
  const auto dir = scratch("reproduce");
  auto cfg = parse_config("[problem]\npreset = ou_linear\n[solver]\nM = 1000\n");
  const auto rep = run(cfg, "solve", RunOptions{});
  write_report(rep, dir.string());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "timing.json"));
  CHECK(fs::exists(dir / "solve_paths.csv"));
  CHECK(slurp(dir / "solve_paths.csv").rfind("path,step,t,y,z_1\n", 0) == 0);
  const auto again = reproduce((dir / "report.json").string(), RunOptions{3});
  REQUIRE(again.checks.size() == 1);
  CHECK(again.checks[0].verdict == "pass");

  // a tampered report is detected
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  j["checks"][0]["statistic"] = 123.0;
  std::ofstream(dir / "report.json") << j.dump(2);
  const auto bad = reproduce((dir / "report.json").string(), RunOptions{});
  CHECK(bad.checks[0].verdict == "fail");
  CHECK(bad.exit_code() == 1);
  fs::remove_all(dir);
}
