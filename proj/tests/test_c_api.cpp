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

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fkbsde/fkbsde.h"

namespace fs = std::filesystem;

namespace {

const std::string kExamples = FKBSDE_SOURCE_DIR "/configs/examples/";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("fkbsde_capi_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(FKBSDE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(fkb_version()) == "0.1.0");
  CHECK(std::string(fkb_status_string(FKB_OK)) == "ok");
  CHECK(std::string(fkb_status_string(FKB_ERR_PARSE)).size() > 0);
}

TEST_CASE("config handles") {
  fkb_config* cfg = nullptr;
  REQUIRE(fkb_config_parse("[problem]\npreset = frozen\n", &cfg) == FKB_OK);
  const std::string hash = fkb_config_hash(cfg);
  CHECK(hash.size() == 16);
  CHECK(std::string(fkb_config_canonical(cfg)).find("preset = frozen") != std::string::npos);
  CHECK(fkb_config_set(cfg, "solver.seed", "42") == FKB_OK);
  CHECK(std::string(fkb_config_hash(cfg)) != hash);
  CHECK(fkb_config_set(cfg, "solver.M", "1") == FKB_ERR_INVALID_ARGUMENT);
  CHECK(fkb_config_set(cfg, "nowhere.key", "1") != FKB_OK);
  CHECK(fkb_config_set(nullptr, "solver.M", "10") == FKB_ERR_INVALID_ARGUMENT);
  fkb_config_free(cfg);
  fkb_config_free(nullptr);

  fkb_config* bad = nullptr;
  CHECK(fkb_config_parse("[solver]\nM = 10\nbogus = 1\n", &bad) == FKB_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(std::string(fkb_last_error()).find(":3:") != std::string::npos);
  CHECK(fkb_config_load("/nonexistent.ini", &bad) == FKB_ERR_IO);
  CHECK(fkb_config_parse("[problem]\npreset = heat_d8\n[spectral]\nc0 = 0\n", &bad) == FKB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(fkb_last_error()).find("strong B") != std::string::npos);
}

TEST_CASE("evaluate and run through the C API") {
  fkb_config* cfg = nullptr;
  REQUIRE(fkb_config_load((kExamples + "frozen.ini").c_str(), &cfg) == FKB_OK);
  double u = 0, se = 1;
  REQUIRE(fkb_evaluate_u(cfg, 1, &u, &se) == FKB_OK);
  CHECK(u == std::sin(0.7));
  CHECK(se == 0.0);

  fkb_report* rep = nullptr;
  int code = -1;
  REQUIRE(fkb_run(cfg, "solve", nullptr, 2, 1.0, &rep, &code) == FKB_OK);
  CHECK(code == 0);
  CHECK(fkb_report_exit_code(rep) == 0);
  CHECK(std::string(fkb_report_json(rep)).find("\"schema\": \"fkbsde.report/1\"") != std::string::npos);
  fkb_report_free(rep);
  CHECK(fkb_run(cfg, "juggle", nullptr, 1, 1.0, &rep, &code) == FKB_ERR_INVALID_ARGUMENT);
  CHECK(fkb_run(cfg, "solve", nullptr, 1, -1.0, &rep, &code) == FKB_ERR_INVALID_ARGUMENT);
  fkb_config_free(cfg);
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("exit");
  const std::string ou = "--config " + kExamples + "ou_linear.ini --set solver.M=2000";
  CHECK(cli("solve --config " + kExamples + "frozen.ini --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(cli("report --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "reproduction" / "report.json"));
  CHECK(cli("verify-bsde " + ou) == 0);
  CHECK(cli("verify-bsde " + ou + " --tol-scale 1e-9") == 1);
  CHECK(cli("solve --config " + kExamples +
            "heat_d8.ini --set solver.M=20 --set solver.degree=6 "
            "--set solver.modes=8") == 2);
  CHECK(cli("solve " + ou + " --set solver.M=1") == 2);
  CHECK(cli("solve " + ou + " --set spectral.c0=0 --set spectral.lambda=0") == 2);
  CHECK(cli("solve --config /nonexistent.ini") != 0);
  CHECK(cli("levitate") != 0);
  fs::remove_all(dir);
}

TEST_CASE("CLI overrides: seed and paths") {
  const auto a = scratch("seed_a");
  const auto b = scratch("seed_b");
  const std::string base = "solve --config " + kExamples + "ou_linear.ini --set solver.M=1000 ";
  REQUIRE(cli(base + "--seed 42 --out " + a.string()) == 0);
  REQUIRE(cli(base + "--set solver.seed=42 --out " + b.string()) == 0);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "report.json").find("\"seed\": 42") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("CLI output is identical across thread counts") {
  const std::string base = "verify-bsde --config " + kExamples + "ou_linear.ini --set solver.M=3000 --seed 5";
  fs::path dirs[3];
  const unsigned threads[3] = {1, 4, 8};
  for (int k = 0; k < 3; ++k) {
    dirs[k] = scratch("threads_" + std::to_string(threads[k]));
    REQUIRE(cli(base + " --threads " + std::to_string(threads[k]) + " --out " + dirs[k].string()) == 0);
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const auto name = entry.path().filename();
    if (name == "timing.json") continue;
    ++files;
    CAPTURE(name.string());
    CHECK(slurp(dirs[1] / name) == slurp(entry.path()));
    CHECK(slurp(dirs[2] / name) == slurp(entry.path()));
  }
  CHECK(files >= 2);
  for (const auto& d : dirs) fs::remove_all(d);
}
