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

#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <string>
#include <vector>

#include "fkbsde/fkbsde.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  unsigned long long seed = 0;
  bool has_seed = false;
  unsigned threads = 1;
  double tol_scale = 1.0;
};

int api_error(const char* what, fkb_status st) {
  std::fprintf(stderr, "fkbsde: %s failed (%s): %s\n", what, fkb_status_string(st), fkb_last_error());
  return 2;
}

void print_summary(const char* json_text) {
  const auto j = nlohmann::json::parse(json_text);
  for (const auto& c : j.at("checks")) {
    std::printf("%-20s %-5s statistic=%.6g tolerance=%.6g", c.at("name").get<std::string>().c_str(),
                c.at("verdict").get<std::string>().c_str(),
                c.at("statistic").is_number() ? c.at("statistic").get<double>() : NAN,
                c.at("tolerance").is_number() ? c.at("tolerance").get<double>() : NAN);
    if (c.contains("message")) std::printf("  [%s]", c.at("message").get<std::string>().c_str());
    std::printf("\n");
  }
  const auto& s = j.at("summary");
  std::printf("pass=%d fail=%d error=%d\n", s.at("pass").get<int>(), s.at("fail").get<int>(), s.at("error").get<int>());
}

int execute(const std::string& command, const Options& opt) {
  fkb_config* cfg = nullptr;
  if (command != "report") {
    if (const auto st = fkb_config_load(opt.config.c_str(), &cfg); st != FKB_OK) return api_error("loading config", st);
    std::vector<std::string> sets = opt.overrides;
    if (opt.has_seed) sets.push_back("solver.seed=" + std::to_string(opt.seed));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "fkbsde: --set expects section.key=value, got '%s'\n", kv.c_str());
        fkb_config_free(cfg);
        return 2;
      }
      const auto key = kv.substr(0, eq);
      const auto value = kv.substr(eq + 1);
      if (const auto st = fkb_config_set(cfg, key.c_str(), value.c_str()); st != FKB_OK) {
        fkb_config_free(cfg);
        return api_error("applying an override", st);
      }
    }
  }
  fkb_report* report = nullptr;
  int exit_code = 2;
  const auto st = fkb_run(cfg, command.c_str(), opt.out.empty() ? nullptr : opt.out.c_str(), opt.threads, opt.tol_scale,
                          &report, &exit_code);
  fkb_config_free(cfg);
  if (st != FKB_OK) return api_error(command.c_str(), st);
  print_summary(fkb_report_json(report));
  fkb_report_free(report);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semilinear Kolmogorov equations on Hilbert spaces via forward-backward SDEs"};
  app.set_version_flag("--version", std::string(fkb_version()));
  app.require_subcommand(1);
  Options opt;
  std::string chosen;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "Problem config file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override [solver] seed")->each([&](const std::string&) {
      opt.has_seed = true;
    });
    sub->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
    sub->add_option("--out", opt.out, "Output directory for report.json and CSV tables");
    sub->add_option("--tol-scale", opt.tol_scale, "Multiplier on every verdict tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--set", opt.overrides, "Override section.key=value (repeatable)");
    sub->callback([&, sub] { chosen = sub->get_name(); });
  };
  add_common(app.add_subcommand("solve", "Evaluate u(t, x) at the configured point"), true);
  add_common(app.add_subcommand("verify-bsde", "BSDE suite: linear oracle, comparison, estimates"), true);
  add_common(app.add_subcommand("verify-fk", "Feynman-Kac suite: Markov, B-continuity, terminal, growth, oracle"),
             true);
  add_common(app.add_subcommand("sweep", "Convergence in N, M and d"), true);
  auto* report = app.add_subcommand("report", "Re-run the config embedded in <out>/report.json and compare");
  add_common(report, false);
  report->get_option("--out")->required();

  CLI11_PARSE(app, argc, argv);
  return execute(chosen, opt);
}
