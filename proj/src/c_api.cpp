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

#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "fkbsde/config.hpp"
#include "fkbsde/error.hpp"
#include "fkbsde/feynman_kac.hpp"
#include "fkbsde/fkbsde.h"
#include "fkbsde/runner.hpp"

struct fkb_config {
  fkbsde::cli::RunConfig config;
  std::string canonical;
  std::string hash;
};

struct fkb_report {
  fkbsde::cli::RunReport report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

fkb_status status_of(fkbsde::ErrorCode code) { return static_cast<fkb_status>(static_cast<int>(code)); }

template <class F>
fkb_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return FKB_OK;
  } catch (const fkbsde::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FKB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FKB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return FKB_ERR_INTERNAL;
  }
}

void need(bool ok, const char* what) {
  if (!ok) fkbsde::fail(fkbsde::ErrorCode::kInvalidArgument, what);
}

}  // namespace

extern "C" {

fkb_status fkb_config_load(const char* path, fkb_config** out) {
  return guard([&] {
    need(path && out, "fkb_config_load: null argument");
    *out = nullptr;
    *out = new fkb_config{fkbsde::cli::load_config(path), {}, {}};
  });
}

fkb_status fkb_config_parse(const char* text, fkb_config** out) {
  return guard([&] {
    need(text && out, "fkb_config_parse: null argument");
    *out = nullptr;
    *out = new fkb_config{fkbsde::cli::parse_config(text), {}, {}};
  });
}

fkb_status fkb_config_set(fkb_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg && key && value, "fkb_config_set: null argument");
    auto copy = cfg->config;
    fkbsde::cli::apply_override(copy, key, value);
    cfg->config = std::move(copy);
  });
}

const char* fkb_config_canonical(fkb_config* cfg) {
  if (!cfg) return nullptr;
  cfg->canonical = cfg->config.canonical();
  return cfg->canonical.c_str();
}

const char* fkb_config_hash(fkb_config* cfg) {
  if (!cfg) return nullptr;
  cfg->hash = cfg->config.hash();
  return cfg->hash.c_str();
}

void fkb_config_free(fkb_config* cfg) { delete cfg; }

fkb_status fkb_evaluate_u(const fkb_config* cfg, unsigned threads, double* value, double* std_error) {
  return guard([&] {
    need(cfg && value, "fkb_evaluate_u: null argument");
    const auto& spec = cfg->config.spec;
    const auto est = fkbsde::fk::evaluate_u(cfg->config.problem(), spec.t, fkbsde::presets::evaluation_point(spec),
                                            fkbsde::Exec{threads});
    *value = est.value;
    if (std_error) *std_error = est.std_error;
  });
}

fkb_status fkb_run(const fkb_config* cfg, const char* command, const char* out_dir, unsigned threads, double tol_scale,
                   fkb_report** report, int* exit_code) {
  return guard([&] {
    need(command != nullptr, "fkb_run: null command");
    if (report) *report = nullptr;
    const std::string cmd = command;
    const fkbsde::cli::RunOptions opts{threads, tol_scale};
    fkbsde::cli::RunReport rep;
    std::string target;
    if (cmd == "report") {
      need(out_dir != nullptr, "fkb_run: report needs the directory of an earlier run");
      rep = fkbsde::cli::reproduce((std::filesystem::path(out_dir) / "report.json").string(), opts);
      target = (std::filesystem::path(out_dir) / "reproduction").string();
    } else {
      need(cfg != nullptr, "fkb_run: null config");
      rep = fkbsde::cli::run(cfg->config, cmd, opts);
      if (out_dir) target = out_dir;
    }
    if (!target.empty()) fkbsde::cli::write_report(rep, target);
    if (exit_code) *exit_code = rep.exit_code();
    if (report) {
      auto* r = new fkb_report{std::move(rep), {}};
      r->json = r->report.json();
      *report = r;
    }
  });
}

const char* fkb_report_json(const fkb_report* report) { return report ? report->json.c_str() : nullptr; }

int fkb_report_exit_code(const fkb_report* report) { return report ? report->report.exit_code() : 2; }

void fkb_report_free(fkb_report* report) { delete report; }

const char* fkb_last_error(void) { return g_last_error.c_str(); }

const char* fkb_status_string(fkb_status status) {
  switch (status) {
    case FKB_OK:
      return "ok";
    case FKB_ERR_INTERNAL:
      return "internal";
    default:
      if (status >= FKB_ERR_STRUCTURAL && status <= FKB_ERR_IO)
        return fkbsde::to_string(static_cast<fkbsde::ErrorCode>(static_cast<int>(status)));
      return "unknown";
  }
}

const char* fkb_version(void) { return fkbsde::version(); }

}  // extern "C"
