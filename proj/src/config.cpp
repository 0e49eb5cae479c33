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

#include "fkbsde/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "fkbsde/error.hpp"

namespace fkbsde::cli {

namespace {

using presets::ProblemSpec;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Setters throw std::invalid_argument with a short reason; callers add location.
double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(ProblemSpec&, const std::string&)> set;
  std::function<std::string(const ProblemSpec&)> get;
};

#define FKB_REAL(sec, name, member)                                                   \
  Field {                                                                             \
    sec, name, [](ProblemSpec& s, const std::string& v) { s.member = to_double(v); }, \
        [](const ProblemSpec& s) { return fmt(s.member); }                            \
  }
#define FKB_UINT(sec, name, member, type)                                                              \
  Field {                                                                                              \
    sec, name, [](ProblemSpec& s, const std::string& v) { s.member = static_cast<type>(to_uint(v)); }, \
        [](const ProblemSpec& s) { return std::to_string(s.member); }                                  \
  }
#define FKB_TEXT(sec, name, member)                                        \
  Field {                                                                  \
    sec, name, [](ProblemSpec& s, const std::string& v) { s.member = v; }, \
        [](const ProblemSpec& s) { return s.member; }                      \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      FKB_TEXT("spectral", "generator", generator),
      FKB_UINT("spectral", "d", d, std::size_t),
      FKB_REAL("spectral", "lambda", lambda),
      FKB_REAL("spectral", "c0", c0),
      FKB_UINT("noise", "d_xi", d_xi, std::size_t),
      FKB_TEXT("forward", "coefficients", coefficients),
      FKB_REAL("forward", "q", coeff.q),
      FKB_REAL("forward", "beta", coeff.beta),
      FKB_REAL("forward", "beta0", coeff.beta0),
      FKB_REAL("forward", "beta1", coeff.beta1),
      FKB_REAL("forward", "gamma", coeff.gamma),
      FKB_TEXT("driver", "name", driver),
      FKB_REAL("driver", "a", driver_params.a),
      FKB_REAL("driver", "b", driver_params.b),
      FKB_REAL("driver", "c", driver_params.c),
      FKB_REAL("driver", "rho", driver_params.rho),
      FKB_REAL("driver", "shift", driver_params.shift),
      FKB_REAL("driver", "alpha", driver_params.alpha),
      FKB_TEXT("terminal", "name", terminal),
      FKB_REAL("terminal", "kappa", terminal_params.kappa),
      FKB_UINT("terminal", "k", terminal_params.k, std::size_t),
      FKB_REAL("terminal", "shift", terminal_params.shift),
      FKB_REAL("grid", "t0", t0),
      FKB_REAL("grid", "T", T),
      FKB_UINT("grid", "N", N, std::size_t),
      FKB_UINT("solver", "M", solver.paths, std::size_t),
      FKB_UINT("solver", "seed", solver.seed, std::uint64_t),
      FKB_UINT("solver", "degree", solver.basis.degree, unsigned),
      FKB_UINT("solver", "modes", solver.basis.modes, std::size_t),
      FKB_UINT("solver", "picard_iters", solver.picard_iters, unsigned),
      FKB_REAL("point", "t", t),
      Field{"point", "x", [](ProblemSpec& s, const std::string& v) { s.x = to_list(v); },
            [](const ProblemSpec& s) {
              std::string out;
              for (std::size_t i = 0; i < s.x.size(); ++i) out += (i ? ", " : "") + fmt(s.x[i]);
              return out;
            }},
  };
  return table;
}

#undef FKB_REAL
#undef FKB_UINT
#undef FKB_TEXT

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

void validate(const RunConfig& cfg) {
  const auto& s = cfg.spec;
  auto check = [&](bool ok, const std::string& field, const std::string& why) {
    require(ok, ErrorCode::kInvalidArgument, cfg.origin + ": " + field + ": " + why);
  };
  check(s.solver.paths >= 2, "[solver] M", "need at least 2 paths");
  check(s.N >= 1, "[grid] N", "need at least one step");
  check(s.T > s.t0, "[grid] T", "need T > t0");
  check(s.t >= s.t0 && s.t < s.T, "[point] t", "need t0 <= t < T");
  check(s.solver.basis.degree <= 6, "[solver] degree", "at most 6");
  check(s.solver.picard_iters <= 10, "[solver] picard_iters", "at most 10");
  check(s.x.size() <= s.d, "[point] x", "more coefficients than d");
  (void)cfg.problem();
}

}  // namespace

std::string RunConfig::canonical() const {
  std::string out = "[problem]\npreset = " + spec.preset + "\n";
  std::string section = "problem";
  for (const auto& f : fields()) {
    if (section != f.section) {
      section = f.section;
      out += "\n[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(spec) + "\n";
  }
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fk::PdeProblem RunConfig::problem() const {
  try {
    return presets::build_problem(spec);
  } catch (const Error& e) {
    std::string what = origin + ": invalid problem: " + e.what();
    if (what.find("strong B") != std::string::npos) what += " (fields [spectral] generator, lambda, c0)";
    throw Error(e.code(), what);
  }
}

RunConfig parse_config(std::string_view text, const std::string& origin) {
  struct Entry {
    std::size_t line;
    std::string section, key, value;
  };
  std::vector<Entry> entries;
  std::string section;
  std::string preset;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    auto line = trim(raw);
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, ErrorCode::kParse, where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::kParse, where + "expected 'key = value'");
    require(!section.empty(), ErrorCode::kParse, where + "key outside of any section");
    Entry e{line_no, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    require(!e.key.empty(), ErrorCode::kParse, where + "empty key");
    if (e.section == "problem" && e.key == "preset") {
      preset = e.value;
      continue;
    }
    require(find_field(e.section, e.key) != nullptr, ErrorCode::kParse,
            where + "unknown key [" + e.section + "] " + e.key);
    entries.push_back(std::move(e));
  }

  RunConfig cfg;
  cfg.origin = origin;
  if (preset.empty() || preset == "custom") {
    cfg.spec.preset = "custom";
    cfg.spec.x = {0.0};
  } else {
    try {
      cfg.spec = presets::preset_spec(preset);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, origin + ": [problem] preset: " + e.what());
    }
  }
  for (const auto& e : entries) {
    try {
      find_field(e.section, e.key)->set(cfg.spec, e.value);
    } catch (const std::invalid_argument& ex) {
      fail(ErrorCode::kParse,
           origin + ":" + std::to_string(e.line) + ": [" + e.section + "] " + e.key + ": " + ex.what());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_override(RunConfig& config, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  require(dot != std::string::npos, ErrorCode::kParse, "override '" + dotted_key + "': expected section.key");
  const auto section = dotted_key.substr(0, dot);
  const auto key = dotted_key.substr(dot + 1);
  require(!(section == "problem" && key == "preset"), ErrorCode::kParse,
          "override '" + dotted_key + "': the preset is fixed by the config file");
  const auto* field = find_field(section, key);
  require(field != nullptr, ErrorCode::kParse, "override: unknown key [" + section + "] " + key);
  try {
    field->set(config.spec, trim(value));
  } catch (const std::invalid_argument& ex) {
    fail(ErrorCode::kParse, "override [" + section + "] " + key + ": " + ex.what());
  }
  validate(config);
}

}  // namespace fkbsde::cli
