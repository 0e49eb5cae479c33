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

#include "fkbsde/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "fkbsde/calibration.hpp"
#include "fkbsde/error.hpp"
#include "fkbsde/feynman_kac.hpp"
#include "fkbsde/linear_bsde.hpp"

namespace fkbsde::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kSchema = "fkbsde.report/1";
constexpr std::size_t kExportedPaths = 64;

struct Context {
  const RunConfig& config;
  fk::PdeProblem problem;
  forward::SpectralVector x;
  double t;
  Exec exec;
  double tol_scale;
  std::uint64_t seed;
};

using CheckBody = std::function<void(CheckResult&)>;

CheckResult guarded(const std::string& name, const std::string& probe, std::uint64_t seed, const CheckBody& body) {
  CheckResult r;
  r.name = name;
  r.probe = probe;
  r.seed = seed;
  const auto start = Clock::now();
  try {
    body(r);
  } catch (const Error& e) {
    r.verdict = "error";
    r.message = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    r.verdict = "error";
    r.message = e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

void set_verdict(CheckResult& r, bool ok) { r.verdict = ok ? "pass" : "fail"; }

DriverSpec shifted(const DriverSpec& f, double eps) {
  DriverSpec out = f;
  out.name = f.name + "+shift";
  out.f = [base = f.f, eps](double s, std::span<const double> x, double y, std::span<const double> z) {
    return base(s, x, y, z) + eps;
  };
  return out;
}

TerminalFunctional shifted(const TerminalFunctional& g, double eps) {
  TerminalFunctional out = g;
  out.name = g.name + "+shift";
  out.g = [base = g.g, eps](std::span<const double> x) { return base(x) + eps; };
  return out;
}

bsde::SolverSettings settings_of(const fk::PdeProblem& p) { return {p.solver.basis, p.solver.picard_iters}; }

Table solution_table(const std::string& name, const forward::PathEnsemble& ens, const bsde::BsdeSolution& sol) {
  Table tab;
  tab.name = name;
  tab.columns = {"path", "step", "t", "y"};
  for (std::size_t j = 0; j < sol.d_xi; ++j) tab.columns.push_back("z_" + std::to_string(j + 1));
  const std::size_t paths = std::min(kExportedPaths, sol.paths);
  for (std::size_t m = 0; m < paths; ++m) {
    for (std::size_t i = 0; i <= sol.steps; ++i) {
      std::vector<double> row = {static_cast<double>(m), static_cast<double>(i), ens.grid().time(i), sol.Y(m, i)};
      for (std::size_t j = 0; j < sol.d_xi; ++j) row.push_back(i < sol.steps ? sol.Z(m, i)[j] : 0.0);
      tab.rows.push_back(std::move(row));
    }
  }
  return tab;
}

Table condition_table(const std::string& name, const forward::PathEnsemble& ens, const bsde::BsdeSolution& sol) {
  Table tab{name, {"step", "t", "condition"}, {}};
  for (std::size_t i = 0; i < sol.steps; ++i)
    tab.rows.push_back({static_cast<double>(i), ens.grid().time(i), sol.condition[i]});
  return tab;
}

// ---------------------------------------------------------------------------
// solve

void cmd_solve(const Context& ctx, std::vector<CheckResult>& out) {
  out.push_back(guarded("solve", "evaluate_u", ctx.seed, [&](CheckResult& r) {
    const auto run = fk::run_from(ctx.problem, ctx.t, ctx.x, ctx.exec);
    const auto& sol = run.solution;
    r.statistic = sol.y0;
    r.tolerance = sol.y0_stderr;
    r.details = {{"value", sol.y0},
                 {"std_error", sol.y0_stderr},
                 {"t", ctx.t},
                 {"steps", static_cast<double>(sol.steps)},
                 {"paths", static_cast<double>(sol.paths)},
                 {"degree", static_cast<double>(ctx.problem.solver.basis.degree)},
                 {"modes", static_cast<double>(ctx.problem.solver.basis.modes)},
                 {"max_condition", sol.max_condition()}};
    r.tables.push_back(solution_table("solve_paths", run.ensemble, sol));
    r.tables.push_back(condition_table("solve_conditions", run.ensemble, sol));
    set_verdict(r, std::isfinite(sol.y0));
  }));
}

// ---------------------------------------------------------------------------
// verify-bsde

void cmd_verify_bsde(const Context& ctx, std::vector<CheckResult>& out) {
  const auto& spec = ctx.config.spec;
  const double k_sigma = 3.0 * ctx.tol_scale;
  std::unique_ptr<fk::Run> base;
  try {
    base = std::make_unique<fk::Run>(fk::run_from(ctx.problem, ctx.t, ctx.x, ctx.exec));
  } catch (const Error&) {
    base.reset();
  }
  auto need_base = [&] {
    if (!base) base = std::make_unique<fk::Run>(fk::run_from(ctx.problem, ctx.t, ctx.x, ctx.exec));
    return std::cref(*base);
  };

  const auto configured_linear = presets::make_linear_driver(spec.driver, spec.driver_params, spec.d_xi);
  const auto lin = configured_linear ? *configured_linear
                                     : *presets::make_linear_driver("linear", presets::DriverParams{}, spec.d_xi);
  const auto settings = settings_of(ctx.problem);

  out.push_back(guarded("gamma_oracle", "solve_linear_explicit", ctx.seed, [&](CheckResult& r) {
    const fk::Run& run = need_base();
    const auto& ens = run.ensemble;
    const auto sol = configured_linear
                         ? run.solution
                         : bsde::solve_backward(lin.to_driver(), ctx.problem.terminal, ens, settings, ctx.exec);
    const auto gamma = linear::gamma_paths(lin, ens, 0, ctx.exec);
    const auto expl = linear::solve_linear_explicit(lin, ctx.problem.terminal, ens, gamma, ctx.exec);
    const double se = std::hypot(sol.y0_stderr, expl.std_error);
    r.statistic = std::abs(sol.y0 - expl.y0);
    r.tolerance = k_sigma * se;
    r.details = {{"y0_regression", sol.y0},
                 {"y0_regression_se", sol.y0_stderr},
                 {"y0_explicit", expl.y0},
                 {"y0_explicit_se", expl.std_error},
                 {"configured_driver_is_linear", configured_linear ? 1.0 : 0.0}};
    Table tab{"gamma_martingale", {"step", "mean_increment", "std_error"}, {}};
    for (const auto& row : linear::martingale_increments(sol.y, lin, ens, gamma, ctx.exec))
      tab.rows.push_back({static_cast<double>(row.step), row.mean_increment, row.std_error});
    r.tables.push_back(std::move(tab));
    set_verdict(r, r.statistic <= r.tolerance);
  }));

  out.push_back(guarded("dominance", "dominance_check", ctx.seed, [&](CheckResult& r) {
    const fk::Run& run = need_base();
    const auto& ens = run.ensemble;
    const auto gamma = linear::gamma_paths(lin, ens, 0, ctx.exec);
    // The solution for a larger terminal value is a supersolution of the original problem.
    const auto cand =
        bsde::solve_backward(lin.to_driver(), shifted(ctx.problem.terminal, 0.25), ens, settings, ctx.exec);
    const auto rep = linear::dominance_check(cand.y, lin, ctx.problem.terminal, ens, gamma, k_sigma, ctx.exec);
    r.statistic = rep.margin;
    r.tolerance = -rep.tolerance;
    r.details = {{"candidate_y0", rep.candidate_y0},
                 {"explicit_y0", rep.explicit_y0},
                 {"std_error", rep.std_error},
                 {"terminal_shift", 0.25}};
    set_verdict(r, rep.holds);
  }));

  out.push_back(guarded("comparison", "comparison_check", ctx.seed, [&](CheckResult& r) {
    const fk::Run& run = need_base();
    const bsde::BsdeData first{ctx.problem.driver, ctx.problem.terminal};
    const bsde::BsdeData second{ctx.problem.driver, shifted(ctx.problem.terminal, 0.5)};
    const auto rep = bsde::comparison_check(first, second, run.ensemble, settings, k_sigma, ctx.exec);
    r.statistic = rep.margin;
    r.tolerance = rep.tolerance;
    r.details = {{"y1", rep.y1},
                 {"y2", rep.y2},
                 {"std_error", rep.std_error},
                 {"min_gap", rep.min_gap},
                 {"weak_holds", rep.weak_holds ? 1.0 : 0.0},
                 {"strict_applicable", rep.strict_applicable ? 1.0 : 0.0},
                 {"strict_holds", rep.strict_holds ? 1.0 : 0.0},
                 {"terminal_shift", 0.5}};
    set_verdict(r, rep.weak_holds && (!rep.strict_applicable || rep.strict_holds));
  }));

  auto estimate_details = [](CheckResult& r, const bsde::EstimateReport& rep) {
    r.statistic = rep.ratio;
    r.tolerance = rep.bound;
    r.details = {{"lhs", rep.lhs},
                 {"lhs_se", rep.lhs_se},
                 {"rhs", rep.rhs},
                 {"rhs_se", rep.rhs_se},
                 {"unbounded", rep.unbounded ? 1.0 : 0.0}};
    set_verdict(r, rep.holds);
  };

  out.push_back(guarded("apriori", "apriori_check", ctx.seed, [&](CheckResult& r) {
    const fk::Run& run = need_base();
    const auto rep = bsde::apriori_check(ctx.problem.driver, ctx.problem.terminal, run.ensemble, run.solution,
                                         calibration::kAprioriC, calibration::kSlack * ctx.tol_scale, ctx.exec);
    estimate_details(r, rep);
  }));

  out.push_back(guarded("stability", "stability_check", ctx.seed, [&](CheckResult& r) {
    const fk::Run& run = need_base();
    const bsde::BsdeData first{ctx.problem.driver, ctx.problem.terminal};
    const bsde::BsdeData second{shifted(ctx.problem.driver, 0.1), shifted(ctx.problem.terminal, 0.1)};
    const auto sol2 = bsde::solve_backward(second.driver, second.terminal, run.ensemble, settings, ctx.exec);
    const auto rep = bsde::stability_check(first, second, run.ensemble, run.solution, sol2, calibration::kStabilityC,
                                           calibration::kSlack * ctx.tol_scale, ctx.exec);
    estimate_details(r, rep);
    r.details["shift"] = 0.1;
  }));
}

// ---------------------------------------------------------------------------
// verify-fk

presets::ProblemSpec doubled(const presets::ProblemSpec& spec) {
  auto s = spec;
  if (s.d_xi == s.d) s.d_xi *= 2;
  s.d *= 2;
  return s;
}

Table b_table(const std::string& name, const fk::BContinuityTable& t) {
  Table tab{name, {"mode", "magnitude", "norm_hm1_sq", "u_base", "u_perturbed", "ratio"}, {}};
  for (const auto& r : t.rows)
    tab.rows.push_back({static_cast<double>(r.mode), r.magnitude, r.norm_hm1_sq, r.u_base, r.u_perturbed, r.ratio});
  return tab;
}

bool oracle_applies(const Context& ctx) {
  if (ctx.problem.dim() != 1 || ctx.problem.model.noise.d_xi != 1) return false;
  double s = 0.0;
  const double x = ctx.x[0];
  ctx.problem.model.coeffs.diffusion(ctx.t, std::span<const double>(&x, 1), std::span<double>(&s, 1));
  return std::abs(s) >= 1e-3;
}

void cmd_verify_fk(const Context& ctx, std::vector<CheckResult>& out) {
  const auto& spec = ctx.config.spec;
  const double k_sigma = 3.0 * ctx.tol_scale;
  const double horizon = spec.T - ctx.t;

  out.push_back(guarded("evaluate_u", "evaluate_u", ctx.seed, [&](CheckResult& r) {
    const auto est = fk::evaluate_u(ctx.problem, ctx.t, ctx.x, ctx.exec);
    r.statistic = est.value;
    r.tolerance = est.std_error;
    r.details = {{"value", est.value},
                 {"std_error", est.std_error},
                 {"steps", static_cast<double>(est.steps)},
                 {"paths", static_cast<double>(est.paths)},
                 {"max_condition", est.max_condition}};
    set_verdict(r, std::isfinite(est.value) && est.std_error >= 0.0);
  }));

  out.push_back(guarded("markov_consistency", "markov_consistency_check", ctx.seed, [&](CheckResult& r) {
    const auto grid = ctx.problem.run_grid(ctx.t);
    require(grid.steps() >= 2, ErrorCode::kStructural, "markov_consistency: need at least two steps");
    Table tab{"markov_consistency", {"h", "step", "lhs", "rhs", "gap", "std_error", "tolerance"}, {}};
    bool ok = true;
    double worst = -1.0;
    for (double frac : {0.1, 0.2}) {
      const auto k = std::clamp<long long>(std::llround(frac * static_cast<double>(grid.steps())), 1,
                                           static_cast<long long>(grid.steps()) - 1);
      const double h = static_cast<double>(k) * grid.dt();
      const auto rep = fk::markov_consistency_check(ctx.problem, ctx.t, ctx.x, h, k_sigma, ctx.exec);
      tab.rows.push_back(
          {rep.h, static_cast<double>(rep.step), rep.lhs, rep.rhs, rep.gap, rep.std_error, rep.tolerance});
      ok = ok && rep.holds;
      const double score = std::abs(rep.gap) / rep.tolerance;
      if (score > worst) {
        worst = score;
        r.statistic = std::abs(rep.gap);
        r.tolerance = rep.tolerance;
      }
    }
    r.tables.push_back(std::move(tab));
    set_verdict(r, ok);
  }));

  out.push_back(guarded("b_continuity", "b_continuity_probe", ctx.seed, [&](CheckResult& r) {
    auto perturb = [&](std::size_t d) {
      std::vector<std::size_t> modes;
      for (std::size_t k : {1, 4, 8})
        if (k <= d) modes.push_back(k);
      return fk::mode_perturbations(d, modes, 20, 1e-2, 1e-1);
    };
    const auto t1 = fk::b_continuity_probe(ctx.problem, ctx.t, ctx.x, perturb(spec.d), ctx.exec);
    const auto spec2 = doubled(spec);
    const auto p2 = presets::build_problem(spec2);
    const auto t2 = fk::b_continuity_probe(p2, ctx.t, presets::evaluation_point(spec2), perturb(spec2.d), ctx.exec);
    constexpr double kTiny = 1e-300;
    const bool both_zero = t1.max_ratio <= kTiny && t2.max_ratio <= kTiny;
    const double stability = both_zero ? 1.0 : t2.max_ratio / std::max(t1.max_ratio, kTiny);
    r.statistic = stability;
    r.tolerance = 2.0;
    r.details = {{"max_ratio_d", t1.max_ratio},
                 {"max_ratio_2d", t2.max_ratio},
                 {"d", static_cast<double>(spec.d)},
                 {"d_doubled", static_cast<double>(spec2.d)}};
    r.tables.push_back(b_table("b_continuity_d", t1));
    r.tables.push_back(b_table("b_continuity_2d", t2));
    set_verdict(r, std::isfinite(t1.max_ratio) && std::isfinite(t2.max_ratio) && stability <= 2.0 && stability >= 0.5);
  }));

  out.push_back(guarded("terminal_condition", "terminal_condition_probe", ctx.seed, [&](CheckResult& r) {
    std::vector<double> times;
    for (double frac : {0.2, 0.1, 0.05, 0.025}) times.push_back(spec.T - frac * horizon);
    const auto rep = fk::terminal_condition_probe(ctx.problem, ctx.x, times, 0.02 * ctx.tol_scale, k_sigma, ctx.exec);
    Table tab{"terminal_condition", {"t", "u", "std_error", "target", "error"}, {}};
    for (const auto& row : rep.rows) tab.rows.push_back({row.t, row.u, row.std_error, row.target, row.error});
    r.tables.push_back(std::move(tab));
    r.statistic = rep.rows.back().error;
    r.tolerance = rep.tolerance;
    r.details = {{"decreasing", rep.decreasing ? 1.0 : 0.0}};
    set_verdict(r, rep.holds);
  }));

  out.push_back(guarded("growth", "growth_probe", ctx.seed, [&](CheckResult& r) {
    auto dir = ctx.x;
    if (spectral::norm_h(dir) == 0.0) dir = forward::SpectralVector::unit(spec.d, 1);
    const auto rep =
        fk::growth_probe(ctx.problem, ctx.t, dir, {0.5, 1.0, 2.0, 4.0, 8.0}, 0.1 * ctx.tol_scale, ctx.exec);
    Table tab{"growth", {"norm", "u", "std_error"}, {}};
    for (const auto& row : rep.rows) tab.rows.push_back({row.norm, row.u, row.std_error});
    r.tables.push_back(std::move(tab));
    r.statistic = rep.exponent;
    r.tolerance = rep.bound;
    set_verdict(r, rep.holds);
  }));

  if (oracle_applies(ctx)) {
    out.push_back(guarded("oracle_compare", "oracle_compare", ctx.seed, [&](CheckResult& r) {
      std::vector<std::pair<double, double>> points;
      for (double tt : {ctx.t, ctx.t + 0.5 * horizon})
        for (double dx : {-1.0, 0.0, 1.0}) points.emplace_back(tt, ctx.x[0] + dx);
      const auto oracle = fk::solve_oracle(ctx.problem, points);
      const auto rep = fk::oracle_compare(ctx.problem, oracle, points, 0.05 * ctx.tol_scale, ctx.exec);
      Table tab{"oracle_compare", {"t", "x", "u", "std_error", "v", "rel_error"}, {}};
      for (const auto& row : rep.rows) tab.rows.push_back({row.t, row.x, row.u, row.std_error, row.v, row.rel_error});
      r.tables.push_back(std::move(tab));
      r.statistic = rep.max_rel_error;
      r.tolerance = rep.tolerance;
      r.details = {{"oracle_J", static_cast<double>(oracle.grid().J)},
                   {"oracle_n_t", static_cast<double>(oracle.grid().n_t)},
                   {"oracle_x_min", oracle.grid().x_min},
                   {"oracle_x_max", oracle.grid().x_max}};
      set_verdict(r, rep.holds);
    }));
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepPoint {
  double parameter;
  fk::UEstimate est;
};

CheckResult sweep_check(const Context& ctx, const std::string& name, const std::string& column,
                        const std::vector<presets::ProblemSpec>& specs, const std::vector<double>& parameters) {
  return guarded(name, "evaluate_u", ctx.seed, [&](CheckResult& r) {
    std::vector<SweepPoint> pts;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto p = presets::build_problem(specs[i]);
      pts.push_back({parameters[i], fk::evaluate_u(p, ctx.t, presets::evaluation_point(specs[i]), ctx.exec)});
    }
    Table tab{name, {column, "u", "std_error", "steps", "paths"}, {}};
    for (const auto& p : pts)
      tab.rows.push_back({p.parameter, p.est.value, p.est.std_error, static_cast<double>(p.est.steps),
                          static_cast<double>(p.est.paths)});
    r.tables.push_back(std::move(tab));
    const auto& a = pts[pts.size() - 2].est;
    const auto& b = pts.back().est;
    r.statistic = std::abs(b.value - a.value);
    r.tolerance = 3.0 * ctx.tol_scale * std::hypot(a.std_error, b.std_error) + 1e-12 * (1.0 + std::abs(b.value));
    set_verdict(r, r.statistic <= r.tolerance);
  });
}

void cmd_sweep(const Context& ctx, std::vector<CheckResult>& out) {
  const auto& spec = ctx.config.spec;
  {
    std::vector<presets::ProblemSpec> specs;
    std::vector<double> params;
    for (std::size_t n : {spec.N / 4, spec.N / 2, spec.N, 2 * spec.N}) {
      if (n == 0 || (!params.empty() && static_cast<double>(n) == params.back())) continue;
      auto s = spec;
      s.N = n;
      specs.push_back(s);
      params.push_back(static_cast<double>(n));
    }
    out.push_back(sweep_check(ctx, "sweep_n", "N", specs, params));
  }
  {
    std::vector<presets::ProblemSpec> specs;
    std::vector<double> params;
    for (std::size_t m : {spec.solver.paths / 16, spec.solver.paths / 4, spec.solver.paths}) {
      if (m < 2 || (!params.empty() && static_cast<double>(m) == params.back())) continue;
      auto s = spec;
      s.solver.paths = m;
      specs.push_back(s);
      params.push_back(static_cast<double>(m));
    }
    if (specs.size() == 1) specs.push_back(specs.back()), params.push_back(params.back());
    out.push_back(sweep_check(ctx, "sweep_m", "M", specs, params));
  }
  out.push_back(sweep_check(ctx, "sweep_d", "d", {spec, doubled(spec)},
                            {static_cast<double>(spec.d), static_cast<double>(2 * spec.d)}));
}

json check_json(const CheckResult& c) {
  json j;
  j["name"] = c.name;
  j["probe"] = c.probe;
  j["verdict"] = c.verdict;
  j["statistic"] = c.statistic;
  j["tolerance"] = c.tolerance;
  j["seed"] = c.seed;
  j["details"] = json::object();
  for (const auto& [k, v] : c.details) j["details"][k] = v;
  if (!c.message.empty()) j["message"] = c.message;
  j["tables"] = json::array();
  for (const auto& t : c.tables) j["tables"].push_back(t.name + ".csv");
  return j;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"solve", "verify-bsde", "verify-fk", "sweep", "report"};
  return names;
}

RunReport run(const RunConfig& config, const std::string& command, const RunOptions& options) {
  require(options.tol_scale > 0.0 && std::isfinite(options.tol_scale), ErrorCode::kInvalidArgument,
          "tol_scale must be positive");
  const auto start = Clock::now();
  RunReport report;
  report.command = command;
  report.config = config;
  report.tol_scale = options.tol_scale;
  const auto& spec = config.spec;

  std::vector<CheckResult> checks;
  std::unique_ptr<Context> ctx;
  try {
    ctx = std::make_unique<Context>(Context{config, config.problem(), presets::evaluation_point(spec), spec.t,
                                            Exec{options.threads}, options.tol_scale, spec.solver.seed});
  } catch (const Error& e) {
    checks.push_back(guarded("config", "load_config", spec.solver.seed, [&](CheckResult&) { throw e; }));
  }
  if (ctx) {
    if (command == "solve") {
      cmd_solve(*ctx, checks);
    } else if (command == "verify-bsde") {
      cmd_verify_bsde(*ctx, checks);
    } else if (command == "verify-fk") {
      cmd_verify_fk(*ctx, checks);
    } else if (command == "sweep") {
      cmd_sweep(*ctx, checks);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
    }
  }
  std::sort(checks.begin(), checks.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  report.checks = std::move(checks);
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

std::string RunReport::json() const {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["version"] = version();
  j["command"] = command;
  j["provenance"] = {{"config_hash", config.hash()},
                     {"seed", config.spec.solver.seed},
                     {"version", version()},
                     {"tol_scale", tol_scale},
                     {"config", config.canonical()}};
  j["checks"] = nlohmann::json::array();
  std::map<std::string, int> counts = {{"pass", 0}, {"fail", 0}, {"error", 0}};
  for (const auto& c : checks) {
    j["checks"].push_back(check_json(c));
    ++counts[c.verdict];
  }
  j["summary"] = {{"checks", checks.size()},
                  {"pass", counts["pass"]},
                  {"fail", counts["fail"]},
                  {"error", counts["error"]},
                  {"exit_code", exit_code()}};
  return j.dump(2) + "\n";
}

std::string RunReport::timing_json() const {
  nlohmann::json j;
  j["total_seconds"] = seconds;
  j["checks"] = nlohmann::json::object();
  for (const auto& c : checks) j["checks"][c.name] = c.seconds;
  return j.dump(2) + "\n";
}

int RunReport::exit_code() const {
  int code = 0;
  for (const auto& c : checks) {
    if (c.verdict == "error") return 2;
    if (c.verdict != "pass") code = 1;
  }
  return code;
}

RunReport reproduce(const std::string& report_path, const RunOptions& options) {
  std::ifstream in(report_path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open report '" + report_path + "'");
  nlohmann::json old;
  try {
    old = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorCode::kParse, "report '" + report_path + "': " + e.what());
  }
  require(old.value("schema", "") == kSchema, ErrorCode::kParse, "report '" + report_path + "': unknown schema");
  const auto text = old.at("provenance").at("config").get<std::string>();
  const auto command = old.at("command").get<std::string>();
  const auto cfg = parse_config(text, report_path + "#config");
  RunOptions opts = options;
  opts.tol_scale = old.at("provenance").at("tol_scale").get<double>();

  const auto start = Clock::now();
  RunReport out;
  out.command = "report";
  out.config = cfg;
  out.tol_scale = opts.tol_scale;
  out.checks.push_back(guarded("reproduction", "report", cfg.spec.solver.seed, [&](CheckResult& r) {
    const auto again = run(cfg, command, opts);
    const auto fresh = nlohmann::json::parse(again.json());
    const auto& a = old.at("checks");
    const auto& b = fresh.at("checks");
    std::size_t mismatches = a.size() == b.size() ? 0 : 1;
    std::string names;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a[i] != b[i]) {
        ++mismatches;
        names += (names.empty() ? "" : ", ") + a[i].value("name", std::string("?"));
      }
    }
    const bool hash_ok = old.at("provenance").at("config_hash") == fresh.at("provenance").at("config_hash");
    if (!hash_ok) ++mismatches;
    r.statistic = static_cast<double>(mismatches);
    r.tolerance = 0.0;
    r.details = {{"checks", static_cast<double>(a.size())}, {"config_hash_match", hash_ok ? 1.0 : 0.0}};
    if (!names.empty()) r.message = "differing checks: " + names;
    set_verdict(r, mismatches == 0);
  }));
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

void write_report(const RunReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create output directory '" + out_dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = (fs::path(out_dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::kIo, "cannot write '" + path + "'");
    f << content;
    require(static_cast<bool>(f), ErrorCode::kIo, "write failed for '" + path + "'");
  };
  write("report.json", report.json());
  write("timing.json", report.timing_json());
  for (const auto& c : report.checks) {
    for (const auto& t : c.tables) {
      std::string csv;
      for (std::size_t i = 0; i < t.columns.size(); ++i) csv += (i ? "," : "") + t.columns[i];
      csv += "\n";
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + fmt(row[i]);
        csv += "\n";
      }
      write(t.name + ".csv", csv);
    }
  }
}

}  // namespace fkbsde::cli
