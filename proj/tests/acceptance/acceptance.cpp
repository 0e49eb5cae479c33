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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fkbsde/bsde_core.hpp"
#include "fkbsde/calibration.hpp"
#include "fkbsde/error.hpp"
#include "fkbsde/feynman_kac.hpp"
#include "fkbsde/fkbsde.h"
#include "fkbsde/linear_bsde.hpp"
#include "fkbsde/oracle_pde.hpp"
#include "fkbsde/presets.hpp"
#include "fkbsde/spectral_space.hpp"

namespace {

using namespace fkbsde;
namespace fs = std::filesystem;
using presets::ProblemSpec;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const Exec kExec{0};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bsde::SolverSettings settings_of(const fk::PdeProblem& p) { return {p.solver.basis, p.solver.picard_iters}; }

forward::PathEnsemble ensemble_for(const fk::PdeProblem& p, const forward::SpectralVector& x) {
  auto incs = std::make_shared<const forward::BrownianIncrements>(
      forward::sample_increments(p.grid, p.solver.paths, p.model.noise, RngPolicy(p.solver.seed), 0, kExec));
  return forward::simulate_ensemble(p.model.generator, p.model.coeffs, p.grid, x, std::move(incs), 0, kExec);
}

// Linear drivers over one OU forward model (lambda = 1, sigma = 1, d = 1, x = 1).
std::vector<ProblemSpec> ou_linear_family() {
  std::vector<ProblemSpec> out;
  auto add = [&](const std::string& driver, presets::DriverParams dp, const std::string& terminal) {
    auto s = presets::preset_spec("ou_linear");
    s.driver = driver;
    s.driver_params = dp;
    s.terminal = terminal;
    out.push_back(s);
  };
  add("linear", {}, "coordinate");
  presets::DriverParams decay;
  decay.rho = 1.0;
  add("linear_decay", decay, "cos_first");
  presets::DriverParams neg;
  neg.a = -0.5;
  neg.b = 0.2;
  neg.c = -0.3;
  add("linear", neg, "sin_first");
  presets::DriverParams strong_c;
  strong_c.c = 0.5;
  add("linear", strong_c, "square_first");
  add("zero", {}, "sin_first");
  return out;
}

Outcome gamma_equivalence() {
  const auto family = ou_linear_family();
  std::size_t bad_seeds = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto base = family.front();
    base.solver.seed = seed;
    const auto p0 = presets::build_problem(base);
    const auto ens = ensemble_for(p0, presets::evaluation_point(base));
    int ok = 0;
    for (auto spec : family) {
      spec.solver.seed = seed;
      const auto p = presets::build_problem(spec);
      const auto lin = *presets::make_linear_driver(spec.driver, spec.driver_params, spec.d_xi);
      const auto sol = bsde::solve_backward(lin.to_driver(), p.terminal, ens, settings_of(p), kExec);
      const auto gamma = linear::gamma_paths(lin, ens, 0, kExec);
      const auto expl = linear::solve_linear_explicit(lin, p.terminal, ens, gamma, kExec);
      const double z = std::abs(sol.y0 - expl.y0) / std::hypot(sol.y0_stderr, expl.std_error);
      worst = std::max(worst, z);
      if (z <= 3.0) ++ok;
    }
    if (ok < 4) ++bad_seeds;
  }
  return {bad_seeds == 0, fmt("seeds below 4/5: %.0f, max |gap|/se %.3f", static_cast<double>(bad_seeds), worst)};
}

Outcome gaussian_moment() {
  const auto spec = presets::preset_spec("gaussian_1d");
  const auto u = fk::evaluate_u(presets::build_problem(spec), 0.0, presets::evaluation_point(spec), kExec);
  const double target = oracle::closed_form("gaussian_moment", {}, 0.0, 0.0);
  const double rel = std::abs(u.value - target) / target;
  return {rel <= 0.02, fmt("u %.6f target %.6f rel %.4f <= 0.02", u.value, target, rel)};
}

Outcome stochastic_heat() {
  const auto spec = presets::preset_spec("heat_d8");
  const auto u = fk::evaluate_u(presets::build_problem(spec), 0.0, presets::evaluation_point(spec), kExec);
  const double target = std::exp(-std::numbers::pi * std::numbers::pi * 0.1);
  const double gap = std::abs(u.value - target);
  return {gap <= 3.0 * u.std_error,
          fmt("u %.6f target %.6f gap %.2e <= %.2e", u.value, target, gap, 3.0 * u.std_error)};
}

Outcome semilinear_oracle() {
  const auto spec = presets::preset_spec("semilinear_1d");
  const auto p = presets::build_problem(spec);
  std::vector<std::pair<double, double>> points;
  for (double t : {0.0, 0.5})
    for (double x : {-1.0, 0.0, 1.0}) points.emplace_back(t, x);
  const auto fd = fk::solve_oracle(p, points);
  const auto rep = fk::oracle_compare(p, fd, points, 0.05, kExec);
  return {rep.holds, fmt("max relative gap %.4f <= 0.05 over %.0f points", rep.max_rel_error,
                         static_cast<double>(rep.rows.size()))};
}

Outcome comparison() {
  auto spec = presets::preset_spec("decay_1d");
  spec.driver_params.rho = 1.0;
  spec.solver.paths = 20000;
  const double expected = 0.5 * std::exp(-1.0);
  std::size_t weak_fail = 0, strict_fail = 0, margin_fail = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.solver.seed = seed;
    const auto p = presets::build_problem(spec);
    const auto ens = ensemble_for(p, presets::evaluation_point(spec));
    auto shifted = spec.terminal_params;
    shifted.shift += 0.5;
    const bsde::BsdeData first{p.driver, p.terminal};
    const bsde::BsdeData second{p.driver, presets::make_terminal(spec.terminal, shifted, spec.d)};
    const auto rep = bsde::comparison_check(first, second, ens, settings_of(p), 3.0, kExec);
    const double z = std::abs(rep.margin - expected) / rep.std_error;
    worst = std::max(worst, z);
    if (z > 3.0) ++margin_fail;
    if (!rep.weak_holds) ++weak_fail;
    if (!rep.strict_holds) ++strict_fail;
  }
  return {
      weak_fail == 0 && strict_fail == 0 && margin_fail == 0,
      fmt("weak failures %.0f, strict misses %.0f, margins off target %.0f, max |margin - 0.5/e|/se %.3f",
          static_cast<double>(weak_fail), static_cast<double>(strict_fail), static_cast<double>(margin_fail), worst)};
}

Outcome estimates() {
  const double a_bound = calibration::kAprioriC * calibration::kSlack;
  const double s_bound = calibration::kStabilityC * calibration::kSlack;
  double a_max = 0.0, s_max = 0.0;
  for (const auto& draw : calibration::family()) {
    for (std::uint64_t seed : calibration::kFreshSeeds) {
      const auto r = calibration::measure(draw, seed, kExec);
      a_max = std::max(a_max, r.apriori);
      s_max = std::max(s_max, r.stability);
    }
  }
  return {a_max <= a_bound && s_max <= s_bound,
          fmt("a priori max %.4f <= %.4f, stability max %.4f <= %.4f", a_max, a_bound, s_max, s_bound)};
}

double b_stability(ProblemSpec spec, double& r1, double& r2) {
  auto probe = [](const ProblemSpec& s) {
    std::vector<std::size_t> modes;
    for (std::size_t k : {1, 4, 8})
      if (k <= s.d) modes.push_back(k);
    const auto p = presets::build_problem(s);
    return fk::b_continuity_probe(p, s.t, presets::evaluation_point(s),
                                  fk::mode_perturbations(s.d, modes, 20, 1e-2, 1e-1), kExec)
        .max_ratio;
  };
  r1 = probe(spec);
  spec.d *= 2;
  spec.d_xi *= 2;
  r2 = probe(spec);
  return r2 / r1;
}

Outcome b_continuity() {
  auto heat = presets::preset_spec("heat_d8");
  auto nonlinear = heat;
  nonlinear.terminal = "cos_weighted";
  nonlinear.driver = "sine";
  nonlinear.driver_params.alpha = 0.5;
  double h1, h2, n1, n2;
  const double sh = b_stability(heat, h1, h2);
  const double sn = b_stability(nonlinear, n1, n2);
  auto ok = [](double a, double b, double s) {
    return std::isfinite(a) && std::isfinite(b) && a > 0.0 && s >= 0.5 && s <= 2.0;
  };
  return {ok(h1, h2, sh) && ok(n1, n2, sn),
          fmt("heat ratio(16)/ratio(8) %.4f, nonlinear %.4f (max ratios %.3e, %.3e)", sh, sn, h1, n1)};
}

Outcome terminal_condition() {
  const auto spec = presets::preset_spec("ou_linear");
  const auto p = presets::build_problem(spec);
  std::vector<double> times;
  for (double frac : {0.2, 0.1, 0.05, 0.025}) times.push_back(spec.T - frac);
  const auto rep = fk::terminal_condition_probe(p, presets::evaluation_point(spec), times, 0.02, 3.0, kExec);
  return {rep.holds, fmt("decreasing %.0f, final error %.4f <= %.4f", rep.decreasing ? 1.0 : 0.0, rep.rows.back().error,
                         rep.tolerance)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "fkbsde_acceptance_determinism";
  fs::remove_all(root);
  std::size_t compared = 0, mismatched = 0;
  std::string error;
  for (const char* command : {"verify-bsde", "verify-fk"}) {
    fkb_config* cfg = nullptr;
    if (fkb_config_load(FKBSDE_SOURCE_DIR "/configs/examples/ou_linear.ini", &cfg) != FKB_OK ||
        fkb_config_set(cfg, "solver.M", "2000") != FKB_OK || fkb_config_set(cfg, "solver.seed", "7") != FKB_OK) {
      error = fkb_last_error();
      fkb_config_free(cfg);
      break;
    }
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, 4u, 8u}) {
      const auto dir = root / (std::string(command) + "_t" + std::to_string(threads));
      fkb_report* rep = nullptr;
      int code = 0;
      if (fkb_run(cfg, command, dir.c_str(), threads, 1.0, &rep, &code) != FKB_OK) error = fkb_last_error();
      fkb_report_free(rep);
      dirs.push_back(dir);
    }
    fkb_config_free(cfg);
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto name = entry.path().filename();
      if (name == "timing.json") continue;
      const auto ref = slurp(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        ++compared;
        if (!fs::exists(dirs[k] / name) || slurp(dirs[k] / name) != ref) ++mismatched;
      }
    }
  }
  fs::remove_all(root);
  if (!error.empty()) return {false, "run failed: " + error};
  return {compared > 0 && mismatched == 0, fmt("%.0f file comparisons, %.0f mismatches", static_cast<double>(compared),
                                               static_cast<double>(mismatched))};
}

Outcome forward_properties() {
  // OU moments under exponential Euler at N = 400, M = 1e5.
  const double lambda = 1.0, q = 1.0, x0 = 1.0, T = 1.0;
  const auto gen = spectral::DiagonalGenerator::identity_decay(1, lambda);
  const auto bop = spectral::BWeight::canonical(gen);
  const auto coeffs = forward::constant_sigma(1, 1, q);
  const forward::TimeGrid grid(0.0, T, 400);
  const std::size_t M = 100000;
  auto incs = std::make_shared<const forward::BrownianIncrements>(
      forward::sample_increments(grid, M, spectral::NoiseModel(1), RngPolicy(2024), 0, kExec));
  const auto ens = forward::simulate_ensemble(gen, coeffs, grid, forward::SpectralVector({x0}), incs, 0, kExec);
  const auto mean = mean_and_stderr(M, kExec, [&](std::size_t m) { return ens.state(m, 400)[0]; });
  const std::map<std::string, double> params{{"lambda", lambda}, {"sigma", q}, {"T", T}};
  const double mean_cf = oracle::closed_form("ou_mean", params, 0.0, x0);
  const double var_cf = oracle::closed_form("ou_var", params, 0.0, x0);
  const auto sq = mean_and_stderr(M, kExec, [&](std::size_t m) {
    const double d = ens.state(m, 400)[0] - mean_cf;
    return d * d;
  });
  const bool moments =
      std::abs(mean.mean - mean_cf) <= 3.0 * mean.std_error && std::abs(sq.mean - var_cf) <= 3.0 * sq.std_error;

  // Semigroup composition and contraction on 1000 random inputs.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0), tt(0.0, 2.0);
  std::size_t violations = 0;
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t d = 1 + static_cast<std::size_t>(n % 16);
    std::vector<double> c(d);
    for (auto& v : c) v = u(rng);
    const forward::SpectralVector v(c);
    const auto g = n % 2 ? spectral::DiagonalGenerator::dirichlet_laplacian(d)
                         : spectral::DiagonalGenerator::identity_decay(d, 0.5 + tt(rng));
    const double s = tt(rng), t = tt(rng);
    const auto lhs = spectral::apply_semigroup(g, s, spectral::apply_semigroup(g, t, v));
    const auto rhs = spectral::apply_semigroup(g, s + t, v);
    double err = 0.0;
    for (std::size_t k = 0; k < d; ++k) err = std::max(err, std::abs(lhs[k] - rhs[k]) / (1.0 + std::abs(v[k])));
    worst = std::max(worst, err);
    if (err > 1e-14) ++violations;
    if (spectral::norm_h(spectral::apply_semigroup(g, t, v)) > spectral::norm_h(v) * (1.0 + 1e-15)) ++violations;
  }
  return {moments && violations == 0,
          fmt("mean %.5f vs %.5f, second moment %.5f vs %.5f", mean.mean, mean_cf, sq.mean, var_cf) +
              fmt(", semigroup violations %.0f (max err %.1e)", static_cast<double>(violations), worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 when no runtime bound applies
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gamma oracle vs regression", 120.0, gamma_equivalence},
      {2, "gaussian moment", 10.0, gaussian_moment},
      {3, "stochastic heat mean", 30.0, stochastic_heat},
      {4, "semilinear oracle", 60.0, semilinear_oracle},
      {5, "comparison", 0.0, comparison},
      {6, "a priori and stability", 0.0, estimates},
      {7, "B-continuity", 0.0, b_continuity},
      {8, "terminal condition", 0.0, terminal_condition},
      {9, "determinism", 0.0, determinism},
      {10, "forward properties", 0.0, forward_properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs > c.limit_s) {
      out.pass = false;
      out.detail += fmt("; runtime %.1f s exceeds %.0f s", secs, c.limit_s);
    }
    if (!out.pass) ++failures;
    std::printf("criterion %2d %-28s %s  %s  [%.1f s]\n", c.id, c.name, out.pass ? "PASS" : "FAIL", out.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
