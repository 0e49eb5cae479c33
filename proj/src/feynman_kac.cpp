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

#include "fkbsde/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "fkbsde/error.hpp"

namespace fkbsde::fk {

void PdeProblem::validate() const {
  model.validate();
  require(solver.paths >= 2, ErrorCode::kInvalidArgument, "problem: need at least 2 paths");
  require(model.coeffs.dim() == dim(), ErrorCode::kStructural, "problem: coefficient dimension mismatch");
}

forward::TimeGrid PdeProblem::run_grid(double t) const {
  require(std::isfinite(t) && t < grid.T(), ErrorCode::kInvalidArgument, "evaluate_u: need t < T");
  const double span = grid.T() - t;
  const auto steps = static_cast<std::size_t>(std::max<long long>(1, std::llround(span / grid.dt())));
  return forward::TimeGrid(t, grid.T(), steps);
}

Run run_from(const PdeProblem& problem, double t, const SpectralVector& x, const Exec& exec) {
  require(x.dim() == problem.dim(), ErrorCode::kStructural, "evaluate_u: x has the wrong dimension");
  const auto run_grid = problem.run_grid(t);
  const std::size_t n_total = problem.grid.steps();
  const std::size_t offset = run_grid.steps() <= n_total ? n_total - run_grid.steps() : 0;
  auto incs = std::make_shared<const forward::BrownianIncrements>(forward::sample_increments(
      run_grid, problem.solver.paths, problem.model.noise, RngPolicy(problem.solver.seed), offset, exec));
  auto ens =
      forward::simulate_ensemble(problem.model.generator, problem.model.coeffs, run_grid, x, std::move(incs), 0, exec);
  const bsde::SolverSettings settings{problem.solver.basis, problem.solver.picard_iters};
  auto sol = bsde::solve_backward(problem.driver, problem.terminal, ens, settings, exec);
  return Run{std::move(ens), std::move(sol)};
}

UEstimate evaluate_u(const PdeProblem& problem, double t, const SpectralVector& x, const Exec& exec) {
  const auto run = run_from(problem, t, x, exec);
  UEstimate est;
  est.value = run.solution.y0;
  est.std_error = run.solution.y0_stderr;
  est.steps = run.solution.steps;
  est.paths = run.solution.paths;
  est.degree = problem.solver.basis.degree;
  est.modes = problem.solver.basis.modes;
  est.max_condition = run.solution.max_condition();
  require(std::isfinite(est.value), ErrorCode::kOverflow, "evaluate_u: non-finite value");
  return est;
}

MarkovReport markov_consistency_check(const PdeProblem& problem, double t, const SpectralVector& x, double h,
                                      double sigma_mult, const Exec& exec) {
  const auto run = run_from(problem, t, x, exec);
  const auto& ens = run.ensemble;
  const auto& sol = run.solution;
  const double dt = ens.grid().dt();
  const long long k = std::llround(h / dt);
  require(k > 0 && static_cast<std::size_t>(k) < ens.steps() &&
              std::abs(static_cast<double>(k) * dt - h) <= 1e-9 * (1.0 + h),
          ErrorCode::kStructural, "markov_consistency_check: t+h must be an interior grid point");
  const auto step = static_cast<std::size_t>(k);

  std::vector<double> xi(ens.paths());
  parallel_for(ens.paths(), exec, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t m = m0; m < m1; ++m) {
      double integral = 0.0;
      for (std::size_t i = 0; i < step; ++i)
        integral += problem.driver(ens.grid().time(i), ens.state(m, i), sol.Y(m, i), sol.Z(m, i)) * dt;
      xi[m] = sol.Y(m, step) - integral;
    }
  });
  const auto rhs = mean_and_stderr(xi.size(), exec, [&](std::size_t m) { return xi[m]; });

  MarkovReport rep;
  rep.h = h;
  rep.step = step;
  rep.lhs = sol.y0;
  rep.rhs = rhs.mean;
  rep.gap = rep.lhs - rep.rhs;
  rep.std_error = rhs.std_error;
  rep.tolerance = sigma_mult * rep.std_error + 1e-12 * (1.0 + std::abs(rep.lhs));
  rep.holds = std::abs(rep.gap) <= rep.tolerance;
  return rep;
}

std::vector<SpectralVector> mode_perturbations(std::size_t d, const std::vector<std::size_t>& modes, std::size_t count,
                                               double lo, double hi) {
  require(!modes.empty() && count >= 1 && lo > 0.0 && hi >= lo, ErrorCode::kInvalidArgument,
          "mode_perturbations: need modes, count >= 1 and 0 < lo <= hi");
  std::vector<SpectralVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    const double magnitude = lo * std::pow(hi / lo, w);
    out.push_back(SpectralVector::unit(d, modes[i % modes.size()], magnitude));
  }
  return out;
}

BContinuityTable b_continuity_probe(const PdeProblem& problem, double t, const SpectralVector& x,
                                    const std::vector<SpectralVector>& perturbations, const Exec& exec) {
  const double base = evaluate_u(problem, t, x, exec).value;
  BContinuityTable table;
  for (const auto& p : perturbations) {
    const double q = spectral::norm_hm1_sq(problem.model.bop, p);
    require(q > 0.0, ErrorCode::kInvalidArgument, "b_continuity_probe: perturbations must be nonzero");
    BContinuityRow row;
    std::size_t nonzero = 0;
    for (std::size_t k = 0; k < p.dim(); ++k) {
      if (p[k] != 0.0) {
        ++nonzero;
        row.mode = k + 1;
      }
    }
    if (nonzero != 1) row.mode = 0;
    row.magnitude = spectral::norm_h(p);
    row.norm_hm1_sq = q;
    row.u_base = base;
    row.u_perturbed = evaluate_u(problem, t, x + p, exec).value;
    const double diff = row.u_perturbed - base;
    row.ratio = diff * diff / q;
    table.max_ratio = std::max(table.max_ratio, row.ratio);
    table.rows.push_back(row);
  }
  return table;
}

TerminalReport terminal_condition_probe(const PdeProblem& problem, const SpectralVector& x,
                                        const std::vector<double>& times, double rel_tol, double sigma_mult,
                                        const Exec& exec) {
  require(!times.empty(), ErrorCode::kInvalidArgument, "terminal_condition_probe: need at least one time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] < problem.grid.T() && (i == 0 || times[i] > times[i - 1]), ErrorCode::kInvalidArgument,
            "terminal_condition_probe: times must increase strictly towards T");
  }
  TerminalReport rep;
  rep.decreasing = true;
  for (double t : times) {
    const auto est = evaluate_u(problem, t, x, exec);
    TerminalRow row;
    row.t = t;
    row.u = est.value;
    row.std_error = est.std_error;
    row.target = problem.terminal(spectral::apply_semigroup(problem.model.generator, problem.grid.T() - t, x));
    row.error = std::abs(row.u - row.target);
    if (!rep.rows.empty()) {
      const auto& prev = rep.rows.back();
      const double slack = sigma_mult * std::hypot(prev.std_error, row.std_error);
      rep.decreasing = rep.decreasing && row.error <= prev.error + slack;
    }
    rep.rows.push_back(row);
  }
  rep.tolerance = rel_tol * (1.0 + spectral::norm_h(x));
  rep.holds = rep.decreasing && rep.rows.back().error <= rep.tolerance;
  return rep;
}

GrowthReport growth_probe(const PdeProblem& problem, double t, const SpectralVector& direction,
                          const std::vector<double>& magnitudes, double slack, const Exec& exec) {
  require(magnitudes.size() >= 2, ErrorCode::kInvalidArgument, "growth_probe: need at least two magnitudes");
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    require(magnitudes[i] > 0.0 && (i == 0 || magnitudes[i] > magnitudes[i - 1]), ErrorCode::kInvalidArgument,
            "growth_probe: magnitudes must be positive and increasing");
  }
  const double dn = spectral::norm_h(direction);
  require(dn > 0.0, ErrorCode::kInvalidArgument, "growth_probe: direction must be nonzero");

  GrowthReport rep;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r : magnitudes) {
    const auto x = direction * (r / dn);
    const auto est = evaluate_u(problem, t, x, exec);
    rep.rows.push_back({spectral::norm_h(x), est.value, est.std_error});
    const double lx = std::log1p(rep.rows.back().norm);
    const double ly = std::log1p(std::abs(est.value));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(magnitudes.size());
  rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.bound = 1.0 + slack;
  rep.holds = rep.exponent <= rep.bound;
  return rep;
}

namespace {

void require_scalar(const PdeProblem& problem) {
  require(problem.dim() == 1 && problem.model.noise.d_xi == 1, ErrorCode::kStructural,
          "oracle: the deterministic reference handles d = d_xi = 1 only");
}

double sigma_at(const PdeProblem& problem, double t, double x) {
  double s = 0.0;
  problem.model.coeffs.diffusion(t, std::span<const double>(&x, 1), std::span<double>(&s, 1));
  return std::abs(s);
}

}  // namespace

OracleReport oracle_compare(const PdeProblem& problem, const oracle::FdSolution& oracle,
                            const std::vector<std::pair<double, double>>& points, double rel_tol, const Exec& exec) {
  require_scalar(problem);
  const auto& g = oracle.grid();
  OracleReport rep;
  rep.tolerance = rel_tol;
  for (const auto& [t, x] : points) {
    const double margin = 6.0 * sigma_at(problem, t, x) * std::sqrt(problem.grid.T() - t);
    if (!(x - margin >= g.x_min && x + margin <= g.x_max && t >= g.t0))
      fail(ErrorCode::kStructural, "oracle_compare: sample point (" + std::to_string(t) + ", " + std::to_string(x) +
                                       ") is too close to the oracle boundary");
    const auto est = evaluate_u(problem, t, SpectralVector({x}), exec);
    OracleRow row;
    row.t = t;
    row.x = x;
    row.u = est.value;
    row.std_error = est.std_error;
    row.v = oracle.value(t, x);
    row.rel_error = std::abs(row.u - row.v) / std::max(std::abs(row.v), 1e-3);
    rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
    rep.rows.push_back(row);
  }
  rep.holds = rep.max_rel_error <= rep.tolerance;
  return rep;
}

oracle::FdSolution solve_oracle(const PdeProblem& problem, const std::vector<std::pair<double, double>>& points,
                                double h, std::size_t n_t) {
  require_scalar(problem);
  require(!points.empty(), ErrorCode::kInvalidArgument, "solve_oracle: need sample points");
  std::vector<double> xs;
  double t0 = problem.grid.t0();
  double sigma_max = 0.0;
  for (const auto& [t, x] : points) {
    xs.push_back(x);
    t0 = std::min(t0, t);
    sigma_max = std::max(sigma_max, sigma_at(problem, t, x));
  }
  const auto grid = oracle::covering_grid(xs, sigma_max, t0, problem.grid.T(), h, n_t);
  return oracle::solve_semilinear_fd(problem.model.generator, problem.model.coeffs, problem.driver, problem.terminal,
                                     grid);
}

}  // namespace fkbsde::fk
