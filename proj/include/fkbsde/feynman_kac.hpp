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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fkbsde/bsde_core.hpp"
#include "fkbsde/forward_spde.hpp"
#include "fkbsde/functionals.hpp"
#include "fkbsde/oracle_pde.hpp"
#include "fkbsde/parallel.hpp"

namespace fkbsde::fk {

using forward::SpectralVector;

struct SolverConfig {
  std::size_t paths = 10000;
  bsde::RegressionBasis basis;
  unsigned picard_iters = 1;
  std::uint64_t seed = 1;
};

/// Full data of the semilinear problem: forward model, driver, terminal value
/// and the time grid [t0, T] whose step sets the resolution of every run.
struct PdeProblem {
  forward::ForwardModel model;
  DriverSpec driver;
  TerminalFunctional terminal;
  forward::TimeGrid grid;
  SolverConfig solver;

  void validate() const;
  std::size_t dim() const { return model.generator.dim(); }
  /// Grid used for a run started at t: the step of `grid`, aligned at T.
  forward::TimeGrid run_grid(double t) const;
};

struct UEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t steps = 0;
  std::size_t paths = 0;
  unsigned degree = 0;
  std::size_t modes = 0;
  double max_condition = 1.0;
};

/// A single forward-backward run started at (t, x); increments are keyed by
/// the global step counted back from T, so runs share noise where they overlap.
struct Run {
  forward::PathEnsemble ensemble;
  bsde::BsdeSolution solution;
};

Run run_from(const PdeProblem& problem, double t, const SpectralVector& x, const Exec& exec = {});

/// u(t, x) = Y^{t,x}_t from a fresh ensemble started at x.
UEstimate evaluate_u(const PdeProblem& problem, double t, const SpectralVector& x, const Exec& exec = {});

struct MarkovReport {
  double h = 0.0;
  std::size_t step = 0;
  double lhs = 0.0;  // u(t, x)
  double rhs = 0.0;  // E[u(t+h, X_{t+h})] - E[int_t^{t+h} f ds]
  double gap = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

/// u(t+h, X_{t+h}) is read from the same solution at the step of t+h; f is
/// evaluated at the final (Y, Z) of the solution.
MarkovReport markov_consistency_check(const PdeProblem& problem, double t, const SpectralVector& x, double h,
                                      double sigma_mult = 3.0, const Exec& exec = {});

struct BContinuityRow {
  std::size_t mode = 0;  // 1-based, 0 when the perturbation is not a single mode
  double magnitude = 0.0;
  double norm_hm1_sq = 0.0;
  double u_base = 0.0;
  double u_perturbed = 0.0;
  double ratio = 0.0;  // (u_perturbed - u_base)^2 / norm_hm1_sq
};

struct BContinuityTable {
  std::vector<BContinuityRow> rows;
  double max_ratio = 0.0;
};

/// `count` single-mode perturbations cycling through `modes` with magnitudes
/// log-spaced over [lo, hi].
std::vector<SpectralVector> mode_perturbations(std::size_t d, const std::vector<std::size_t>& modes, std::size_t count,
                                               double lo, double hi);

/// All evaluations reuse the problem seed (common random numbers).
BContinuityTable b_continuity_probe(const PdeProblem& problem, double t, const SpectralVector& x,
                                    const std::vector<SpectralVector>& perturbations, const Exec& exec = {});

struct TerminalRow {
  double t = 0.0;
  double u = 0.0;
  double std_error = 0.0;
  double target = 0.0;  // g(S(T - t) x)
  double error = 0.0;
};

struct TerminalReport {
  std::vector<TerminalRow> rows;
  double tolerance = 0.0;  // on the final error
  bool decreasing = false;
  bool holds = false;
};

/// Decreasing means each error is at most the previous one plus sigma_mult
/// combined standard errors; the final error must be within rel_tol (1 + |x|_H).
TerminalReport terminal_condition_probe(const PdeProblem& problem, const SpectralVector& x,
                                        const std::vector<double>& times, double rel_tol = 0.02,
                                        double sigma_mult = 3.0, const Exec& exec = {});

struct GrowthRow {
  double norm = 0.0;
  double u = 0.0;
  double std_error = 0.0;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double exponent = 0.0;  // least-squares slope of log(1 + |u|) against log(1 + |x|_H)
  double bound = 0.0;
  bool holds = false;
};

/// Evaluates u along r * direction / |direction|_H for the given magnitudes.
GrowthReport growth_probe(const PdeProblem& problem, double t, const SpectralVector& direction,
                          const std::vector<double>& magnitudes, double slack = 0.1, const Exec& exec = {});

struct OracleRow {
  double t = 0.0;
  double x = 0.0;
  double u = 0.0;
  double std_error = 0.0;
  double v = 0.0;
  double rel_error = 0.0;
};

struct OracleReport {
  std::vector<OracleRow> rows;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

/// d = d_xi = 1 only. Sample points closer than 6 diffusion standard
/// deviations to the oracle boundary are a structural error.
OracleReport oracle_compare(const PdeProblem& problem, const oracle::FdSolution& oracle,
                            const std::vector<std::pair<double, double>>& points, double rel_tol = 0.05,
                            const Exec& exec = {});

/// Oracle grid covering the given points for a one-dimensional problem.
oracle::FdSolution solve_oracle(const PdeProblem& problem, const std::vector<std::pair<double, double>>& points,
                                double h = 0.02, std::size_t n_t = 200);

}  // namespace fkbsde::fk
