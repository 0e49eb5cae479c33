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
#include <span>
#include <vector>

#include "fkbsde/forward_spde.hpp"
#include "fkbsde/functionals.hpp"
#include "fkbsde/parallel.hpp"
#include "fkbsde/regression.hpp"

namespace fkbsde::bsde {

using forward::PathEnsemble;

struct SolverSettings {
  RegressionBasis basis;
  unsigned picard_iters = 1;
};

/// Discrete (Y, Z) over an ensemble. y is M x (N+1), z is M x N x d_xi.
struct BsdeSolution {
  std::size_t paths = 0;
  std::size_t steps = 0;
  std::size_t d_xi = 0;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<std::vector<double>> beta;  // Y-regression coefficients per step
  std::vector<double> condition;          // Gram condition number per step
  /// Pathwise realized value g(X_N) - sum_i f_i dt, whose mean is y0.
  std::vector<double> realized;
  double y0 = 0.0;
  double y0_stderr = 0.0;

  double Y(std::size_t m, std::size_t i) const { return y[m * (steps + 1) + i]; }
  std::span<const double> Z(std::size_t m, std::size_t i) const { return {z.data() + (m * steps + i) * d_xi, d_xi}; }
  double max_condition() const;
};

/// Backward regression scheme: Y_N = g(X_N) and, for i = N-1..0,
///   Ybar_i = E_i[Y_{i+1}],  Z_i = E_i[(Y_{i+1} - Ybar_i) dW_i] / dt,
///   Y_i = Ybar_i - f(t_i, X_i, Ybar_i, Z_i) dt,
/// followed by picard_iters re-evaluations of f at the latest Y_i.
/// Conditional expectations are least-squares fits on the basis.
BsdeSolution solve_backward(const DriverSpec& driver, const TerminalFunctional& terminal, const PathEnsemble& ens,
                            const SolverSettings& settings, const Exec& exec = {});

struct BsdeData {
  DriverSpec driver;
  TerminalFunctional terminal;
};

struct ComparisonReport {
  double y1 = 0.0;
  double y2 = 0.0;
  double margin = 0.0;  // y2 - y1
  double std_error = 0.0;
  double tolerance = 0.0;
  bool weak_holds = false;
  double min_gap = 0.0;  // min over paths of (eta2 - eta1) + sum (f1 - f2) dt along (Y2, Z2)
  bool strict_applicable = false;
  bool strict_holds = false;
};

/// Solves both problems on the same ensemble. Throws kPrecondition when
/// eta2 >= eta1 or f2 <= f1 along (Y2, Z2) fails on any path.
ComparisonReport comparison_check(const BsdeData& first, const BsdeData& second, const PathEnsemble& ens,
                                  const SolverSettings& settings, double sigma_mult = 3.0, const Exec& exec = {});

struct MonotoneResidual {
  std::size_t paths = 0;
  std::size_t steps = 0;
  std::vector<double> i_process;  // M x (N+1), I[m][0] = 0
  double tolerance = 0.0;
  double min_increment = 0.0;
  double max_increment = 0.0;
  bool supersolution = false;  // all increments >= -tolerance
  bool subsolution = false;    // all increments <= tolerance

  double at(std::size_t m, std::size_t i) const { return i_process[m * (steps + 1) + i]; }
};

/// I_k = Y_0 + sum_{i<k} (f(t_i, X_i, Y_i, Z_i) dt + <Z_i, dW_i>) - Y_k on every path.
/// Tolerance: 10 dt L_f scale + 1e-12 scale, scale = max(1, max |Y|).
MonotoneResidual supersolution_residual(std::span<const double> y, std::span<const double> z, const DriverSpec& driver,
                                        const PathEnsemble& ens, const Exec& exec = {});

struct EstimateReport {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  double ratio = 0.0;
  bool unbounded = false;
  double bound = 0.0;  // c_cal * slack
  bool holds = false;
};

/// E[sup |Y|^2 + int |Z|^2] against E[|eta|^2 + (int |f(s, X_s, 0, 0)| ds)^2].
EstimateReport apriori_check(const DriverSpec& driver, const TerminalFunctional& terminal, const PathEnsemble& ens,
                             const BsdeSolution& sol, double c_cal, double slack = 1.0, const Exec& exec = {});

/// E[sup |Y1 - Y2|^2 + int |Z1 - Z2|^2] against
/// E[|eta1 - eta2|^2 + (int |f1 - f2|(Y1, Z1) ds)^2].
EstimateReport stability_check(const BsdeData& first, const BsdeData& second, const PathEnsemble& ens,
                               const BsdeSolution& sol1, const BsdeSolution& sol2, double c_cal, double slack = 1.0,
                               const Exec& exec = {});

EstimateReport stability_check(const BsdeData& first, const BsdeData& second, const PathEnsemble& ens,
                               const SolverSettings& settings, double c_cal, double slack = 1.0, const Exec& exec = {});

}  // namespace fkbsde::bsde
