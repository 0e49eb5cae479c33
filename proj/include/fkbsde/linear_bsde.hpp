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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fkbsde/forward_spde.hpp"
#include "fkbsde/functionals.hpp"
#include "fkbsde/parallel.hpp"

namespace fkbsde::linear {

using forward::PathEnsemble;

/// Coefficients of dY = -[a Y + b_lin + <c, Z>] ds + <Z, dW>, evaluated along X.
struct LinearDriver {
  std::string name;
  std::size_t d_xi = 1;
  std::function<double(double, std::span<const double>)> a;
  std::function<double(double, std::span<const double>)> b_lin;
  std::function<void(double, std::span<const double>, std::span<double>)> c;
  double bound = 0.0;  // declared sup of |a|, |b_lin| and of each |c_j|
  double lip_x = 0.0;  // declared Lipschitz constant of the x-dependence
  /// {a, b_lin, c_1, ..., c_dxi} when the coefficients do not depend on (s, x);
  /// set by constant() and used to skip the callbacks.
  std::vector<double> constant_coeffs;

  static LinearDriver constant(double a, double b_lin, std::vector<double> c);

  /// The general driver f(s, x, y, z) = -(a y + b_lin + <c, z>).
  DriverSpec to_driver() const;
};

/// log Gamma per path and step; entries before start_step are zero.
struct GammaEnsemble {
  std::size_t paths = 0;
  std::size_t steps = 0;
  std::size_t start_step = 0;
  std::vector<double> log_gamma;  // M x (N+1)

  double log_at(std::size_t m, std::size_t i) const { return log_gamma[m * (steps + 1) + i]; }
};

/// log Gamma_{i+1} = log Gamma_i + (a_i - |c_i|^2 / 2) dt + <c_i, dW_i>, all
/// coefficients at the left point; log Gamma = 0 at start_step.
GammaEnsemble gamma_paths(const LinearDriver& driver, const PathEnsemble& ens, std::size_t start_step = 0,
                          const Exec& exec = {});

struct LinearSolution {
  double y0 = 0.0;
  double std_error = 0.0;
  std::vector<double> payload;  // Gamma_N eta + sum_i Gamma_i b_lin_i dt per path
};

/// Y_t as the ensemble mean of the payload (X_t is deterministic, Gamma_t = 1).
LinearSolution solve_linear_explicit(const LinearDriver& driver, const TerminalFunctional& terminal,
                                     const PathEnsemble& ens, const GammaEnsemble& gamma, const Exec& exec = {});

struct DominanceReport {
  double candidate_y0 = 0.0;
  double explicit_y0 = 0.0;
  double margin = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool holds = false;
};

/// candidate_y is M x (N+1) over the ensemble; its initial value must
/// dominate the explicit linear solution up to sigma_mult standard errors.
DominanceReport dominance_check(std::span<const double> candidate_y, const LinearDriver& driver,
                                const TerminalFunctional& terminal, const PathEnsemble& ens, const GammaEnsemble& gamma,
                                double sigma_mult = 3.0, const Exec& exec = {});

struct MartingaleRow {
  std::size_t step = 0;
  double mean_increment = 0.0;
  double std_error = 0.0;
};

/// Increments of Gamma_i Y_i + sum_{j<i} Gamma_j b_lin_j dt for a candidate
/// Y (M x (N+1)); for the solution they have mean zero.
std::vector<MartingaleRow> martingale_increments(std::span<const double> y, const LinearDriver& driver,
                                                 const PathEnsemble& ens, const GammaEnsemble& gamma,
                                                 const Exec& exec = {});

}  // namespace fkbsde::linear
