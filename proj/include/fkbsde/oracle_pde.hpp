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
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fkbsde/forward_spde.hpp"
#include "fkbsde/functionals.hpp"

namespace fkbsde::oracle {

enum class BoundaryPolicy {
  kCharacteristic,  // g along the deterministic drift flow, then the backward ODE v' = f(t, x_b, v, 0)
  kTerminal,        // frozen g(x_b)
};

struct Grid1D {
  double x_min = -8.0;
  double x_max = 8.0;
  std::size_t J = 401;  // spatial nodes, including both boundaries
  std::size_t n_t = 200;
  double t0 = 0.0;
  double T = 1.0;
  BoundaryPolicy boundary = BoundaryPolicy::kCharacteristic;

  void validate() const;
  double h() const { return (x_max - x_min) / static_cast<double>(J - 1); }
  double dt() const { return (T - t0) / static_cast<double>(n_t); }
  double x(std::size_t j) const { return x_min + h() * static_cast<double>(j); }
  double t(std::size_t n) const { return n == n_t ? T : t0 + dt() * static_cast<double>(n); }
};

/// Smallest symmetric-spacing grid that keeps `margin_sd` diffusion standard
/// deviations between every sample point and the boundary.
Grid1D covering_grid(const std::vector<double>& points, double sigma_max, double t0, double T, double h,
                     std::size_t n_t, double margin_sd = 6.0);

class FdSolution {
 public:
  FdSolution(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const noexcept { return grid_; }
  double at(std::size_t n, std::size_t j) const { return values_[n * grid_.J + j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Linear interpolation in t and x; structural error outside the grid.
  double value(double t, double x) const;
  /// Columns t, x, v; one row per node.
  void write_csv(std::ostream& out) const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Backward Crank-Nicolson for v_t + 0.5 sigma^2 v_xx + mu v_x - f(t, x, v, sigma v_x) = 0,
/// v(T) = g, with mu = -lambda_1 x + b(t, x). Picard on f, at most 5 sweeps to 1e-10.
FdSolution solve_semilinear_fd(const spectral::DiagonalGenerator& generator, const forward::CoefficientField& coeffs,
                               const DriverSpec& driver, const TerminalFunctional& terminal, const Grid1D& grid);

/// Registry: gaussian_moment, ou_mean, ou_var, linear_decay, heat_of_sine.
/// Parameters are read from `params`; T defaults to 1, sigma to 1.
double closed_form(const std::string& tag, const std::map<std::string, double>& params, double t, double x);

}  // namespace fkbsde::oracle
