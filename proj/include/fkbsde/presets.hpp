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
#include <optional>
#include <string>
#include <vector>

#include "fkbsde/feynman_kac.hpp"
#include "fkbsde/forward_spde.hpp"
#include "fkbsde/functionals.hpp"
#include "fkbsde/linear_bsde.hpp"

namespace fkbsde::presets {

struct DriverParams {
  double a = 0.3;  // linear: f = -(a y + b + c sum_j z_j)
  double b = 0.1;
  double c = 0.2;
  double rho = 1.0;  // linear_decay: f = rho y + shift
  double shift = 0.0;
  double alpha = 1.0;  // sine: f = alpha sin(y)
};

struct TerminalParams {
  double kappa = 1.0;  // constant value
  std::size_t k = 1;   // coordinate index, 1-based
  double shift = 0.0;  // added to every terminal
};

/// Raw, human-editable description of a problem; build_problem validates it.
struct ProblemSpec {
  std::string preset;
  std::string generator = "dirichlet_laplacian";
  std::size_t d = 8;
  double lambda = 1.0;  // identity_decay rate
  double c0 = 1.0;
  std::size_t d_xi = 8;
  std::string coefficients = "constant_sigma";
  forward::CoefficientParams coeff;
  std::string driver = "zero";
  DriverParams driver_params;
  std::string terminal = "coordinate";
  TerminalParams terminal_params;
  double t0 = 0.0;
  double T = 1.0;
  std::size_t N = 50;
  fk::SolverConfig solver;
  double t = 0.0;         // evaluation time
  std::vector<double> x;  // evaluation point, padded with zeros to d
};

/// Driver names: zero, linear, linear_decay, sine.
DriverSpec make_driver(const std::string& name, const DriverParams& p, std::size_t d_xi);
/// The driver as a linear one when it is (zero, linear, linear_decay).
std::optional<linear::LinearDriver> make_linear_driver(const std::string& name, const DriverParams& p,
                                                       std::size_t d_xi);
/// Terminal names: constant, coordinate, sin_first, cos_first, square_first, cos_weighted.
TerminalFunctional make_terminal(const std::string& name, const TerminalParams& p, std::size_t d);

/// Presets: frozen, gaussian_1d, heat_d8, ou_linear, decay_1d, semilinear_1d, nemytskii.
ProblemSpec preset_spec(const std::string& name);
const std::vector<std::string>& preset_names();

fk::PdeProblem build_problem(const ProblemSpec& spec);
forward::SpectralVector evaluation_point(const ProblemSpec& spec);

}  // namespace fkbsde::presets
