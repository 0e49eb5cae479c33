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

#include "fkbsde/presets.hpp"

#include <cmath>

#include "fkbsde/error.hpp"

namespace fkbsde::presets {

namespace {

double first(std::span<const double> x) { return x[0]; }

}  // namespace

std::optional<linear::LinearDriver> make_linear_driver(const std::string& name, const DriverParams& p,
                                                       std::size_t d_xi) {
  if (name == "zero") return linear::LinearDriver::constant(0.0, 0.0, std::vector<double>(d_xi, 0.0));
  if (name == "linear") return linear::LinearDriver::constant(p.a, p.b, std::vector<double>(d_xi, p.c));
  if (name == "linear_decay") {
    return linear::LinearDriver::constant(-p.rho, -p.shift, std::vector<double>(d_xi, 0.0));
  }
  return std::nullopt;
}

DriverSpec make_driver(const std::string& name, const DriverParams& p, std::size_t d_xi) {
  if (auto lin = make_linear_driver(name, p, d_xi)) {
    auto f = lin->to_driver();
    f.name = name;
    if (name == "zero") {
      f.f = [](double, std::span<const double>, double, std::span<const double>) { return 0.0; };
      f.lipschitz = 0.0;
    }
    // f = -(a y + ...) is nondecreasing in y iff a <= 0.
    f.monotone_in_y = name == "zero" || (name == "linear" ? p.a <= 0.0 : p.rho >= 0.0);
    return f;
  }
  if (name == "sine") {
    const double alpha = p.alpha;
    DriverSpec f;
    f.name = name;
    f.f = [alpha](double, std::span<const double>, double y, std::span<const double>) { return alpha * std::sin(y); };
    f.lipschitz = std::abs(alpha);
    f.monotone_in_y = alpha == 0.0;
    return f;
  }
  fail(ErrorCode::kInvalidArgument, "unknown driver '" + name + "'");
}

TerminalFunctional make_terminal(const std::string& name, const TerminalParams& p, std::size_t d) {
  require(d >= 1, ErrorCode::kStructural, "terminal: need d >= 1");
  const double shift = p.shift;
  TerminalFunctional g;
  g.name = name;
  if (name == "constant") {
    const double kappa = p.kappa;
    g.g = [kappa, shift](std::span<const double>) { return kappa + shift; };
    g.lipschitz = 0.0;
  } else if (name == "coordinate") {
    require(p.k >= 1 && p.k <= d, ErrorCode::kInvalidArgument, "terminal: coordinate index out of range");
    const std::size_t k = p.k - 1;
    g.g = [k, shift](std::span<const double> x) { return x[k] + shift; };
    g.lipschitz = 1.0;
  } else if (name == "sin_first") {
    g.g = [shift](std::span<const double> x) { return std::sin(first(x)) + shift; };
    g.lipschitz = 1.0;
  } else if (name == "cos_first") {
    g.g = [shift](std::span<const double> x) { return std::cos(first(x)) + shift; };
    g.lipschitz = 1.0;
  } else if (name == "square_first") {
    g.g = [shift](std::span<const double> x) { return first(x) * first(x) + shift; };
  } else if (name == "cos_weighted") {
    double l2 = 0.0;
    for (std::size_t k = 1; k <= d; ++k) l2 += 1.0 / static_cast<double>(k * k);
    g.g = [shift](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += x[k] / static_cast<double>(k + 1);
      return std::cos(s) + shift;
    };
    g.lipschitz = std::sqrt(l2);
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown terminal '" + name + "'");
  }
  return g;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"decay_1d",  "frozen",    "gaussian_1d",  "heat_d8",
                                                 "nemytskii", "ou_linear", "semilinear_1d"};
  return names;
}

ProblemSpec preset_spec(const std::string& name) {
  ProblemSpec s;
  s.preset = name;
  auto scalar = [&s](const std::string& generator, const std::string& coefficients) {
    s.generator = generator;
    s.d = 1;
    s.d_xi = 1;
    s.coefficients = coefficients;
    s.coeff.q = 1.0;
    s.x = {0.0};
  };
  if (name == "frozen") {
    scalar("zero", "zero");
    s.terminal = "sin_first";
    s.N = 10;
    s.solver.paths = 1000;
    s.x = {0.7};
  } else if (name == "gaussian_1d") {
    scalar("zero", "constant_sigma");
    s.terminal = "square_first";
    s.solver.paths = 100000;
  } else if (name == "heat_d8") {
    s.generator = "dirichlet_laplacian";
    s.d = 8;
    s.d_xi = 8;
    s.coefficients = "constant_sigma";
    s.terminal = "coordinate";
    s.T = 0.1;
    s.solver.paths = 20000;
    s.x = {1.0};
  } else if (name == "ou_linear") {
    scalar("identity_decay", "constant_sigma");
    s.lambda = 1.0;
    s.driver = "linear";
    s.terminal = "coordinate";
    s.solver.paths = 100000;
    s.x = {1.0};
  } else if (name == "decay_1d") {
    scalar("zero", "constant_sigma");
    s.driver = "linear_decay";
    s.terminal = "cos_first";
    s.N = 100;
    s.solver.paths = 100000;
  } else if (name == "semilinear_1d") {
    scalar("zero", "constant_sigma");
    s.driver = "sine";
    s.terminal = "cos_first";
    s.solver.paths = 100000;
  } else if (name == "nemytskii") {
    s.generator = "dirichlet_laplacian";
    s.d = 4;
    s.d_xi = 4;
    s.coefficients = "nemytskii_sine";
    s.coeff.beta = 0.5;
    s.coeff.q = 0.5;
    s.driver = "sine";
    s.driver_params.alpha = 0.5;
    s.terminal = "cos_weighted";
    s.T = 0.5;
    s.solver.paths = 20000;
    s.x = {0.5};
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown preset '" + name + "'");
  }
  return s;
}

forward::SpectralVector evaluation_point(const ProblemSpec& spec) {
  if (!(spec.x.size() <= spec.d))
    fail(ErrorCode::kStructural,
         "point: x has " + std::to_string(spec.x.size()) + " coefficients but d = " + std::to_string(spec.d));
  std::vector<double> x = spec.x;
  x.resize(spec.d, 0.0);
  return forward::SpectralVector(std::move(x));
}

fk::PdeProblem build_problem(const ProblemSpec& spec) {
  require(spec.d >= 1 && spec.d_xi >= 1, ErrorCode::kStructural, "problem: need d >= 1 and d_xi >= 1");
  auto gen = spectral::DiagonalGenerator::preset(spec.generator, spec.d, spec.lambda);
  auto canonical = spectral::BWeight::canonical(gen);
  spectral::BWeight bop(canonical.weights(), spec.c0);
  const spectral::NoiseModel noise(spec.d_xi);
  auto coeffs = forward::coefficient_preset(spec.coefficients, spec.d, spec.d_xi, spec.coeff, bop);
  fk::PdeProblem problem{
      forward::ForwardModel{std::move(gen), std::move(bop), noise, std::move(coeffs)},
      make_driver(spec.driver, spec.driver_params, spec.d_xi),
      make_terminal(spec.terminal, spec.terminal_params, spec.d),
      forward::TimeGrid(spec.t0, spec.T, spec.N),
      spec.solver,
  };
  problem.validate();
  return problem;
}

}  // namespace fkbsde::presets
