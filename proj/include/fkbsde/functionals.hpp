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

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>

namespace fkbsde {

/// Driver f(s, x, y, z) of dY = f ds + <Z, dW>, i.e. the semilinear term of the PDE.
struct DriverSpec {
  std::string name;
  std::function<double(double, std::span<const double>, double, std::span<const double>)> f;
  double lipschitz = 0.0;      // declared L_f in (x, y, z)
  bool monotone_in_y = false;  // f(s,x,y',z) >= f(s,x,y,z) for y' >= y

  double operator()(double s, std::span<const double> x, double y, std::span<const double> z) const {
    return f(s, x, y, z);
  }
};

/// Terminal value eta = g(X_T).
struct TerminalFunctional {
  std::string name;
  std::function<double(std::span<const double>)> g;
  double lipschitz = std::numeric_limits<double>::infinity();  // in the H norm

  double operator()(std::span<const double> x) const { return g(x); }
};

/// Probe-pair audit of the declared Lipschitz constant (5% slack). Skipped for
/// functionals declared non-Lipschitz (infinite constant).
void audit_terminal(const TerminalFunctional& g, std::size_t d, std::uint64_t seed = 0xA0D17);
void audit_driver(const DriverSpec& f, std::size_t d, std::size_t d_xi, std::uint64_t seed = 0xA0D17);

}  // namespace fkbsde
