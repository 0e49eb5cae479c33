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

#include "fkbsde/functionals.hpp"

#include <cmath>
#include <vector>

#include "fkbsde/error.hpp"
#include "fkbsde/rng.hpp"
#include "fkbsde/spectral_space.hpp"

namespace fkbsde {

namespace {

constexpr int kProbePairs = 100;
constexpr double kSlack = 1.05;

void probe_pair(const RngPolicy& rng, int n, std::vector<double>& x, std::vector<double>& xp) {
  const double scale = std::pow(10.0, static_cast<double>(n % 3) - 1.0);
  rng.normals(static_cast<std::uint64_t>(n), 0, x);
  rng.normals(static_cast<std::uint64_t>(n), 1, xp);
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] *= scale;
    xp[k] = x[k] + xp[k] * scale * (n % 2 == 0 ? 1e-2 : 1.0);
  }
}

}  // namespace

void audit_terminal(const TerminalFunctional& g, std::size_t d, std::uint64_t seed) {
  if (!std::isfinite(g.lipschitz)) return;
  const RngPolicy rng(seed, 0x7e41);
  std::vector<double> x(d), xp(d), diff(d);
  for (int n = 0; n < kProbePairs; ++n) {
    probe_pair(rng, n, x, xp);
    for (std::size_t k = 0; k < d; ++k) diff[k] = x[k] - xp[k];
    const double lhs = std::abs(g(x) - g(xp));
    if (!(lhs <= kSlack * g.lipschitz * spectral::norm_h(diff) + 1e-12))
      fail(ErrorCode::kInvalidArgument,
           "terminal '" + g.name + "' exceeds its declared Lipschitz constant on probe pair " + std::to_string(n));
  }
}

void audit_driver(const DriverSpec& f, std::size_t d, std::size_t d_xi, std::uint64_t seed) {
  if (!std::isfinite(f.lipschitz)) return;
  const RngPolicy rng(seed, 0xd41e);
  std::vector<double> x(d), xp(d), z(d_xi), zp(d_xi), diff(d), dz(d_xi), yy(2), yp(2);
  for (int n = 0; n < kProbePairs; ++n) {
    probe_pair(rng, n, x, xp);
    rng.normals(static_cast<std::uint64_t>(n), 2, z);
    rng.normals(static_cast<std::uint64_t>(n), 3, zp);
    rng.normals(static_cast<std::uint64_t>(n), 4, yy);
    const double s = rng.uniform(static_cast<std::uint64_t>(n), 5, 0);
    for (std::size_t k = 0; k < d; ++k) diff[k] = x[k] - xp[k];
    for (std::size_t j = 0; j < d_xi; ++j) {
      zp[j] = z[j] + 0.5 * zp[j];
      dz[j] = z[j] - zp[j];
    }
    const double y = 2.0 * yy[0];
    const double y_p = y + 0.5 * yy[1];
    const double lhs = std::abs(f(s, x, y, z) - f(s, xp, y_p, zp));
    const double dist = spectral::norm_h(diff) + std::abs(y - y_p) + spectral::norm_h(dz);
    if (!(lhs <= kSlack * f.lipschitz * dist + 1e-12))
      fail(ErrorCode::kInvalidArgument,
           "driver '" + f.name + "' exceeds its declared Lipschitz constant on probe tuple " + std::to_string(n));
  }
}

}  // namespace fkbsde
