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

#include "fkbsde/linear_bsde.hpp"

#include <algorithm>
#include <cmath>

#include "fkbsde/error.hpp"

namespace fkbsde::linear {

LinearDriver LinearDriver::constant(double a, double b_lin, std::vector<double> c) {
  require(!c.empty(), ErrorCode::kInvalidArgument, "linear driver: c must have d_xi >= 1 entries");
  LinearDriver drv;
  drv.name = "linear_constant";
  drv.d_xi = c.size();
  drv.a = [a](double, std::span<const double>) { return a; };
  drv.b_lin = [b_lin](double, std::span<const double>) { return b_lin; };
  drv.c = [c](double, std::span<const double>, std::span<double> out) { std::copy(c.begin(), c.end(), out.begin()); };
  double bound = std::max(std::abs(a), std::abs(b_lin));
  for (double v : c) bound = std::max(bound, std::abs(v));
  drv.bound = bound;
  drv.constant_coeffs = {a, b_lin};
  drv.constant_coeffs.insert(drv.constant_coeffs.end(), c.begin(), c.end());
  return drv;
}

DriverSpec LinearDriver::to_driver() const {
  DriverSpec spec;
  spec.name = name;
  if (constant_coeffs.size() == d_xi + 2) {
    spec.f = [k = constant_coeffs](double, std::span<const double>, double y, std::span<const double> z) {
      double cz = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) cz += k[j + 2] * z[j];
      return -(k[0] * y + k[1] + cz);
    };
  } else {
    const LinearDriver self = *this;
    spec.f = [self](double s, std::span<const double> x, double y, std::span<const double> z) {
      double cz = 0.0;
      double buf[16];
      std::vector<double> heap;
      std::span<double> c;
      if (self.d_xi <= 16) {
        c = std::span<double>(buf, self.d_xi);
      } else {
        heap.resize(self.d_xi);
        c = heap;
      }
      self.c(s, x, c);
      for (std::size_t j = 0; j < self.d_xi; ++j) cz += c[j] * z[j];
      return -(self.a(s, x) * y + self.b_lin(s, x) + cz);
    };
  }
  // |a| |y - y'| + |c| |z - z'| + lip_x |x - x'|
  spec.lipschitz = std::max(bound * std::sqrt(static_cast<double>(d_xi)), lip_x);
  spec.monotone_in_y = false;
  return spec;
}

GammaEnsemble gamma_paths(const LinearDriver& driver, const PathEnsemble& ens, std::size_t start_step,
                          const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  require(driver.d_xi == ens.noise_dim(), ErrorCode::kStructural, "gamma_paths: noise dimension mismatch");
  require(start_step <= N, ErrorCode::kStructural, "gamma_paths: start step beyond the grid");
  const double dt = ens.grid().dt();
  GammaEnsemble gam;
  gam.paths = M;
  gam.steps = N;
  gam.start_step = start_step;
  gam.log_gamma.assign(M * (N + 1), 0.0);
  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    std::vector<double> c(driver.d_xi);
    for (std::size_t m = m0; m < m1; ++m) {
      double* lg = gam.log_gamma.data() + m * (N + 1);
      for (std::size_t i = start_step; i < N; ++i) {
        const double t = ens.grid().time(i);
        const auto x = ens.state(m, i);
        const auto dw = ens.increment(m, i);
        driver.c(t, x, c);
        double c2 = 0.0, cdw = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
          c2 += c[j] * c[j];
          cdw += c[j] * dw[j];
        }
        lg[i + 1] = lg[i] + (driver.a(t, x) - 0.5 * c2) * dt + cdw;
        if (!(std::isfinite(lg[i + 1]) && std::abs(lg[i + 1]) < 700.0))
          fail(ErrorCode::kOverflow,
               "gamma_paths: Gamma overflows on path " + std::to_string(m) + " at step " + std::to_string(i + 1));
      }
    }
  });
  return gam;
}

LinearSolution solve_linear_explicit(const LinearDriver& driver, const TerminalFunctional& terminal,
                                     const PathEnsemble& ens, const GammaEnsemble& gamma, const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  require(gamma.paths == M && gamma.steps == N && gamma.start_step == 0, ErrorCode::kStructural,
          "solve_linear_explicit: Gamma must be built from this ensemble at its initial time");
  const double dt = ens.grid().dt();
  LinearSolution sol;
  sol.payload.resize(M);
  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t m = m0; m < m1; ++m) {
      double acc = std::exp(gamma.log_at(m, N)) * terminal(ens.state(m, N));
      for (std::size_t i = 0; i < N; ++i)
        acc += std::exp(gamma.log_at(m, i)) * driver.b_lin(ens.grid().time(i), ens.state(m, i)) * dt;
      if (!std::isfinite(acc))
        fail(ErrorCode::kOverflow, "solve_linear_explicit: non-finite payload on path " + std::to_string(m));
      sol.payload[m] = acc;
    }
  });
  const auto stat = mean_and_stderr(M, exec, [&](std::size_t m) { return sol.payload[m]; });
  sol.y0 = stat.mean;
  sol.std_error = stat.std_error;
  return sol;
}

DominanceReport dominance_check(std::span<const double> candidate_y, const LinearDriver& driver,
                                const TerminalFunctional& terminal, const PathEnsemble& ens, const GammaEnsemble& gamma,
                                double sigma_mult, const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  require(candidate_y.size() == M * (N + 1), ErrorCode::kStructural,
          "dominance_check: candidate is not defined on this ensemble");
  const auto exact = solve_linear_explicit(driver, terminal, ens, gamma, exec);
  DominanceReport rep;
  rep.candidate_y0 =
      blocked_sum(M, exec, [&](std::size_t m) { return candidate_y[m * (N + 1)]; }) / static_cast<double>(M);
  rep.explicit_y0 = exact.y0;
  rep.margin = rep.candidate_y0 - rep.explicit_y0;
  rep.std_error = exact.std_error;
  rep.tolerance = sigma_mult * exact.std_error;
  rep.holds = rep.margin >= -rep.tolerance;
  return rep;
}

std::vector<MartingaleRow> martingale_increments(std::span<const double> y, const LinearDriver& driver,
                                                 const PathEnsemble& ens, const GammaEnsemble& gamma,
                                                 const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  require(y.size() == M * (N + 1) && gamma.paths == M && gamma.steps == N, ErrorCode::kStructural,
          "martingale_increments: shape mismatch");
  const double dt = ens.grid().dt();
  std::vector<MartingaleRow> rows;
  for (std::size_t i = gamma.start_step; i < N; ++i) {
    const double t = ens.grid().time(i);
    const auto stat = mean_and_stderr(M, exec, [&](std::size_t m) {
      const double g0 = std::exp(gamma.log_at(m, i));
      const double g1 = std::exp(gamma.log_at(m, i + 1));
      return g1 * y[m * (N + 1) + i + 1] - g0 * y[m * (N + 1) + i] + g0 * driver.b_lin(t, ens.state(m, i)) * dt;
    });
    rows.push_back({i, stat.mean, stat.std_error});
  }
  return rows;
}

}  // namespace fkbsde::linear
