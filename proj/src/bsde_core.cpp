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

#include "fkbsde/bsde_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fkbsde/error.hpp"

namespace fkbsde::bsde {

double BsdeSolution::max_condition() const {
  double c = 1.0;
  for (double v : condition) c = std::max(c, v);
  return c;
}

BsdeSolution solve_backward(const DriverSpec& driver, const TerminalFunctional& terminal, const PathEnsemble& ens,
                            const SolverSettings& settings, const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  const std::size_t dxi = ens.noise_dim();
  const double dt = ens.grid().dt();

  BsdeSolution sol;
  sol.paths = M;
  sol.steps = N;
  sol.d_xi = dxi;
  sol.y.assign(M * (N + 1), 0.0);
  sol.z.assign(M * N * dxi, 0.0);
  sol.beta.resize(N);
  sol.condition.assign(N, 1.0);
  sol.realized.assign(M, 0.0);

  std::vector<double> drift_sum(M, 0.0);
  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t m = m0; m < m1; ++m) {
      const double v = terminal(ens.state(m, N));
      if (!std::isfinite(v))
        fail(ErrorCode::kOverflow, "solve_backward: non-finite terminal value on path " + std::to_string(m));
      sol.y[m * (N + 1) + N] = v;
    }
  });

  // target holds Y at step i + 1 for all paths; sol.y is path-major.
  std::vector<double> target(M), ybar(M), ztarget(M), zfit(M), zcol(M * dxi, 0.0);
  for (std::size_t m = 0; m < M; ++m) target[m] = sol.y[m * (N + 1) + N];
  for (std::size_t i = N; i-- > 0;) {
    const StepRegression reg(ens, i, settings.basis, exec);
    sol.condition[i] = reg.condition();
    sol.beta[i] = reg.fit(target, ybar, exec);

    if (!ens.noise_free()) {
      for (std::size_t j = 0; j < dxi; ++j) {
        for (std::size_t m = 0; m < M; ++m) ztarget[m] = (target[m] - ybar[m]) * ens.increment(m, i)[j] / dt;
        reg.fit(ztarget, zfit, exec);
        for (std::size_t m = 0; m < M; ++m) {
          zcol[m * dxi + j] = zfit[m];
          sol.z[(m * N + i) * dxi + j] = zfit[m];
        }
      }
    }

    const double t = ens.grid().time(i);
    parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
      for (std::size_t m = m0; m < m1; ++m) {
        const auto x = ens.state(m, i);
        const std::span<const double> z(zcol.data() + m * dxi, dxi);
        double fval = driver(t, x, ybar[m], z);
        double yv = ybar[m] - fval * dt;
        for (unsigned k = 0; k < settings.picard_iters; ++k) {
          fval = driver(t, x, yv, z);
          yv = ybar[m] - fval * dt;
        }
        if (!std::isfinite(yv))
          fail(ErrorCode::kOverflow,
               "solve_backward: non-finite Y on path " + std::to_string(m) + " at step " + std::to_string(i));
        sol.y[m * (N + 1) + i] = yv;
        target[m] = yv;  // Y_{i+1} is no longer needed once Z_i is fitted
        drift_sum[m] += fval * dt;
      }
    });
  }

  for (std::size_t m = 0; m < M; ++m) sol.realized[m] = sol.y[m * (N + 1) + N] - drift_sum[m];
  sol.y0 = mean_and_stderr(M, exec, [&](std::size_t m) { return sol.y[m * (N + 1)]; }).mean;
  sol.y0_stderr = mean_and_stderr(M, exec, [&](std::size_t m) { return sol.realized[m]; }).std_error;
  return sol;
}

namespace {

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

ComparisonReport comparison_check(const BsdeData& first, const BsdeData& second, const PathEnsemble& ens,
                                  const SolverSettings& settings, double sigma_mult, const Exec& exec) {
  const auto s1 = solve_backward(first.driver, first.terminal, ens, settings, exec);
  const auto s2 = solve_backward(second.driver, second.terminal, ens, settings, exec);
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  const double dt = ens.grid().dt();

  std::vector<double> gap(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    const double e1 = s1.Y(m, N);
    const double e2 = s2.Y(m, N);
    const double tol = 1e-12 * (1.0 + std::abs(e1) + std::abs(e2));
    if (!(e2 - e1 >= -tol))
      fail(ErrorCode::kPrecondition, "comparison_check: eta2 >= eta1 fails on path " + std::to_string(m));
    gap[m] = e2 - e1;
  }
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t i = 0; i < N; ++i) {
      const double t = ens.grid().time(i);
      const auto x = ens.state(m, i);
      const double f1 = first.driver(t, x, s2.Y(m, i), s2.Z(m, i));
      const double f2 = second.driver(t, x, s2.Y(m, i), s2.Z(m, i));
      if (!(f2 - f1 <= 1e-12 * (1.0 + std::abs(f1) + std::abs(f2))))
        fail(ErrorCode::kPrecondition, "comparison_check: f2 <= f1 along (Y2, Z2) fails on path " + std::to_string(m) +
                                           " at step " + std::to_string(i));
      gap[m] += (f1 - f2) * dt;
    }
  }

  ComparisonReport rep;
  rep.y1 = s1.y0;
  rep.y2 = s2.y0;
  rep.margin = s2.y0 - s1.y0;
  rep.std_error = combined(s1.y0_stderr, s2.y0_stderr);
  rep.tolerance = sigma_mult * rep.std_error;
  rep.weak_holds = rep.margin >= -rep.tolerance;
  rep.min_gap = *std::min_element(gap.begin(), gap.end());
  rep.strict_applicable = rep.min_gap > 0.0;
  rep.strict_holds = rep.strict_applicable && rep.margin > rep.tolerance;
  return rep;
}

MonotoneResidual supersolution_residual(std::span<const double> y, std::span<const double> z, const DriverSpec& driver,
                                        const PathEnsemble& ens, const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  const std::size_t dxi = ens.noise_dim();
  require(y.size() == M * (N + 1) && z.size() == M * N * dxi, ErrorCode::kStructural,
          "supersolution_residual: candidate is not defined on this ensemble");
  const double dt = ens.grid().dt();

  MonotoneResidual res;
  res.paths = M;
  res.steps = N;
  res.i_process.assign(M * (N + 1), 0.0);
  double scale = 1.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  res.tolerance = 10.0 * dt * driver.lipschitz * scale + 1e-12 * scale;

  std::vector<double> lo(M, std::numeric_limits<double>::infinity());
  std::vector<double> hi(M, -std::numeric_limits<double>::infinity());
  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t m = m0; m < m1; ++m) {
      const double* ym = y.data() + m * (N + 1);
      double* im = res.i_process.data() + m * (N + 1);
      double forward_sum = ym[0];
      for (std::size_t i = 0; i < N; ++i) {
        const std::span<const double> zi(z.data() + (m * N + i) * dxi, dxi);
        const auto dw = ens.increment(m, i);
        double zdw = 0.0;
        for (std::size_t j = 0; j < dxi; ++j) zdw += zi[j] * dw[j];
        forward_sum += driver(ens.grid().time(i), ens.state(m, i), ym[i], zi) * dt + zdw;
        im[i + 1] = forward_sum - ym[i + 1];
        const double inc = im[i + 1] - im[i];
        lo[m] = std::min(lo[m], inc);
        hi[m] = std::max(hi[m], inc);
      }
    }
  });
  res.min_increment = N > 0 ? *std::min_element(lo.begin(), lo.end()) : 0.0;
  res.max_increment = N > 0 ? *std::max_element(hi.begin(), hi.end()) : 0.0;
  res.supersolution = res.min_increment >= -res.tolerance;
  res.subsolution = res.max_increment <= res.tolerance;
  return res;
}

namespace {

EstimateReport finish_estimate(const MeanStderr& lhs, const MeanStderr& rhs, double c_cal, double slack) {
  EstimateReport rep;
  rep.lhs = lhs.mean;
  rep.lhs_se = lhs.std_error;
  rep.rhs = rhs.mean;
  rep.rhs_se = rhs.std_error;
  rep.bound = c_cal * slack;
  constexpr double kZero = 1e-24;
  if (rep.rhs <= kZero) {
    rep.unbounded = rep.lhs > kZero;
    rep.ratio = rep.unbounded ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    rep.ratio = rep.lhs / rep.rhs;
  }
  rep.holds = !rep.unbounded && rep.ratio <= rep.bound;
  return rep;
}

}  // namespace

EstimateReport apriori_check(const DriverSpec& driver, const TerminalFunctional& terminal, const PathEnsemble& ens,
                             const BsdeSolution& sol, double c_cal, double slack, const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  const std::size_t dxi = ens.noise_dim();
  require(sol.paths == M && sol.steps == N, ErrorCode::kStructural, "apriori_check: solution/ensemble mismatch");
  const double dt = ens.grid().dt();
  const std::vector<double> zero_z(dxi, 0.0);

  const auto lhs = mean_and_stderr(M, exec, [&](std::size_t m) {
    double sup = 0.0, zint = 0.0;
    for (std::size_t i = 0; i <= N; ++i) sup = std::max(sup, sol.Y(m, i) * sol.Y(m, i));
    for (std::size_t i = 0; i < N; ++i)
      for (double v : sol.Z(m, i)) zint += v * v * dt;
    return sup + zint;
  });
  const auto rhs = mean_and_stderr(M, exec, [&](std::size_t m) {
    const double eta = terminal(ens.state(m, N));
    double fint = 0.0;
    for (std::size_t i = 0; i < N; ++i) fint += std::abs(driver(ens.grid().time(i), ens.state(m, i), 0.0, zero_z)) * dt;
    return eta * eta + fint * fint;
  });
  return finish_estimate(lhs, rhs, c_cal, slack);
}

EstimateReport stability_check(const BsdeData& first, const BsdeData& second, const PathEnsemble& ens,
                               const BsdeSolution& sol1, const BsdeSolution& sol2, double c_cal, double slack,
                               const Exec& exec) {
  const std::size_t M = ens.paths();
  const std::size_t N = ens.steps();
  require(sol1.paths == M && sol2.paths == M && sol1.steps == N && sol2.steps == N, ErrorCode::kStructural,
          "stability_check: solutions must live on the common ensemble");
  const double dt = ens.grid().dt();

  const auto lhs = mean_and_stderr(M, exec, [&](std::size_t m) {
    double sup = 0.0, zint = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
      const double dy = sol1.Y(m, i) - sol2.Y(m, i);
      sup = std::max(sup, dy * dy);
    }
    for (std::size_t i = 0; i < N; ++i) {
      const auto z1 = sol1.Z(m, i);
      const auto z2 = sol2.Z(m, i);
      for (std::size_t j = 0; j < z1.size(); ++j) zint += (z1[j] - z2[j]) * (z1[j] - z2[j]) * dt;
    }
    return sup + zint;
  });
  const auto rhs = mean_and_stderr(M, exec, [&](std::size_t m) {
    const double deta = sol1.Y(m, N) - sol2.Y(m, N);
    double fint = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double t = ens.grid().time(i);
      const auto x = ens.state(m, i);
      fint +=
          std::abs(first.driver(t, x, sol1.Y(m, i), sol1.Z(m, i)) - second.driver(t, x, sol1.Y(m, i), sol1.Z(m, i))) *
          dt;
    }
    return deta * deta + fint * fint;
  });
  return finish_estimate(lhs, rhs, c_cal, slack);
}

EstimateReport stability_check(const BsdeData& first, const BsdeData& second, const PathEnsemble& ens,
                               const SolverSettings& settings, double c_cal, double slack, const Exec& exec) {
  const auto s1 = solve_backward(first.driver, first.terminal, ens, settings, exec);
  const auto s2 = solve_backward(second.driver, second.terminal, ens, settings, exec);
  return stability_check(first, second, ens, s1, s2, c_cal, slack, exec);
}

}  // namespace fkbsde::bsde
