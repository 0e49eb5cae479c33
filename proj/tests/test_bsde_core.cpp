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

#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "fkbsde/bsde_core.hpp"
#include "fkbsde/calibration.hpp"
#include "fkbsde/oracle_pde.hpp"
#include "fkbsde/presets.hpp"
#include "support.hpp"

using namespace fkbsde;
using namespace fkbsde::forward;
using namespace fkbsde::bsde;
using fkbsde::testing::code;
using fkbsde::testing::thrown_code;

namespace {

PathEnsemble make_ensemble(const DiagonalGenerator& gen, const CoefficientField& coeffs, double x0, std::size_t M,
                           std::size_t N, std::uint64_t seed, double T = 1.0) {
  const TimeGrid g(0.0, T, N);
  auto incs = std::make_shared<const BrownianIncrements>(
      sample_increments(g, M, NoiseModel(coeffs.noise_dim()), RngPolicy(seed)));
  return simulate_ensemble(gen, coeffs, g, SpectralVector({x0}), incs);
}

PathEnsemble brownian(std::size_t M, std::size_t N, std::uint64_t seed, double x0 = 0.0) {
  return make_ensemble(DiagonalGenerator::zero(1), constant_sigma(1, 1, 1.0), x0, M, N, seed);
}

TerminalFunctional terminal(const char* name, double shift = 0.0) {
  presets::TerminalParams p;
  p.shift = shift;
  return presets::make_terminal(name, p, 1);
}

DriverSpec driver(const char* name, double rho = 1.0) {
  presets::DriverParams p;
  p.rho = rho;
  return presets::make_driver(name, p, 1);
}

}  // namespace

TEST_CASE("frozen dynamics return g(x) exactly") {
  const auto ens = make_ensemble(DiagonalGenerator::zero(1), zero_coefficients(1, 1), 0.7, 1000, 10, 1);
  const auto sol = solve_backward(driver("zero"), terminal("sin_first"), ens, SolverSettings{});
  CHECK(sol.y0 == std::sin(0.7));
  CHECK(sol.y0_stderr == 0.0);
}

TEST_CASE("constant basis against a brute-force backward recursion") {
  // With a degree-0 basis every conditional expectation is a sample mean.
  const std::size_t M = 4000, N = 12;
  const auto ens = brownian(M, N, 2, 0.3);
  const auto f = presets::make_driver("sine", presets::DriverParams{}, 1);
  const auto g = terminal("cos_first");
  const SolverSettings s{RegressionBasis{0, 1}, 2};
  const auto sol = solve_backward(f, g, ens, s);

  const double dt = ens.grid().dt();
  std::vector<double> y(M);
  for (std::size_t m = 0; m < M; ++m) y[m] = std::cos(ens.state(m, N)[0]);
  for (std::size_t i = N; i-- > 0;) {
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(M);
    double z = 0.0;
    for (std::size_t m = 0; m < M; ++m) z += (y[m] - ybar) * ens.increment(m, i)[0] / dt;
    z /= static_cast<double>(M);
    const std::vector<double> zz = {z};
    double yv = ybar - f(0.0, ens.state(0, i), ybar, zz) * dt;
    for (int k = 0; k < 2; ++k) yv = ybar - f(0.0, ens.state(0, i), yv, zz) * dt;
    for (std::size_t m = 0; m < M; ++m) {
      CHECK(sol.Y(m, i) == doctest::Approx(yv).epsilon(1e-10));
      CHECK(sol.Z(m, i)[0] == doctest::Approx(z).epsilon(1e-8).scale(1.0));
    }
    std::fill(y.begin(), y.end(), yv);
  }
}

TEST_CASE("Gaussian moment through the regression solver") {
  const auto ens = brownian(50000, 20, 3);
  const auto sol = solve_backward(driver("zero"), terminal("square_first"), ens, SolverSettings{});
  const double expect = oracle::closed_form("gaussian_moment", {}, 0.0, 0.0);
  CHECK(std::abs(sol.y0 - expect) <= 3.0 * sol.y0_stderr);
}

TEST_CASE("linear decay against the discrete and continuous solutions") {
  // f = rho y with constant terminal: Y_i = Y_{i+1} / (1 + rho dt) in the implicit limit.
  const double rho = 1.0, kappa = 1.0;
  const auto ens = brownian(200, 100, 4);
  presets::TerminalParams tp;
  tp.kappa = kappa;
  const auto sol = solve_backward(driver("linear_decay", rho), presets::make_terminal("constant", tp, 1), ens,
                                  SolverSettings{RegressionBasis{}, 30});
  CHECK(sol.y0 == doctest::Approx(std::pow(1.0 + rho * 0.01, -100.0)).epsilon(1e-10));
  const double cf = oracle::closed_form("linear_decay", {{"kappa", kappa}, {"rho", rho}}, 0.0, 0.0);
  CHECK(std::abs(sol.y0 - cf) <= rho * rho * 0.01);
}

TEST_CASE("Picard iterations converge") {
  const auto ens = brownian(3000, 10, 5);
  const auto f = driver("linear_decay", 2.0);
  const auto g = terminal("cos_first");
  // contraction factor rho dt = 0.2 per sweep
  double prev_gap = 1.0, first_gap = 0.0;
  const auto ref = solve_backward(f, g, ens, SolverSettings{RegressionBasis{}, 40});
  for (unsigned k : {0u, 1u, 2u, 4u}) {
    const auto s = solve_backward(f, g, ens, SolverSettings{RegressionBasis{}, k});
    const double gap = std::abs(s.y0 - ref.y0);
    CHECK(gap <= prev_gap);
    if (k == 0) first_gap = gap;
    prev_gap = gap;
  }
  CHECK(prev_gap < first_gap * std::pow(0.25, 4));
}

TEST_CASE("y0 standard error is the spread of the realized values") {
  const auto ens = brownian(2000, 10, 6);
  const auto sol = solve_backward(driver("linear_decay"), terminal("cos_first"), ens, SolverSettings{});
  double mean = 0.0, ss = 0.0;
  for (double v : sol.realized) mean += v;
  mean /= 2000.0;
  for (double v : sol.realized) ss += (v - mean) * (v - mean);
  CHECK(sol.y0_stderr == doctest::Approx(std::sqrt(ss / 1999.0 / 2000.0)).epsilon(1e-10));
  CHECK(mean == doctest::Approx(sol.y0).epsilon(1e-10));
}

TEST_CASE("solutions do not depend on the thread count") {
  const auto ens = brownian(6000, 8, 7, 0.2);
  const auto f = presets::make_driver("sine", presets::DriverParams{}, 1);
  const auto a = solve_backward(f, terminal("cos_first"), ens, SolverSettings{}, Exec{1});
  const auto b = solve_backward(f, terminal("cos_first"), ens, SolverSettings{}, Exec{8});
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.y0_stderr == b.y0_stderr);
}

TEST_CASE("monotone in the terminal value") {
  const auto ens = brownian(5000, 10, 8);
  const auto f = presets::make_driver("sine", presets::DriverParams{}, 1);
  double prev = -1e300;
  for (double shift : {-1.0, -0.2, 0.0, 0.1, 0.7}) {
    const auto s = solve_backward(f, terminal("cos_first", shift), ens, SolverSettings{});
    CHECK(s.y0 > prev);
    prev = s.y0;
  }
}

TEST_CASE("comparison theorem") {
  const auto ens = brownian(10000, 50, 9);
  const auto f = driver("linear_decay");
  const BsdeData low{f, terminal("cos_first")};
  const BsdeData high{f, terminal("cos_first", 0.5)};
  const auto rep = comparison_check(low, high, ens, SolverSettings{});
  CHECK(rep.weak_holds);
  CHECK(rep.strict_applicable);
  CHECK(rep.strict_holds);
  CHECK(rep.min_gap == doctest::Approx(0.5));
  CHECK(std::abs(rep.margin - 0.5 * std::exp(-1.0)) <= 3.0 * rep.std_error + 0.5 * 0.02);

  // equal data: weak holds, strict does not apply
  const auto same = comparison_check(low, low, ens, SolverSettings{});
  CHECK(same.weak_holds);
  CHECK(!same.strict_applicable);
  CHECK(!same.strict_holds);

  CHECK(thrown_code([&] { comparison_check(high, low, ens, SolverSettings{}); }) == code(ErrorCode::kPrecondition));
  const BsdeData bigger_f{driver("linear_decay", 2.0), terminal("cos_first", 0.5)};
  CHECK(thrown_code([&] { comparison_check(low, bigger_f, ens, SolverSettings{}); }) == code(ErrorCode::kPrecondition));
}

TEST_CASE("super- and subsolution residuals") {
  // Frozen state, f = 0, Z = 0: I_s = Y_t - Y_s.
  const auto ens = make_ensemble(DiagonalGenerator::zero(1), zero_coefficients(1, 1), 0.0, 20, 10, 1);
  const std::size_t N = 10;
  std::vector<double> down(20 * (N + 1)), up(20 * (N + 1)), z(20 * N, 0.0);
  for (std::size_t m = 0; m < 20; ++m)
    for (std::size_t i = 0; i <= N; ++i) {
      down[m * (N + 1) + i] = 1.0 - ens.grid().time(i);
      up[m * (N + 1) + i] = 1.0 + ens.grid().time(i);
    }
  const auto f = driver("zero");
  const auto sup = supersolution_residual(down, z, f, ens);
  CHECK(sup.supersolution);
  CHECK(!sup.subsolution);
  CHECK(sup.at(3, N) == doctest::Approx(1.0));
  const auto sub = supersolution_residual(up, z, f, ens);
  CHECK(sub.subsolution);
  CHECK(!sub.supersolution);

  CHECK(sup.tolerance == doctest::Approx(1e-12));
  CHECK(sub.tolerance == doctest::Approx(2e-12));
}

TEST_CASE("a priori and stability estimates") {
  const auto draw = calibration::family().front();
  const auto r = calibration::measure(draw, 301);
  CHECK(std::isfinite(r.apriori));
  CHECK(std::isfinite(r.stability));
  CHECK(r.apriori <= calibration::kAprioriC * calibration::kSlack);
  CHECK(r.stability <= calibration::kStabilityC * calibration::kSlack);

  const auto ens = brownian(1000, 10, 11);
  const BsdeData a{driver("linear_decay"), terminal("cos_first")};
  const auto same = stability_check(a, a, ens, SolverSettings{}, 1.0);
  CHECK(same.lhs == 0.0);
  CHECK(same.ratio == 0.0);
  CHECK(!same.unbounded);
  CHECK(same.holds);
  const auto sol = solve_backward(a.driver, a.terminal, ens, SolverSettings{});
  const auto ap = apriori_check(a.driver, a.terminal, ens, sol, 10.0);
  CHECK(ap.rhs > 0.0);
  CHECK(ap.ratio == doctest::Approx(ap.lhs / ap.rhs));
}
