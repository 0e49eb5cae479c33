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
#include "fkbsde/forward_spde.hpp"
#include "fkbsde/regression.hpp"

using namespace fkbsde;
using namespace fkbsde::forward;
using fkbsde::bsde::RegressionBasis;
using fkbsde::bsde::StepRegression;

namespace {

PathEnsemble ou_ensemble(std::size_t d, std::size_t M, std::size_t N, std::uint64_t seed) {
  const TimeGrid g(0.0, 1.0, N);
  auto incs = std::make_shared<const BrownianIncrements>(sample_increments(g, M, NoiseModel(d), RngPolicy(seed)));
  return simulate_ensemble(DiagonalGenerator::identity_decay(d, 1.0), constant_sigma(d, d, 1.0), g,
                           SpectralVector::zeros(d), incs);
}

}  // namespace

TEST_CASE("feature count is the number of monomials of bounded degree") {
  CHECK(RegressionBasis::feature_count(1, 0) == 1);
  CHECK(RegressionBasis::feature_count(1, 3) == 4);
  CHECK(RegressionBasis::feature_count(4, 2) == 15);
  CHECK(RegressionBasis::feature_count(3, 3) == 20);
}

TEST_CASE("constant basis reproduces the sample mean") {
  const auto ens = ou_ensemble(1, 999, 4, 1);
  const StepRegression reg(ens, 2, RegressionBasis{0, 1}, Exec{});
  CHECK(reg.features() == 1);
  std::vector<double> target(999), fitted(999);
  double mean = 0.0;
  for (std::size_t m = 0; m < 999; ++m) {
    target[m] = std::exp(ens.state(m, 2)[0]);
    mean += target[m];
  }
  mean /= 999.0;
  const auto beta = reg.fit(target, fitted, Exec{});
  for (double f : fitted) CHECK(f == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("degree one matches simple linear regression") {
  const auto ens = ou_ensemble(1, 2000, 4, 2);
  const StepRegression reg(ens, 3, RegressionBasis{1, 1}, Exec{});
  std::vector<double> x(2000), y(2000), fitted(2000);
  double mx = 0, my = 0;
  for (std::size_t m = 0; m < 2000; ++m) {
    x[m] = ens.state(m, 3)[0];
    y[m] = std::sin(2.0 * x[m]) + 0.1 * static_cast<double>(m % 7);
    mx += x[m];
    my += y[m];
  }
  mx /= 2000;
  my /= 2000;
  double sxy = 0, sxx = 0;
  for (std::size_t m = 0; m < 2000; ++m) {
    sxy += (x[m] - mx) * (y[m] - my);
    sxx += (x[m] - mx) * (x[m] - mx);
  }
  const double slope = sxy / sxx;
  reg.fit(y, fitted, Exec{});
  for (std::size_t m = 0; m < 2000; ++m) CHECK(fitted[m] == doctest::Approx(my + slope * (x[m] - mx)).epsilon(1e-10));
}

TEST_CASE("targets in the span are reproduced") {
  const auto ens = ou_ensemble(2, 3000, 4, 3);
  const StepRegression reg(ens, 4, RegressionBasis{2, 2}, Exec{});
  CHECK(reg.features() == 6);
  CHECK(reg.active_modes() == 2);
  std::vector<double> target(3000), fitted(3000);
  for (std::size_t m = 0; m < 3000; ++m) {
    const auto s = ens.state(m, 4);
    target[m] = 1.0 - 2.0 * s[0] + 0.5 * s[0] * s[1] + 3.0 * s[1] * s[1];
  }
  reg.fit(target, fitted, Exec{});
  for (std::size_t m = 0; m < 3000; ++m) CHECK(fitted[m] == doctest::Approx(target[m]).epsilon(1e-9));
}

TEST_CASE("a point mass reduces to the plain mean") {
  const auto ens = ou_ensemble(3, 500, 4, 4);
  const StepRegression reg(ens, 0, RegressionBasis{2, 3}, Exec{});
  CHECK(reg.active_modes() == 0);
  CHECK(reg.features() == 1);
  std::vector<double> target(500), fitted(500);
  double mean = 0.0;
  for (std::size_t m = 0; m < 500; ++m) mean += (target[m] = std::cos(static_cast<double>(m)));
  mean /= 500.0;
  reg.fit(target, fitted, Exec{});
  CHECK(fitted[0] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("constant targets come back unchanged") {
  const auto ens = ou_ensemble(1, 300, 2, 5);
  const StepRegression reg(ens, 1, RegressionBasis{2, 1}, Exec{});
  std::vector<double> target(300, 0.1), fitted(300);
  reg.fit(target, fitted, Exec{});
  for (double f : fitted) CHECK(f == 0.1);
}

TEST_CASE("fits do not depend on the thread count") {
  const auto ens = ou_ensemble(4, 5000, 3, 6);
  std::vector<double> target(5000);
  for (std::size_t m = 0; m < 5000; ++m) target[m] = std::tanh(ens.state(m, 3)[0] + ens.state(m, 3)[3]);
  std::vector<double> a(5000), b(5000);
  const StepRegression r1(ens, 3, RegressionBasis{2, 4}, Exec{1});
  const StepRegression r8(ens, 3, RegressionBasis{2, 4}, Exec{8});
  CHECK(r1.fit(target, a, Exec{1}) == r8.fit(target, b, Exec{8}));
  CHECK(a == b);
  CHECK(r1.condition() == r8.condition());
}
