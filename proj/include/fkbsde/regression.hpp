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
#include <memory>
#include <span>
#include <vector>

#include "fkbsde/forward_spde.hpp"
#include "fkbsde/parallel.hpp"

namespace fkbsde::bsde {

/// Total-degree polynomials in the first `modes` spectral coordinates.
struct RegressionBasis {
  unsigned degree = 2;
  std::size_t modes = 4;

  static std::size_t feature_count(std::size_t modes, unsigned degree);
};

/// Least-squares projection on the basis evaluated at one time step of an
/// ensemble. Coordinates are standardized by their cross-sectional mean and
/// spread; coordinates with no spread (e.g. the deterministic initial state)
/// are dropped, so a point mass reduces to the plain mean.
class StepRegression {
 public:
  static constexpr double kMaxCondition = 1e12;
  static constexpr double kRidgeCondition = 1e8;

  StepRegression(const forward::PathEnsemble& ens, std::size_t step, const RegressionBasis& basis, const Exec& exec);
  ~StepRegression();
  StepRegression(StepRegression&&) noexcept;
  StepRegression& operator=(StepRegression&&) noexcept;

  std::size_t features() const noexcept { return exponents_.size(); }
  std::size_t active_modes() const noexcept { return active_.size(); }
  double condition() const noexcept { return condition_; }
  bool ridged() const noexcept { return ridged_; }

  /// Regression coefficients of target on the features; fitted values are
  /// written to `fitted`. A target that is constant across paths is returned
  /// unchanged (exactly) with a pure-intercept coefficient vector.
  std::vector<double> fit(std::span<const double> target, std::span<double> fitted, const Exec& exec) const;

 private:
  struct Factor;

  std::size_t paths_;
  std::size_t step_;
  std::vector<std::size_t> active_;
  std::vector<std::vector<unsigned>> exponents_;
  std::vector<double> design_;  // paths x features, row-major
  double condition_ = 1.0;
  bool ridged_ = false;
  std::unique_ptr<Factor> factor_;
};

}  // namespace fkbsde::bsde
