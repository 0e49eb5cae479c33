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
#include <span>
#include <string>
#include <vector>

namespace fkbsde::spectral {

/// Element of the truncated state space, stored as coefficients in the
/// eigenbasis of the generator.
class SpectralVector {
 public:
  SpectralVector() = default;
  explicit SpectralVector(std::vector<double> coeffs);

  static SpectralVector zeros(std::size_t d);
  /// Unit vector e_k, k is 1-based.
  static SpectralVector unit(std::size_t d, std::size_t k, double scale = 1.0);

  std::size_t dim() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t k) const { return coeffs_[k]; }
  double& operator[](std::size_t k) { return coeffs_[k]; }

  std::span<const double> view() const noexcept { return coeffs_; }
  std::span<double> view() noexcept { return coeffs_; }
  operator std::span<const double>() const noexcept { return coeffs_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  SpectralVector operator+(const SpectralVector& other) const;
  SpectralVector operator-(const SpectralVector& other) const;
  SpectralVector operator*(double s) const;

  bool operator==(const SpectralVector&) const = default;

 private:
  std::vector<double> coeffs_;
};

/// A = diag(-lambda_k). Nonnegative, nondecreasing lambdas.
class DiagonalGenerator {
 public:
  explicit DiagonalGenerator(std::vector<double> lambdas);

  static DiagonalGenerator dirichlet_laplacian(std::size_t d);  // lambda_k = pi^2 k^2
  static DiagonalGenerator identity_decay(std::size_t d, double lambda);
  static DiagonalGenerator zero(std::size_t d);
  /// Preset lookup: "dirichlet_laplacian", "identity_decay", "zero".
  static DiagonalGenerator preset(const std::string& name, std::size_t d, double lambda = 1.0);

  std::size_t dim() const noexcept { return lambdas_.size(); }
  double lambda(std::size_t k) const { return lambdas_[k]; }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }

 private:
  std::vector<double> lambdas_;
};

/// B = diag(b_k) together with the constant c0 of the strong B-condition.
class BWeight {
 public:
  BWeight(std::vector<double> bweights, double c0);

  /// b_k = 1/(1 + lambda_k), c0 = 1; satisfies the strong B-condition with equality.
  static BWeight canonical(const DiagonalGenerator& gen);

  std::size_t dim() const noexcept { return b_.size(); }
  double b(std::size_t k) const { return b_[k]; }
  double c0() const noexcept { return c0_; }
  const std::vector<double>& weights() const noexcept { return b_; }
  double min_weight() const;
  double max_weight() const;

 private:
  std::vector<double> b_;
  double c0_;
};

struct NoiseModel {
  std::size_t d_xi = 1;

  explicit NoiseModel(std::size_t dim);
};

/// S(dt) v: coordinate k scaled by exp(-lambda_k dt).
SpectralVector apply_semigroup(const DiagonalGenerator& gen, double dt, const SpectralVector& v);
void apply_semigroup_inplace(const DiagonalGenerator& gen, double dt, std::span<double> v);

double norm_h(std::span<const double> v) noexcept;

/// Quadratic form <Bv, v> = sum_k b_k v_k^2. Never square-rooted.
double norm_hm1_sq(const BWeight& bop, std::span<const double> v);

struct StrongBVerdict {
  bool holds = true;
  std::optional<std::size_t> violating_index;  // 1-based, smallest violating mode
  double worst_value = 0.0;                    // min_k (lambda_k + c0) b_k
};

StrongBVerdict strong_b_check(const DiagonalGenerator& gen, const BWeight& bop);

}  // namespace fkbsde::spectral
