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

#include "fkbsde/spectral_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fkbsde/error.hpp"

namespace fkbsde::spectral {

namespace {

void check_dim(std::size_t a, std::size_t b, const char* what) {
  if (!(a == b))
    fail(ErrorCode::kStructural,
         std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace

SpectralVector::SpectralVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  require(!coeffs_.empty(), ErrorCode::kInvalidArgument, "SpectralVector: dimension must be >= 1");
  for (std::size_t k = 0; k < coeffs_.size(); ++k)
    if (!std::isfinite(coeffs_[k]))
      fail(ErrorCode::kInvalidArgument, "SpectralVector: non-finite coefficient at mode " + std::to_string(k + 1));
}

SpectralVector SpectralVector::zeros(std::size_t d) { return SpectralVector(std::vector<double>(d, 0.0)); }

SpectralVector SpectralVector::unit(std::size_t d, std::size_t k, double scale) {
  require(k >= 1 && k <= d, ErrorCode::kInvalidArgument, "SpectralVector::unit: mode out of range");
  std::vector<double> c(d, 0.0);
  c[k - 1] = scale;
  return SpectralVector(std::move(c));
}

SpectralVector SpectralVector::operator+(const SpectralVector& o) const {
  check_dim(dim(), o.dim(), "SpectralVector::operator+");
  std::vector<double> c(coeffs_);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.coeffs_[k];
  return SpectralVector(std::move(c));
}

SpectralVector SpectralVector::operator-(const SpectralVector& o) const {
  check_dim(dim(), o.dim(), "SpectralVector::operator-");
  std::vector<double> c(coeffs_);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.coeffs_[k];
  return SpectralVector(std::move(c));
}

SpectralVector SpectralVector::operator*(double s) const {
  std::vector<double> c(coeffs_);
  for (double& v : c) v *= s;
  return SpectralVector(std::move(c));
}

DiagonalGenerator::DiagonalGenerator(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  require(!lambdas_.empty(), ErrorCode::kInvalidArgument, "generator: dimension must be >= 1");
  for (std::size_t k = 0; k < lambdas_.size(); ++k) {
    if (!(std::isfinite(lambdas_[k]) && lambdas_[k] >= 0.0))
      fail(ErrorCode::kInvalidArgument,
           "generator: lambda_" + std::to_string(k + 1) + " must be finite and >= 0 (dissipativity)");
    require(k == 0 || lambdas_[k] >= lambdas_[k - 1], ErrorCode::kInvalidArgument,
            "generator: lambdas must be nondecreasing");
  }
}

DiagonalGenerator DiagonalGenerator::dirichlet_laplacian(std::size_t d) {
  std::vector<double> l(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double kk = static_cast<double>(k + 1);
    l[k] = std::numbers::pi * std::numbers::pi * kk * kk;
  }
  return DiagonalGenerator(std::move(l));
}

DiagonalGenerator DiagonalGenerator::identity_decay(std::size_t d, double lambda) {
  return DiagonalGenerator(std::vector<double>(d, lambda));
}

DiagonalGenerator DiagonalGenerator::zero(std::size_t d) { return DiagonalGenerator(std::vector<double>(d, 0.0)); }

DiagonalGenerator DiagonalGenerator::preset(const std::string& name, std::size_t d, double lambda) {
  if (name == "dirichlet_laplacian") return dirichlet_laplacian(d);
  if (name == "identity_decay") return identity_decay(d, lambda);
  if (name == "zero") return zero(d);
  fail(ErrorCode::kInvalidArgument, "unknown generator preset '" + name + "'");
}

BWeight::BWeight(std::vector<double> bweights, double c0) : b_(std::move(bweights)), c0_(c0) {
  require(!b_.empty(), ErrorCode::kInvalidArgument, "B: dimension must be >= 1");
  require(std::isfinite(c0_) && c0_ >= 0.0, ErrorCode::kInvalidArgument, "B: c0 must be >= 0");
  for (std::size_t k = 0; k < b_.size(); ++k)
    if (!(std::isfinite(b_[k]) && b_[k] > 0.0))
      fail(ErrorCode::kInvalidArgument, "B: b_" + std::to_string(k + 1) + " must be strictly positive");
}

BWeight BWeight::canonical(const DiagonalGenerator& gen) {
  std::vector<double> b(gen.dim());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = 1.0 / (1.0 + gen.lambda(k));
  return BWeight(std::move(b), 1.0);
}

double BWeight::min_weight() const { return *std::min_element(b_.begin(), b_.end()); }
double BWeight::max_weight() const { return *std::max_element(b_.begin(), b_.end()); }

NoiseModel::NoiseModel(std::size_t dim) : d_xi(dim) {
  require(d_xi >= 1, ErrorCode::kInvalidArgument, "noise: d_xi must be >= 1");
}

SpectralVector apply_semigroup(const DiagonalGenerator& gen, double dt, const SpectralVector& v) {
  SpectralVector out = v;
  apply_semigroup_inplace(gen, dt, out.view());
  return out;
}

void apply_semigroup_inplace(const DiagonalGenerator& gen, double dt, std::span<double> v) {
  require(dt >= 0.0, ErrorCode::kInvalidArgument, "apply_semigroup: dt must be >= 0");
  check_dim(gen.dim(), v.size(), "apply_semigroup");
  for (std::size_t k = 0; k < v.size(); ++k) v[k] *= std::exp(-gen.lambda(k) * dt);
}

double norm_h(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double norm_hm1_sq(const BWeight& bop, std::span<const double> v) {
  check_dim(bop.dim(), v.size(), "norm_hm1_sq");
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += bop.b(k) * v[k] * v[k];
  return s;
}

StrongBVerdict strong_b_check(const DiagonalGenerator& gen, const BWeight& bop) {
  check_dim(gen.dim(), bop.dim(), "strong_b_check");
  StrongBVerdict verdict;
  verdict.worst_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gen.dim(); ++k) {
    const double value = (gen.lambda(k) + bop.c0()) * bop.b(k);
    verdict.worst_value = std::min(verdict.worst_value, value);
    // relative slack absorbs rounding in the equality case b_k = 1/(1+lambda_k)
    if (value < 1.0 - 1e-12 && verdict.holds) {
      verdict.holds = false;
      verdict.violating_index = k + 1;
    }
  }
  return verdict;
}

}  // namespace fkbsde::spectral
