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
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fkbsde/parallel.hpp"
#include "fkbsde/rng.hpp"
#include "fkbsde/spectral_space.hpp"

namespace fkbsde::forward {

using spectral::BWeight;
using spectral::DiagonalGenerator;
using spectral::NoiseModel;
using spectral::SpectralVector;

/// Uniform grid t0 = s_0 < ... < s_N = T.
class TimeGrid {
 public:
  TimeGrid(double t0, double T, std::size_t N);

  double t0() const noexcept { return t0_; }
  double T() const noexcept { return T_; }
  std::size_t steps() const noexcept { return N_; }
  double dt() const noexcept { return (T_ - t0_) / static_cast<double>(N_); }
  double time(std::size_t i) const noexcept;

  /// Grid index of t; structural error when t is not a grid point.
  std::size_t index_of(double t) const;
  /// The tail grid [time(first), T] with the same step.
  TimeGrid tail(std::size_t first) const;

 private:
  double t0_;
  double T_;
  std::size_t N_;
};

/// (t, x, out). For diffusion, out is the row-major d x d_xi matrix sigma(t, x).
using FieldFn = std::function<void(double, std::span<const double>, std::span<double>)>;

/// Drift b and noise coefficient sigma together with their declared constants.
class CoefficientField {
 public:
  CoefficientField(std::string name, std::size_t d, std::size_t d_xi, FieldFn drift, FieldFn diffusion, double lip_b,
                   double lip_sigma, double growth);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return d_; }
  std::size_t noise_dim() const noexcept { return d_xi_; }
  double lip_b() const noexcept { return lip_b_; }
  double lip_sigma() const noexcept { return lip_sigma_; }
  double growth() const noexcept { return growth_; }

  void drift(double t, std::span<const double> x, std::span<double> out) const { drift_(t, x, out); }
  void diffusion(double t, std::span<const double> x, std::span<double> out) const { diffusion_(t, x, out); }

 private:
  std::string name_;
  std::size_t d_;
  std::size_t d_xi_;
  FieldFn drift_;
  FieldFn diffusion_;
  double lip_b_;
  double lip_sigma_;
  double growth_;
};

struct CoefficientParams {
  double q = 1.0;      // noise amplitude
  double beta = 0.5;   // Nemytskii sine strength
  double beta0 = 0.0;  // affine drift offset
  double beta1 = 0.0;  // affine drift slope
  double gamma = 0.0;  // affine multiplicative noise, sigma_kk = q + gamma b_k x_k
};

CoefficientField zero_coefficients(std::size_t d, std::size_t d_xi);
/// sigma = q I on the first min(d, d_xi) modes, b = 0.
CoefficientField constant_sigma(std::size_t d, std::size_t d_xi, double q);
/// b_k(x) = beta sin(x_k), sigma = q I.
CoefficientField nemytskii_sine(std::size_t d, std::size_t d_xi, double beta, double q);
/// b(x) = beta0 + beta1 x, sigma_kk(x) = q + gamma b_k x_k.
CoefficientField affine(std::size_t d, std::size_t d_xi, const CoefficientParams& p, const BWeight& bop);
/// Lookup by name: "zero", "constant_sigma", "nemytskii_sine", "affine".
CoefficientField coefficient_preset(const std::string& name, std::size_t d, std::size_t d_xi,
                                    const CoefficientParams& p, const BWeight& bop);

/// Checks the declared Lipschitz and growth constants on 100 random probe pairs
/// with 5% slack; the sigma bound is taken against sqrt(<B(x-x'), x-x'>).
void audit_coefficients(const CoefficientField& field, const BWeight& bop, std::uint64_t seed = 0xA0D17);

/// Gaussian increments of the truncated cylindrical Wiener process, stored
/// step-major (N x M x d_xi) so that one step of all paths is contiguous.
struct BrownianIncrements {
  std::size_t paths = 0;
  std::size_t steps = 0;
  std::size_t d_xi = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::size_t step_offset = 0;  // global step index of local step 0
  std::vector<double> data;

  std::span<const double> at(std::size_t m, std::size_t i) const {
    return {data.data() + (i * paths + m) * d_xi, d_xi};
  }
};

/// Entry (m, i, j) is sqrt(dt) * rng.normal(m, step_offset + i, j); steps on a
/// common fine grid therefore share noise across runs with different offsets.
BrownianIncrements sample_increments(const TimeGrid& grid, std::size_t paths, const NoiseModel& noise,
                                     const RngPolicy& rng, std::size_t step_offset = 0, const Exec& exec = {});

class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t paths, std::size_t d, std::shared_ptr<const BrownianIncrements> incs,
               std::size_t increment_offset);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t paths() const noexcept { return M_; }
  std::size_t steps() const noexcept { return grid_.steps(); }
  std::size_t dim() const noexcept { return d_; }
  std::size_t noise_dim() const noexcept { return incs_->d_xi; }
  std::uint64_t seed() const noexcept { return incs_->seed; }
  bool noise_free() const noexcept { return noise_free_; }

  // Step-major storage: regressions sweep all paths at one step.
  std::span<const double> state(std::size_t m, std::size_t i) const { return {states_.data() + (i * M_ + m) * d_, d_}; }
  std::span<double> state(std::size_t m, std::size_t i) { return {states_.data() + (i * M_ + m) * d_, d_}; }
  std::span<const double> increment(std::size_t m, std::size_t i) const { return incs_->at(m, i + offset_); }
  const std::shared_ptr<const BrownianIncrements>& increments() const noexcept { return incs_; }
  std::size_t increment_offset() const noexcept { return offset_; }

  void set_noise_free(bool v) noexcept { noise_free_ = v; }

 private:
  TimeGrid grid_;
  std::size_t M_;
  std::size_t d_;
  std::vector<double> states_;
  std::shared_ptr<const BrownianIncrements> incs_;
  std::size_t offset_;
  bool noise_free_ = false;
};

/// Exponential Euler: X_{i+1} = S(dt) [X_i + b(t_i, X_i) dt + sigma(t_i, X_i) dW_i].
/// Reads increments starting at local index increment_offset, which lets a run
/// started at an interior time of a fine grid reuse that grid's noise.
PathEnsemble simulate_ensemble(const DiagonalGenerator& gen, const CoefficientField& coeffs, const TimeGrid& grid,
                               const SpectralVector& x0, std::shared_ptr<const BrownianIncrements> incs,
                               std::size_t increment_offset = 0, const Exec& exec = {});

/// Forward-model data shared by the probes.
struct ForwardModel {
  DiagonalGenerator generator;
  BWeight bop;
  NoiseModel noise;
  CoefficientField coeffs;

  /// Strong B-condition plus dimension consistency.
  void validate() const;
};

struct ForwardStabilityReport {
  double lhs1 = 0.0;  // E[|X_T - X'_T|_{-1}^2 + int |X_s - X'_s|_H^2 ds]
  double lhs1_se = 0.0;
  double lhs2 = 0.0;  // E[|X_T - X'_T|_H^2]
  double lhs2_se = 0.0;
  double initial_hm1_sq = 0.0;
  double ratio1 = 0.0;  // lhs1 / |x - x'|_{-1}^2
  double ratio2 = 0.0;  // lhs2 (T - t) / |x - x'|_{-1}^2
};

/// Both initial points are driven by the same increments.
ForwardStabilityReport forward_stability_probe(const ForwardModel& model, const TimeGrid& grid, const SpectralVector& x,
                                               const SpectralVector& x_prime, std::size_t paths, std::uint64_t seed,
                                               const Exec& exec = {});

struct TimeContinuityRow {
  double t_n = 0.0;
  double sup_error = 0.0;  // E[sup_{s >= t_n} |X^{t_n,x}_s - X^{t,x}_s|_H^2]
  double std_error = 0.0;
};

/// Every t_n must be a point of grid (which starts at t); the run from t_n
/// uses the grid's increments from that index on.
std::vector<TimeContinuityRow> time_continuity_probe(const ForwardModel& model, const TimeGrid& grid,
                                                     const SpectralVector& x, const std::vector<double>& t_n,
                                                     std::size_t paths, std::uint64_t seed, const Exec& exec = {});

}  // namespace fkbsde::forward
