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

#include "fkbsde/forward_spde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fkbsde/error.hpp"

namespace fkbsde::forward {

TimeGrid::TimeGrid(double t0, double T, std::size_t N) : t0_(t0), T_(T), N_(N) {
  require(std::isfinite(t0) && std::isfinite(T) && t0 >= 0.0 && t0 < T, ErrorCode::kInvalidArgument,
          "TimeGrid: need 0 <= t < T < inf");
  require(N >= 1, ErrorCode::kInvalidArgument, "TimeGrid: N must be >= 1");
}

double TimeGrid::time(std::size_t i) const noexcept {
  if (i == N_) return T_;
  return t0_ + static_cast<double>(i) * dt();
}

std::size_t TimeGrid::index_of(double t) const {
  const double pos = (t - t0_) / dt();
  const double rounded = std::round(pos);
  if (!(rounded >= 0.0 && rounded <= static_cast<double>(N_) && std::abs(pos - rounded) <= 1e-9 * (1.0 + pos)))
    fail(ErrorCode::kStructural, "time " + std::to_string(t) + " is not a point of the simulation grid");
  return static_cast<std::size_t>(rounded);
}

TimeGrid TimeGrid::tail(std::size_t first) const {
  require(first < N_, ErrorCode::kStructural, "TimeGrid::tail: start index must precede T");
  return TimeGrid(time(first), T_, N_ - first);
}

CoefficientField::CoefficientField(std::string name, std::size_t d, std::size_t d_xi, FieldFn drift, FieldFn diffusion,
                                   double lip_b, double lip_sigma, double growth)
    : name_(std::move(name)),
      d_(d),
      d_xi_(d_xi),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      lip_b_(lip_b),
      lip_sigma_(lip_sigma),
      growth_(growth) {
  require(d_ >= 1 && d_xi_ >= 1, ErrorCode::kInvalidArgument, "coefficients: dimensions must be >= 1");
  require(lip_b_ >= 0.0 && lip_sigma_ >= 0.0 && growth_ >= 0.0, ErrorCode::kInvalidArgument,
          "coefficients: declared constants must be >= 0");
}

namespace {

void diagonal_sigma(std::size_t d, std::size_t d_xi, double q, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < std::min(d, d_xi); ++k) out[k * d_xi + k] = q;
}

void zero_field(double, std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); }

}  // namespace

CoefficientField zero_coefficients(std::size_t d, std::size_t d_xi) {
  return CoefficientField("zero", d, d_xi, zero_field, zero_field, 0.0, 0.0, 0.0);
}

CoefficientField constant_sigma(std::size_t d, std::size_t d_xi, double q) {
  const double rank = static_cast<double>(std::min(d, d_xi));
  return CoefficientField(
      "constant_sigma", d, d_xi, zero_field,
      [d, d_xi, q](double, std::span<const double>, std::span<double> out) { diagonal_sigma(d, d_xi, q, out); }, 0.0,
      0.0, std::abs(q) * std::sqrt(rank));
}

CoefficientField nemytskii_sine(std::size_t d, std::size_t d_xi, double beta, double q) {
  const double rank = static_cast<double>(std::min(d, d_xi));
  return CoefficientField(
      "nemytskii_sine", d, d_xi,
      [beta](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = beta * std::sin(x[k]);
      },
      [d, d_xi, q](double, std::span<const double>, std::span<double> out) { diagonal_sigma(d, d_xi, q, out); },
      std::abs(beta), 0.0, std::max(std::abs(beta), std::abs(q) * std::sqrt(rank)));
}

CoefficientField affine(std::size_t d, std::size_t d_xi, const CoefficientParams& p, const BWeight& bop) {
  require(bop.dim() == d, ErrorCode::kStructural, "affine coefficients: B dimension mismatch");
  const double rank = static_cast<double>(std::min(d, d_xi));
  const double bmax = bop.max_weight();
  std::vector<double> b = bop.weights();
  const double growth = std::max({std::abs(p.beta0) * std::sqrt(static_cast<double>(d)), std::abs(p.beta1),
                                  std::abs(p.q) * std::sqrt(rank), std::abs(p.gamma) * bmax});
  return CoefficientField(
      "affine", d, d_xi,
      [p](double, std::span<const double> x, std::span<double> out) {
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = p.beta0 + p.beta1 * x[k];
      },
      [d, d_xi, p, b](double, std::span<const double> x, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t k = 0; k < std::min(d, d_xi); ++k) out[k * d_xi + k] = p.q + p.gamma * b[k] * x[k];
      },
      std::abs(p.beta1), std::abs(p.gamma) * std::sqrt(bmax), growth);
}

CoefficientField coefficient_preset(const std::string& name, std::size_t d, std::size_t d_xi,
                                    const CoefficientParams& p, const BWeight& bop) {
  if (name == "zero") return zero_coefficients(d, d_xi);
  if (name == "constant_sigma") return constant_sigma(d, d_xi, p.q);
  if (name == "nemytskii_sine") return nemytskii_sine(d, d_xi, p.beta, p.q);
  if (name == "affine") return affine(d, d_xi, p, bop);
  fail(ErrorCode::kInvalidArgument, "unknown coefficient preset '" + name + "'");
}

void audit_coefficients(const CoefficientField& field, const BWeight& bop, std::uint64_t seed) {
  constexpr int kPairs = 100;
  constexpr double kSlack = 1.05;
  const std::size_t d = field.dim();
  const std::size_t dxi = field.noise_dim();
  require(bop.dim() == d, ErrorCode::kStructural, "audit: B dimension mismatch");
  const RngPolicy rng(seed, 0x5eed);
  std::vector<double> x(d), xp(d), bx(d), bxp(d), sx(d * dxi), sxp(d * dxi), diff(d);
  for (int n = 0; n < kPairs; ++n) {
    const double scale = std::pow(10.0, static_cast<double>(n % 4) - 1.0);  // 0.1 .. 100
    rng.normals(static_cast<std::uint64_t>(n), 0, x);
    rng.normals(static_cast<std::uint64_t>(n), 1, xp);
    for (std::size_t k = 0; k < d; ++k) {
      x[k] *= scale;
      xp[k] = x[k] + xp[k] * (n % 2 == 0 ? 1e-2 : 1.0) * scale;
      diff[k] = x[k] - xp[k];
    }
    const double s = rng.uniform(static_cast<std::uint64_t>(n), 2, 0);
    field.drift(s, x, bx);
    field.drift(s, xp, bxp);
    field.diffusion(s, x, sx);
    field.diffusion(s, xp, sxp);
    for (std::size_t k = 0; k < d; ++k) bxp[k] -= bx[k];
    for (std::size_t k = 0; k < sx.size(); ++k) sxp[k] -= sx[k];

    const double dx = spectral::norm_h(diff);
    const double dx_m1 = std::sqrt(spectral::norm_hm1_sq(bop, diff));
    const double tiny = 1e-12 * (1.0 + spectral::norm_h(x));
    if (!(spectral::norm_h(bxp) <= kSlack * field.lip_b() * dx + tiny))
      fail(ErrorCode::kInvalidArgument, "coefficients '" + field.name() +
                                            "': drift exceeds declared Lipschitz constant on probe pair " +
                                            std::to_string(n));
    if (!(spectral::norm_h(sxp) <= kSlack * field.lip_sigma() * dx_m1 + tiny))
      fail(ErrorCode::kInvalidArgument, "coefficients '" + field.name() +
                                            "': sigma exceeds declared H_{-1} Lipschitz constant on probe pair " +
                                            std::to_string(n));
    const double growth_bound = kSlack * field.growth() * (1.0 + spectral::norm_h(x)) + tiny;
    if (!(spectral::norm_h(bx) <= growth_bound && spectral::norm_h(sx) <= growth_bound))
      fail(ErrorCode::kInvalidArgument,
           "coefficients '" + field.name() + "': linear growth bound violated on probe pair " + std::to_string(n));
  }
}

BrownianIncrements sample_increments(const TimeGrid& grid, std::size_t paths, const NoiseModel& noise,
                                     const RngPolicy& rng, std::size_t step_offset, const Exec& exec) {
  require(paths >= 1, ErrorCode::kInvalidArgument, "sample_increments: M must be >= 1");
  BrownianIncrements incs;
  incs.paths = paths;
  incs.steps = grid.steps();
  incs.d_xi = noise.d_xi;
  incs.dt = grid.dt();
  incs.seed = rng.seed();
  incs.step_offset = step_offset;
  incs.data.resize(paths * incs.steps * incs.d_xi);
  const double sqdt = std::sqrt(incs.dt);
  parallel_for(paths, exec, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t i = 0; i < incs.steps; ++i)
      for (std::size_t m = m0; m < m1; ++m) {
        std::span<double> out(incs.data.data() + (i * paths + m) * incs.d_xi, incs.d_xi);
        rng.normals(m, step_offset + i, out);
        for (double& v : out) v *= sqdt;
      }
  });
  return incs;
}

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t paths, std::size_t d,
                           std::shared_ptr<const BrownianIncrements> incs, std::size_t increment_offset)
    : grid_(grid), M_(paths), d_(d), incs_(std::move(incs)), offset_(increment_offset) {
  require(incs_ != nullptr, ErrorCode::kStructural, "PathEnsemble: missing increments");
  require(incs_->paths == M_ && incs_->steps >= offset_ + grid_.steps(), ErrorCode::kStructural,
          "PathEnsemble: increments do not cover the grid");
  require(std::abs(incs_->dt - grid_.dt()) <= 1e-12 * grid_.dt(), ErrorCode::kStructural,
          "PathEnsemble: increment step differs from grid step");
  states_.assign(M_ * (grid_.steps() + 1) * d_, 0.0);
}

PathEnsemble simulate_ensemble(const DiagonalGenerator& gen, const CoefficientField& coeffs, const TimeGrid& grid,
                               const SpectralVector& x0, std::shared_ptr<const BrownianIncrements> incs,
                               std::size_t increment_offset, const Exec& exec) {
  const std::size_t d = gen.dim();
  require(coeffs.dim() == d && x0.dim() == d, ErrorCode::kStructural, "simulate_ensemble: state dimension mismatch");
  require(incs != nullptr && incs->d_xi == coeffs.noise_dim(), ErrorCode::kStructural,
          "simulate_ensemble: noise dimension mismatch");
  const std::size_t dxi = coeffs.noise_dim();
  const std::size_t M = incs->paths;
  const std::size_t N = grid.steps();
  const double dt = grid.dt();
  PathEnsemble ens(grid, M, d, std::move(incs), increment_offset);

  std::vector<double> decay(d);
  for (std::size_t k = 0; k < d; ++k) decay[k] = std::exp(-gen.lambda(k) * dt);

  std::vector<char> saw_noise(M, 0);
  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    std::vector<double> b(d), sigma(d * dxi);
    for (std::size_t m = m0; m < m1; ++m) {
      auto x = ens.state(m, 0);
      std::copy(x0.coeffs().begin(), x0.coeffs().end(), x.begin());
    }
    for (std::size_t i = 0; i < N; ++i) {
      const double t = grid.time(i);
      for (std::size_t m = m0; m < m1; ++m) {
        const auto xi = ens.state(m, i);
        auto next = ens.state(m, i + 1);
        coeffs.drift(t, xi, b);
        coeffs.diffusion(t, xi, sigma);
        const auto dw = ens.increment(m, i);
        bool finite = true;
        for (std::size_t k = 0; k < d; ++k) {
          double noise = 0.0;
          const double* row = sigma.data() + k * dxi;
          for (std::size_t j = 0; j < dxi; ++j) {
            noise += row[j] * dw[j];
            saw_noise[m] |= static_cast<char>(row[j] != 0.0);
          }
          next[k] = decay[k] * (xi[k] + b[k] * dt + noise);
          finite = finite && std::isfinite(next[k]);
        }
        if (!(finite))
          fail(ErrorCode::kOverflow, "simulate_ensemble: non-finite state on path " + std::to_string(m) + " at step " +
                                         std::to_string(i + 1));
      }
    }
  });
  ens.set_noise_free(std::none_of(saw_noise.begin(), saw_noise.end(), [](char c) { return c != 0; }));
  return ens;
}

void ForwardModel::validate() const {
  const std::size_t d = generator.dim();
  require(bop.dim() == d && coeffs.dim() == d, ErrorCode::kStructural,
          "forward model: generator, B and coefficients must share the truncation dimension");
  require(coeffs.noise_dim() == noise.d_xi, ErrorCode::kStructural, "forward model: noise dimension mismatch");
  const auto verdict = spectral::strong_b_check(generator, bop);
  if (!(verdict.holds))
    fail(ErrorCode::kInvalidArgument, "strong B-condition (lambda_k + c0) b_k >= 1 violated at k=" +
                                          std::to_string(verdict.violating_index.value_or(0)));
}

ForwardStabilityReport forward_stability_probe(const ForwardModel& model, const TimeGrid& grid, const SpectralVector& x,
                                               const SpectralVector& x_prime, std::size_t paths, std::uint64_t seed,
                                               const Exec& exec) {
  model.validate();
  auto incs =
      std::make_shared<const BrownianIncrements>(sample_increments(grid, paths, model.noise, RngPolicy(seed), 0, exec));
  const auto ens = simulate_ensemble(model.generator, model.coeffs, grid, x, incs, 0, exec);
  const auto ens_p = simulate_ensemble(model.generator, model.coeffs, grid, x_prime, incs, 0, exec);
  const std::size_t d = model.generator.dim();
  const std::size_t N = grid.steps();
  const double dt = grid.dt();

  auto terminal_diff = [&](std::size_t m, std::vector<double>& out) {
    const auto a = ens.state(m, N);
    const auto b = ens_p.state(m, N);
    for (std::size_t k = 0; k < d; ++k) out[k] = a[k] - b[k];
  };

  const auto lhs1 = mean_and_stderr(paths, exec, [&](std::size_t m) {
    std::vector<double> dv(d);
    terminal_diff(m, dv);
    double acc = spectral::norm_hm1_sq(model.bop, dv);
    for (std::size_t i = 0; i < N; ++i) {
      const auto a = ens.state(m, i);
      const auto b = ens_p.state(m, i);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      acc += s * dt;
    }
    return acc;
  });
  const auto lhs2 = mean_and_stderr(paths, exec, [&](std::size_t m) {
    std::vector<double> dv(d);
    terminal_diff(m, dv);
    const double n = spectral::norm_h(dv);
    return n * n;
  });

  ForwardStabilityReport rep;
  rep.lhs1 = lhs1.mean;
  rep.lhs1_se = lhs1.std_error;
  rep.lhs2 = lhs2.mean;
  rep.lhs2_se = lhs2.std_error;
  const auto dx = x - x_prime;
  rep.initial_hm1_sq = spectral::norm_hm1_sq(model.bop, dx);
  if (rep.initial_hm1_sq > 0.0) {
    rep.ratio1 = rep.lhs1 / rep.initial_hm1_sq;
    rep.ratio2 = rep.lhs2 * (grid.T() - grid.t0()) / rep.initial_hm1_sq;
  }
  return rep;
}

std::vector<TimeContinuityRow> time_continuity_probe(const ForwardModel& model, const TimeGrid& grid,
                                                     const SpectralVector& x, const std::vector<double>& t_n,
                                                     std::size_t paths, std::uint64_t seed, const Exec& exec) {
  model.validate();
  std::vector<std::size_t> starts;
  for (double t : t_n) {
    const std::size_t k = grid.index_of(t);
    require(k < grid.steps(), ErrorCode::kStructural, "time_continuity_probe: t_n must be < T");
    starts.push_back(k);
  }
  auto incs =
      std::make_shared<const BrownianIncrements>(sample_increments(grid, paths, model.noise, RngPolicy(seed), 0, exec));
  const auto base = simulate_ensemble(model.generator, model.coeffs, grid, x, incs, 0, exec);
  const std::size_t d = model.generator.dim();

  std::vector<TimeContinuityRow> rows;
  for (std::size_t r = 0; r < starts.size(); ++r) {
    const std::size_t k = starts[r];
    TimeContinuityRow row;
    row.t_n = grid.time(k);
    if (k == 0) {
      rows.push_back(row);  // same start, same noise: identical paths
      continue;
    }
    const auto late = simulate_ensemble(model.generator, model.coeffs, grid.tail(k), x, incs, k, exec);
    const auto stat = mean_and_stderr(paths, exec, [&](std::size_t m) {
      double worst = 0.0;
      for (std::size_t i = 0; i <= late.steps(); ++i) {
        const auto a = late.state(m, i);
        const auto b = base.state(m, i + k);
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
        worst = std::max(worst, s);
      }
      return worst;
    });
    row.sup_error = stat.mean;
    row.std_error = stat.std_error;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fkbsde::forward
