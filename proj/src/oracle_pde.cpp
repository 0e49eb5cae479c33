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

#include "fkbsde/oracle_pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fkbsde/error.hpp"

namespace fkbsde::oracle {

void Grid1D::validate() const {
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max, ErrorCode::kStructural,
          "Grid1D: need x_min < x_max");
  require(J >= 3, ErrorCode::kStructural, "Grid1D: need J >= 3");
  require(n_t >= 1, ErrorCode::kStructural, "Grid1D: need n_t >= 1");
  require(t0 < T, ErrorCode::kStructural, "Grid1D: need t0 < T");
}

Grid1D covering_grid(const std::vector<double>& points, double sigma_max, double t0, double T, double h,
                     std::size_t n_t, double margin_sd) {
  require(!points.empty() && h > 0.0, ErrorCode::kInvalidArgument, "covering_grid: need points and h > 0");
  const auto [lo_it, hi_it] = std::minmax_element(points.begin(), points.end());
  const double reach = margin_sd * sigma_max * std::sqrt(T - t0) + 2.0 * h;
  Grid1D g;
  g.x_min = h * std::floor((*lo_it - reach) / h);
  g.x_max = h * std::ceil((*hi_it + reach) / h);
  g.J = static_cast<std::size_t>(std::llround((g.x_max - g.x_min) / h)) + 1;
  g.n_t = n_t;
  g.t0 = t0;
  g.T = T;
  g.validate();
  return g;
}

FdSolution::FdSolution(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.size() == (grid_.n_t + 1) * grid_.J, ErrorCode::kStructural,
          "FdSolution: value table has wrong size");
}

double FdSolution::value(double t, double x) const {
  const double eps = 1e-12 * (1.0 + std::abs(grid_.T));
  require(t >= grid_.t0 - eps && t <= grid_.T + eps && x >= grid_.x_min && x <= grid_.x_max, ErrorCode::kStructural,
          "FdSolution: point outside the oracle domain");
  const double ft = std::clamp((t - grid_.t0) / grid_.dt(), 0.0, static_cast<double>(grid_.n_t));
  const double fx = std::clamp((x - grid_.x_min) / grid_.h(), 0.0, static_cast<double>(grid_.J - 1));
  const std::size_t n = std::min(static_cast<std::size_t>(ft), grid_.n_t - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(fx), grid_.J - 2);
  const double wt = ft - static_cast<double>(n);
  const double wx = fx - static_cast<double>(j);
  const double lo = (1 - wx) * at(n, j) + wx * at(n, j + 1);
  const double hi = (1 - wx) * at(n + 1, j) + wx * at(n + 1, j + 1);
  return (1 - wt) * lo + wt * hi;
}

void FdSolution::write_csv(std::ostream& out) const {
  out << "t,x,v\n";
  char buf[96];
  for (std::size_t n = 0; n <= grid_.n_t; ++n) {
    for (std::size_t j = 0; j < grid_.J; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid_.t(n), grid_.x(j), at(n, j));
      out << buf;
    }
  }
}

namespace {

struct ScalarModel {
  double lambda;
  const forward::CoefficientField& coeffs;

  double mu(double t, double x) const {
    double b = 0.0;
    coeffs.drift(t, std::span<const double>(&x, 1), std::span<double>(&b, 1));
    return -lambda * x + b;
  }
  double sigma(double t, double x) const {
    double s = 0.0;
    coeffs.diffusion(t, std::span<const double>(&x, 1), std::span<double>(&s, 1));
    return s;
  }
};

double driver_at(const DriverSpec& f, double t, double x, double y, double z) {
  return f(t, std::span<const double>(&x, 1), y, std::span<const double>(&z, 1));
}

// Value at (t, x_b) from the deterministic characteristic: x' = mu, v(T) = g(x_T), v' = f(s, x, v, 0).
double characteristic_value(const ScalarModel& model, const DriverSpec& driver, const TerminalFunctional& g, double t,
                            double x_b, double T, std::size_t steps) {
  if (steps == 0) return g(std::span<const double>(&x_b, 1));
  const double k = (T - t) / static_cast<double>(steps);
  const double hk = 0.5 * k;
  std::vector<double> xs(2 * steps + 1);
  xs[0] = x_b;
  for (std::size_t i = 0; i < 2 * steps; ++i) {
    const double s = t + hk * static_cast<double>(i);
    const double x = xs[i];
    const double k1 = model.mu(s, x);
    const double k2 = model.mu(s + 0.5 * hk, x + 0.5 * hk * k1);
    const double k3 = model.mu(s + 0.5 * hk, x + 0.5 * hk * k2);
    const double k4 = model.mu(s + hk, x + hk * k3);
    xs[i + 1] = x + hk / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  double v = g(std::span<const double>(&xs[2 * steps], 1));
  for (std::size_t i = steps; i-- > 0;) {
    const double s1 = t + k * static_cast<double>(i + 1);
    const double sm = s1 - hk;
    const double s0 = s1 - k;
    const double k1 = driver_at(driver, s1, xs[2 * i + 2], v, 0.0);
    const double k2 = driver_at(driver, sm, xs[2 * i + 1], v - 0.5 * k * k1, 0.0);
    const double k3 = driver_at(driver, sm, xs[2 * i + 1], v - 0.5 * k * k2, 0.0);
    const double k4 = driver_at(driver, s0, xs[2 * i], v - k * k3, 0.0);
    v -= k / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return v;
}

// Solves lower[j] u[j-1] + diag[j] u[j] + upper[j] u[j+1] = rhs[j] in place.
void thomas(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t j = 1; j < n; ++j) {
    const double w = lower[j] / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) rhs[j] = (rhs[j] - upper[j] * rhs[j + 1]) / diag[j];
}

}  // namespace

FdSolution solve_semilinear_fd(const spectral::DiagonalGenerator& generator, const forward::CoefficientField& coeffs,
                               const DriverSpec& driver, const TerminalFunctional& terminal, const Grid1D& grid) {
  grid.validate();
  require(generator.dim() == 1 && coeffs.dim() == 1 && coeffs.noise_dim() == 1, ErrorCode::kStructural,
          "solve_semilinear_fd: the oracle handles d = d_xi = 1 only");
  const ScalarModel model{generator.lambda(0), coeffs};
  const std::size_t J = grid.J;
  const std::size_t I = J - 2;  // interior nodes
  const double h = grid.h();
  const double dt = grid.dt();

  for (std::size_t n = 0; n <= grid.n_t; ++n) {
    for (std::size_t j = 0; j < J; ++j) {
      if (!(std::abs(model.sigma(grid.t(n), grid.x(j))) >= 1e-3))
        fail(ErrorCode::kStructural, "solve_semilinear_fd: sigma degenerates at t=" + std::to_string(grid.t(n)) +
                                         ", x=" + std::to_string(grid.x(j)));
    }
  }

  std::vector<double> values((grid.n_t + 1) * J);
  auto row = [&](std::size_t n) { return values.data() + n * J; };
  for (std::size_t j = 0; j < J; ++j) {
    const double x = grid.x(j);
    row(grid.n_t)[j] = terminal(std::span<const double>(&x, 1));
  }

  // Operator coefficients of L v = 0.5 sigma^2 v_xx + mu v_x at node j and time t.
  auto stencil = [&](double t, std::size_t j, double& lo, double& mid, double& up) {
    const double x = grid.x(j);
    const double s = model.sigma(t, x);
    const double m = model.mu(t, x);
    const double a = 0.5 * s * s / (h * h);
    lo = a - m / (2 * h);
    mid = -2 * a;
    up = a + m / (2 * h);
  };
  auto nonlinear = [&](double t, const double* v, std::vector<double>& out) {
    for (std::size_t k = 0; k < I; ++k) {
      const std::size_t j = k + 1;
      const double x = grid.x(j);
      const double z = model.sigma(t, x) * (v[j + 1] - v[j - 1]) / (2 * h);
      out[k] = driver_at(driver, t, x, v[j], z);
    }
  };
  auto boundary = [&](std::size_t n, double x_b) {
    if (grid.boundary == BoundaryPolicy::kTerminal || n == grid.n_t) return terminal(std::span<const double>(&x_b, 1));
    const std::size_t steps = 4 * (grid.n_t - n);
    return characteristic_value(model, driver, terminal, grid.t(n), x_b, grid.T, steps);
  };

  std::vector<double> f_next(I), f_cur(I), explicit_part(I), lower(I), diag(I), upper(I), rhs(I), iterate(J), prev(J);
  constexpr int kMaxSweeps = 5;
  constexpr double kTol = 1e-10;

  for (std::size_t n = grid.n_t; n-- > 0;) {
    const double t1 = grid.t(n + 1);
    const double t0 = grid.t(n);
    const double* v1 = row(n + 1);
    nonlinear(t1, v1, f_next);
    for (std::size_t k = 0; k < I; ++k) {
      double lo, mid, up;
      stencil(t1, k + 1, lo, mid, up);
      explicit_part[k] = v1[k + 1] + 0.5 * dt * (lo * v1[k] + mid * v1[k + 1] + up * v1[k + 2]) - 0.5 * dt * f_next[k];
    }
    const double left = boundary(n, grid.x_min);
    const double right = boundary(n, grid.x_max);

    if (n + 2 <= grid.n_t) {
      const double* v2 = row(n + 2);
      for (std::size_t j = 0; j < J; ++j) iterate[j] = 2 * v1[j] - v2[j];
    } else {
      std::copy(v1, v1 + J, iterate.begin());
    }
    iterate[0] = left;
    iterate[J - 1] = right;

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
      nonlinear(t0, iterate.data(), f_cur);
      for (std::size_t k = 0; k < I; ++k) {
        double lo, mid, up;
        stencil(t0, k + 1, lo, mid, up);
        lower[k] = -0.5 * dt * lo;
        diag[k] = 1.0 - 0.5 * dt * mid;
        upper[k] = -0.5 * dt * up;
        rhs[k] = explicit_part[k] - 0.5 * dt * f_cur[k];
      }
      rhs[0] -= lower[0] * left;
      rhs[I - 1] -= upper[I - 1] * right;
      lower[0] = 0.0;
      upper[I - 1] = 0.0;
      thomas(lower, diag, upper, rhs);

      prev = iterate;
      double change = 0.0, scale = 1.0;
      for (std::size_t k = 0; k < I; ++k) {
        iterate[k + 1] = rhs[k];
        change = std::max(change, std::abs(rhs[k] - prev[k + 1]));
        scale = std::max(scale, std::abs(rhs[k]));
      }
      converged = change <= kTol * scale;
    }
    if (!(converged))
      fail(ErrorCode::kNumerical,
           "solve_semilinear_fd: Picard iteration did not converge at time step " + std::to_string(n));
    for (std::size_t j = 0; j < J; ++j) {
      if (!std::isfinite(iterate[j]))
        fail(ErrorCode::kOverflow, "solve_semilinear_fd: non-finite value at time step " + std::to_string(n));
    }
    std::copy(iterate.begin(), iterate.end(), row(n));
  }
  return FdSolution(grid, std::move(values));
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, double fallback, bool required) {
  const auto it = params.find(key);
  if (it != params.end()) return it->second;
  require(!required, ErrorCode::kInvalidArgument, "closed_form: missing parameter '" + key + "'");
  return fallback;
}

}  // namespace

double closed_form(const std::string& tag, const std::map<std::string, double>& params, double t, double x) {
  const double T = param(params, "T", 1.0, false);
  const double tau = T - t;
  require(tau >= 0.0, ErrorCode::kInvalidArgument, "closed_form: need t <= T");
  const double sigma = param(params, "sigma", 1.0, false);
  if (tag == "gaussian_moment") return x * x + sigma * sigma * tau;
  if (tag == "ou_mean") return x * std::exp(-param(params, "lambda", 0.0, true) * tau);
  if (tag == "ou_var") {
    const double lambda = param(params, "lambda", 0.0, true);
    if (lambda == 0.0) return sigma * sigma * tau;
    return sigma * sigma * -std::expm1(-2.0 * lambda * tau) / (2.0 * lambda);
  }
  if (tag == "linear_decay") {
    return param(params, "kappa", 0.0, true) * std::exp(-param(params, "rho", 0.0, true) * tau);
  }
  if (tag == "heat_of_sine") return std::exp(-0.5 * sigma * sigma * tau) * std::sin(x);
  fail(ErrorCode::kInvalidArgument, "closed_form: unknown tag '" + tag + "'");
}

}  // namespace fkbsde::oracle
