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

#include "fkbsde/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fkbsde/error.hpp"

namespace fkbsde::bsde {

struct StepRegression::Factor {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

std::size_t RegressionBasis::feature_count(std::size_t modes, unsigned degree) {
  // C(modes + degree, degree)
  std::size_t n = 1;
  for (unsigned k = 1; k <= degree; ++k) n = n * (modes + k) / k;
  return n;
}

namespace {

// Exponent tuples of total degree <= p, graded (constant first).
std::vector<std::vector<unsigned>> monomials(std::size_t m, unsigned p) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> e(m, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned left) {
    if (pos == m) {
      out.push_back(e);
      return;
    }
    for (unsigned k = 0; k <= left; ++k) {
      e[pos] = k;
      rec(pos + 1, left - k);
    }
    e[pos] = 0;
  };
  rec(0, p);
  auto total = [](const std::vector<unsigned>& v) {
    unsigned t = 0;
    for (unsigned k : v) t += k;
    return t;
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) { return total(x) < total(y); });
  return out;
}

}  // namespace

StepRegression::StepRegression(const forward::PathEnsemble& ens, std::size_t step, const RegressionBasis& basis,
                               const Exec& exec)
    : paths_(ens.paths()), step_(step) {
  const std::size_t M = paths_;
  const std::size_t modes = std::min(basis.modes, ens.dim());

  auto moments = blocked_reduce(M, modes, exec, [&](std::size_t m, std::span<double> acc) {
    const auto x = ens.state(m, step);
    for (std::size_t a = 0; a < modes; ++a) acc[a] += x[a];
  });
  std::vector<double> mean(modes), scale(modes);
  for (std::size_t a = 0; a < modes; ++a) mean[a] = moments[a] / static_cast<double>(M);
  auto spread = blocked_reduce(M, modes, exec, [&](std::size_t m, std::span<double> acc) {
    const auto x = ens.state(m, step);
    for (std::size_t a = 0; a < modes; ++a) acc[a] += (x[a] - mean[a]) * (x[a] - mean[a]);
  });
  std::vector<double> mu, sd;
  for (std::size_t a = 0; a < modes; ++a) {
    const double s = std::sqrt(spread[a] / static_cast<double>(M));
    if (M > 1 && s > 1e-12 * (1.0 + std::abs(mean[a]))) {
      active_.push_back(a);
      mu.push_back(mean[a]);
      sd.push_back(s);
    }
  }
  exponents_ = monomials(active_.size(), active_.empty() ? 0 : basis.degree);
  const std::size_t K = exponents_.size();

  design_.resize(M * K);
  const unsigned p = basis.degree;
  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    std::vector<double> powers(active_.size() * (p + 1));
    for (std::size_t m = m0; m < m1; ++m) {
      const auto x = ens.state(m, step);
      for (std::size_t a = 0; a < active_.size(); ++a) {
        const double zval = (x[active_[a]] - mu[a]) / sd[a];
        powers[a * (p + 1)] = 1.0;
        for (unsigned k = 1; k <= p; ++k) powers[a * (p + 1) + k] = powers[a * (p + 1) + k - 1] * zval;
      }
      double* row = design_.data() + m * K;
      for (std::size_t f = 0; f < K; ++f) {
        double v = 1.0;
        for (std::size_t a = 0; a < active_.size(); ++a) v *= powers[a * (p + 1) + exponents_[f][a]];
        row[f] = v;
      }
    }
  });

  auto gram_flat = blocked_reduce(M, K * K, exec, [&](std::size_t m, std::span<double> acc) {
    const double* row = design_.data() + m * K;
    for (std::size_t r = 0; r < K; ++r)
      for (std::size_t c = r; c < K; ++c) acc[r * K + c] += row[r] * row[c];
  });
  Eigen::MatrixXd gram(K, K);
  for (std::size_t r = 0; r < K; ++r)
    for (std::size_t c = r; c < K; ++c) {
      gram(r, c) = gram_flat[r * K + c] / static_cast<double>(M);
      gram(c, r) = gram(r, c);
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxCondition))
    fail(ErrorCode::kNumerical, "regression at step " + std::to_string(step) +
                                    " is ill-conditioned (condition number " + std::to_string(condition_) + ")");
  if (condition_ > kRidgeCondition) {
    gram.diagonal().array() += 1e-10 * gram.trace() / static_cast<double>(K);
    ridged_ = true;
  }
  factor_ = std::make_unique<Factor>();
  factor_->ldlt.compute(gram);
}

StepRegression::~StepRegression() = default;
StepRegression::StepRegression(StepRegression&&) noexcept = default;
StepRegression& StepRegression::operator=(StepRegression&&) noexcept = default;

std::vector<double> StepRegression::fit(std::span<const double> target, std::span<double> fitted,
                                        const Exec& exec) const {
  const std::size_t M = paths_;
  const std::size_t K = features();
  require(target.size() == M && fitted.size() == M, ErrorCode::kStructural, "StepRegression::fit: size mismatch");

  bool constant = true;
  for (std::size_t m = 1; m < M && constant; ++m) constant = target[m] == target[0];
  if (constant) {
    std::vector<double> beta(K, 0.0);
    beta[0] = target[0];
    std::fill(fitted.begin(), fitted.end(), target[0]);
    return beta;
  }

  auto rhs_flat = blocked_reduce(M, K, exec, [&](std::size_t m, std::span<double> acc) {
    const double* row = design_.data() + m * K;
    for (std::size_t f = 0; f < K; ++f) acc[f] += row[f] * target[m];
  });
  Eigen::VectorXd rhs(K);
  for (std::size_t f = 0; f < K; ++f) rhs(f) = rhs_flat[f] / static_cast<double>(M);
  const Eigen::VectorXd sol = factor_->ldlt.solve(rhs);
  std::vector<double> beta(sol.data(), sol.data() + K);

  parallel_for(M, exec, [&](std::size_t m0, std::size_t m1) {
    for (std::size_t m = m0; m < m1; ++m) {
      const double* row = design_.data() + m * K;
      double v = 0.0;
      for (std::size_t f = 0; f < K; ++f) v += row[f] * beta[f];
      fitted[m] = v;
    }
  });
  return beta;
}

}  // namespace fkbsde::bsde
