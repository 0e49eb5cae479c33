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

#include "fkbsde/calibration.hpp"

#include <memory>
#include <random>

#include "fkbsde/bsde_core.hpp"
#include "fkbsde/presets.hpp"

namespace fkbsde::calibration {

namespace {

constexpr std::size_t kPaths = 20000;
constexpr std::size_t kSteps = 25;

double uniform(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

const std::vector<Draw>& family() {
  static const std::vector<Draw> draws = [] {
    std::mt19937_64 gen(0xCA1B5EEDULL);
    std::vector<Draw> out(10);
    // Draw 0 is the shipped ou_linear preset with the runner's stability shifts.
    out[0] = Draw{1.0, 1.0, 1.0, 0.3, 0.1, 0.2, 0.0, -0.1, 0.1};
    for (auto it = out.begin() + 1; it != out.end(); ++it) {
      auto& d = *it;
      d.lambda = uniform(gen, 0.5, 2.0);
      d.q = uniform(gen, 0.5, 1.5);
      d.x0 = uniform(gen, -1.0, 1.0);
      d.a = uniform(gen, -0.5, 0.5);
      d.b = uniform(gen, -0.5, 0.5);
      d.c = uniform(gen, -0.5, 0.5);
      d.kappa = uniform(gen, -1.0, 1.0);
      d.d_b = uniform(gen, 0.05, 0.3);
      d.d_kappa = uniform(gen, 0.05, 0.3);
    }
    return out;
  }();
  return draws;
}

Ratios measure(const Draw& draw, std::uint64_t seed, const Exec& exec) {
  auto spec = presets::preset_spec("ou_linear");
  spec.lambda = draw.lambda;
  spec.coeff.q = draw.q;
  spec.x = {draw.x0};
  spec.N = kSteps;
  spec.solver.paths = kPaths;
  spec.solver.seed = seed;
  spec.driver_params.a = draw.a;
  spec.driver_params.b = draw.b;
  spec.driver_params.c = draw.c;
  spec.terminal_params.shift = draw.kappa;
  const auto p1 = presets::build_problem(spec);
  spec.driver_params.b += draw.d_b;
  spec.terminal_params.shift += draw.d_kappa;
  const auto p2 = presets::build_problem(spec);

  const auto run = fk::run_from(p1, spec.t0, presets::evaluation_point(spec), exec);
  const bsde::SolverSettings settings{spec.solver.basis, spec.solver.picard_iters};
  const auto sol2 = bsde::solve_backward(p2.driver, p2.terminal, run.ensemble, settings, exec);

  Ratios r;
  r.apriori = bsde::apriori_check(p1.driver, p1.terminal, run.ensemble, run.solution, 1.0, 1.0, exec).ratio;
  r.stability = bsde::stability_check({p1.driver, p1.terminal}, {p2.driver, p2.terminal}, run.ensemble, run.solution,
                                      sol2, 1.0, 1.0, exec)
                    .ratio;
  return r;
}

}  // namespace fkbsde::calibration
