/*
 * Copyright 2026 The skelact authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef SKELACT_TESTS_GRAD_CHECK_HPP
#define SKELACT_TESTS_GRAD_CHECK_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "skelact/nn/tensor.hpp"

namespace skelact::testing {

/// Central finite differences of a scalar function with respect to every
/// entry of `values`, compared against the analytic gradient `grad`.
/// Relative error denominator max(1, |analytic|, |numeric|). Returns the
/// worst relative error; prints the first offender when above `tol`.
inline double check_gradient(const std::function<double()>& f, std::vector<double>& values,
                             const std::vector<double>& grad, double tol = 1e-4,
                             double h = 1e-5) {
  double worst = 0.0;
  bool reported = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double f_plus = f();
    values[i] = saved - h;
    const double f_minus = f();
    values[i] = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    const double denom = std::max({1.0, std::fabs(numeric), std::fabs(grad[i])});
    const double rel = std::fabs(numeric - grad[i]) / denom;
    if (rel > worst) worst = rel;
    if (rel > tol && !reported) {
      std::fprintf(stderr, "grad check: coord %zu analytic=%.10e numeric=%.10e rel=%.3e\n", i,
                   grad[i], numeric, rel);
      reported = true;
    }
  }
  return worst;
}

/// Uniform [lo, hi) fill, deterministic given the generator state.
inline void fill_uniform(std::vector<double>& values, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0) {
  for (double& v : values) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = lo + (hi - lo) * u;
  }
}

/// Random projection weights: reduces a tensor-valued op to the scalar
/// sum(output * proj) so central differences apply.
inline std::vector<double> random_projection(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> proj(n);
  fill_uniform(proj, rng, -1.0, 1.0);
  return proj;
}

}  // namespace skelact::testing

#endif  // SKELACT_TESTS_GRAD_CHECK_HPP
