// Copyright 2026 The mmgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MMGATE_BFGS_HPP
#define MMGATE_BFGS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mmgate {

/// Raised when a computation produces no usable number: non-finite
/// objectives, failed searches, violated tails. Maps to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OptimizerConfig {
  int starts = 2000;
  std::uint64_t seed = 1;
  int max_iters = 400;
  double fd_step = 1e-6;
  double tolerance = 1e-12;  // relative objective change that ends a local search
  double lambda_min = 0.05;
  double lambda_max = 20.0;
  int threads = 0;  // 0: hardware concurrency
  int benchmark_starts = 48;

  void validate() const;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

struct LocalSearchResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Central-difference gradient with per-coordinate step h * max(1, |x_i|).
std::vector<double> central_gradient(const ObjectiveFn& f, std::span<const double> x, double h, int* evaluations = nullptr);

/// BFGS with a strong-Wolfe line search on central-difference gradients.
/// Throws NumericalError if the objective is non-finite at the start point.
LocalSearchResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0, const OptimizerConfig& config);

}  // namespace mmgate

#endif  // MMGATE_BFGS_HPP
