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

#ifndef MMGATE_CUBIC_HPP
#define MMGATE_CUBIC_HPP

// Single-mode cubic resources |gamma_N> for H = t x^3 and what they buy for
// the two-mode gate kappa x1 x2^2.
//
// Sign convention: |gamma_N> approximates e^{-i t x^3}|p = 0>, the state
// annihilated by p + 3 t x^2. Two of them, a 50:50 beam splitter and
// squeezers x_j -> lambda_j x_j carry the exponent
//   t' (2 lambda1^3 x1^3 + 6 lambda1 lambda2^2 x1 x2^2),  t' = t / (2 sqrt 2),
// so the matched gate strength is kappa = 6 t' lambda1 lambda2^2.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmgate/bfgs.hpp"
#include "mmgate/fock.hpp"
#include "mmgate/optimizer.hpp"
#include "mmgate/quadpoly.hpp"

namespace mmgate {

struct GammaState {
  fock::KetVector state;   // over Fock states 0..N, first significant coefficient real >= 0
  double strength = 0.0;   // t
  double variance = 0.0;   // Var(p + 3 t x^2)
  int converged_starts = 0;
};

/// Minimizes Var(p + 3 t x^2) over superpositions of |0>..|N>, N >= 1, with
/// config.benchmark_starts seeded BFGS searches.
GammaState gamma_state(int n, double strength, const OptimizerConfig& config = {});

/// |<gamma|f>|^2 for the single-mode factor f (0 or 1) of a factorized
/// record, maximized over photon-number parity and complex conjugation of f.
/// The factor must have the same cutoff as gamma.
double overlap_audit(const fock::KetVector& gamma, const OptimizationRecord& record, int which = 0);

struct OverlapMatch {
  double strength = 0.0;
  double overlap = 0.0;
};

/// Strength t in [lo, hi] whose |gamma_N> overlaps best with the record factor.
OverlapMatch match_gamma_strength(const OptimizationRecord& record, int which, double lo, double hi,
                                  const OptimizerConfig& config = {});

/// Exponent G of U_S U_BS e^{-i t (x1^3 + x2^3)}: the polynomial with
/// U_S U_BS e^{-i t (x1^3 + x2^3)} U_BS^dag U_S^dag = e^{-i G}.
Polynomial limit_exponent(double t, double lambda1, double lambda2);

struct CubicLimitConfig {
  double t = 1.0;
  int n = 10;
  std::vector<double> lambda1;
  bool constrained = true;  // lambda2 = lambda1^(-1/2); otherwise lambda2 below is used throughout
  double lambda2 = 1.0;

  void validate() const;
};

struct LimitPoint {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double kappa = 0.0;              // 6 t' lambda1 lambda2^2
  double residual = 0.0;           // 2 t' lambda1^3, coefficient of the leftover x1^3
  double variance = 0.0;
  std::vector<double> per_mode;
  bool floor = false;              // no longer decreasing with lambda1
};

struct CubicLimitCurve {
  std::vector<LimitPoint> points;  // lambda1 descending
  double gamma_variance = 0.0;

  /// lambda1 of the first point over lambda1 of the last point before the floor.
  double monotone_span() const;
  /// "lambda1,lambda2,kappa,variance,truncation_floor"
  std::string to_csv() const;
};

/// gamma_N (x) gamma_N, U_BS(pi/4), then S_1(lambda1) S_2(lambda2); two-mode
/// variance at the matched kappa for each lambda1.
CubicLimitCurve cubic_pair_limit(const CubicLimitConfig& limit, const OptimizerConfig& config = {});

struct ScenarioOptions {
  double kappa_min = 0.02;
  double kappa_max = 3.0;
  int grid = 17;         // log-spaced kappa points before refinement
  double log_tolerance = 1e-3;
};

struct CubicScenario {
  OptimizationRecord record;  // factorized core, full Gaussian layer, at the best kappa
  double gamma_variance = 0.0;
  std::vector<std::pair<double, double>> scan;  // (kappa, R_V) of every evaluated kappa
};

/// Core fixed to |gamma_N(kappa)> (x) |0>, only the Gaussian layer optimized;
/// best R_V over kappa. N = 0 is the vacuum.
CubicScenario single_cubic_scenario(int n, const OptimizerConfig& config = {}, const ScenarioOptions& options = {});

/// Same with the core |gamma_N(kappa)> (x) |gamma_N(kappa)>.
CubicScenario cubic_pair_scenario(int n, const OptimizerConfig& config = {}, const ScenarioOptions& options = {});

/// Best Gaussian layer for a fixed core at kappa; the record's v_g is filled
/// from the benchmark.
OptimizationRecord fit_gaussian_layer(const fock::KetVector& core, double kappa, const OptimizerConfig& config);

}  // namespace mmgate

#endif  // MMGATE_CUBIC_HPP
