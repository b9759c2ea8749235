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

#ifndef MMGATE_NLSQ_HPP
#define MMGATE_NLSQ_HPP

// Nonlinear-squeezing variance: sum over modes of Var(p_j + dV/dx_j) in the
// state U_G |core>, evaluated in the Heisenberg picture by conjugating the
// nonlinear quadratures with U_G and acting exactly on the core.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmgate/bfgs.hpp"
#include "mmgate/fock.hpp"
#include "mmgate/quadpoly.hpp"

namespace mmgate {

struct VarianceReport {
  double total = 0.0;
  std::vector<double> per_mode;
  std::vector<double> means;  // d_j = <p'_j>
  double kappa = 0.0;
  std::string setup;
};

/// Parameters of U_BS(theta2) S_1(lambda1) S_2(lambda2) U_BS(theta1).
struct GaussianParams {
  double theta1 = 0.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double theta2 = 0.0;

  SymplecticTransform transform() const { return gaussian_processing(theta1, lambda1, lambda2, theta2); }

  bool operator==(const GaussianParams&) const = default;
};

/// Smooth onto map from the real line to [lo, hi], uniform in log lambda.
double bounded_lambda(double u, double lo, double hi);
/// A preimage of lambda under bounded_lambda (lambda is clamped into range).
double unbounded_lambda(double lambda, double lo, double hi);

/// Angle wrapped into (-pi, pi].
double wrap_angle(double theta);

/// Core-state operations that compensate a canonicalizing change of the
/// Gaussian parameters: total parity multiplies c_{mn} by (-1)^(m+n), second
/// parity by (-1)^n.
struct GaugeMove {
  bool total_parity = false;
  bool second_parity = false;
};

/// Rewrites g into a canonical representative of its equivalence class under
/// the symmetries of the two-mode cubic variance: theta2 in (-pi/4, pi/4]
/// (quarter turns swap the squeezers), theta1 in [0, pi/2]. The returned
/// flags say how the core must change to keep the variance. Without
/// allow_second_parity, theta1 is left in (-pi/2, pi/2].
GaugeMove canonical_processing(GaussianParams& g, bool allow_second_parity = true);

/// Evaluates the variance for many (core, transform) pairs on one core basis.
/// The conjugated quadratures of the most recent transform are cached.
/// Not safe for concurrent use.
class VarianceEvaluator {
 public:
  VarianceEvaluator(fock::FockBasis core, Polynomial v, double kappa = 0.0);

  const fock::FockBasis& core() const { return table_.core(); }
  const Polynomial& hamiltonian() const { return v_; }

  /// Report for U |core>; amplitudes need not be normalized (nonzero norm).
  VarianceReport evaluate(const Eigen::VectorXcd& core_amplitudes, const SymplecticTransform& transform);
  double total(const Eigen::VectorXcd& core_amplitudes, const SymplecticTransform& transform);

  /// Target-by-core matrices of U^dag p'_j U.
  const std::vector<Eigen::MatrixXcd>& operators(const SymplecticTransform& transform);

 private:
  Polynomial v_;
  double kappa_;
  std::vector<Polynomial> quadratures_;
  fock::MonomialTable table_;
  std::optional<SymplecticTransform> cached_transform_;
  std::vector<Eigen::MatrixXcd> cached_ops_;
};

/// Variance of U|psi> for the nonlinear quadratures of V. The state must be
/// normalized; V must be x-only. kappa is carried into the report as a label.
VarianceReport nonlinear_variance(const fock::KetVector& state, const Polynomial& v, const SymplecticTransform& transform,
                                  double kappa = 0.0);

struct BenchmarkResult {
  VarianceReport report;
  GaussianParams params;
  bool bound_hit = false;  // a squeezing parameter sits at a configured bound
  int converged_starts = 0;
};

/// V_G(kappa) for the two-mode cubic gate kappa x1 x2^2: the variance of the
/// best Gaussian processing of the two-mode vacuum.
BenchmarkResult gaussian_benchmark(double kappa, const OptimizerConfig& config);

/// V_NG / V_G. Throws std::invalid_argument when the kappas differ.
double relative_variance(const VarianceReport& state_report, const VarianceReport& benchmark);

}  // namespace mmgate

#endif  // MMGATE_NLSQ_HPP
