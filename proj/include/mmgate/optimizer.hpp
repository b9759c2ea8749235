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

#ifndef MMGATE_OPTIMIZER_HPP
#define MMGATE_OPTIMIZER_HPP

// Multistart search for resource states U_G |core> of the two-mode cubic gate
// kappa x1 x2^2.
//
// Parameter layout: core coefficients first, then the Gaussian layer, either
// [theta] (a single beam splitter) or [theta1, lambda1, lambda2, theta2].
// Each free complex coefficient takes two reals (re, im), or one real r when
// the coefficient is restricted to i^k r with k its photon number. Factors of
// dimension one are fixed to |0> and take no parameters. The objective is
// invariant under scaling and global phase of the coefficients.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmgate/bfgs.hpp"
#include "mmgate/fock.hpp"
#include "mmgate/nlsq.hpp"

namespace mmgate {

enum class AnsatzFamily { Factorized, Entangled, SimplifiedPassive };
enum class GaussianLayers { PassiveOnly, Full };

struct AnsatzSpec {
  AnsatzFamily family = AnsatzFamily::Factorized;
  int m = 1;  // highest photon number in mode 1
  int n = 0;  // highest photon number in mode 2
  GaussianLayers layers = GaussianLayers::PassiveOnly;
  bool real_up_to_phase = false;
  bool exchange_symmetric = false;

  void validate() const;
  fock::FockBasis core_basis() const { return fock::FockBasis({m + 1, n + 1}); }
  bool factorized() const { return family != AnsatzFamily::Entangled; }
  std::size_t coefficient_parameters() const;
  std::size_t gaussian_parameters() const { return layers == GaussianLayers::Full ? 4 : 1; }
  std::size_t parameter_count() const { return coefficient_parameters() + gaussian_parameters(); }
  /// Short name such as "entangled 1x1 full" used in reports and file names.
  std::string label() const;

  bool operator==(const AnsatzSpec&) const = default;
};

std::string to_string(AnsatzFamily family);
std::string to_string(GaussianLayers layers);
AnsatzFamily parse_family(const std::string& text);
GaussianLayers parse_layers(const std::string& text);

struct OptimizationRecord {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  double kappa = 0.0;
  AnsatzSpec ansatz;
  GaussianParams gaussian;
  std::vector<std::complex<double>> core;  // over core_basis(), normalized, gauge fixed
  double v_ng = 0.0;
  double v_g = 0.0;
  double r_v = 0.0;
  double i1 = 0.0;  // kappa / (lambda1^2 lambda2)
  double i2 = 0.0;  // kappa / (lambda1 lambda2^2)
  std::vector<double> per_mode;
  std::vector<double> means;
  std::uint64_t seed = 0;
  int starts = 0;
  int converged_starts = 0;
  std::vector<int> dims;
  bool bound_hit = false;
  double wall_seconds = 0.0;

  fock::KetVector core_state() const;
  /// Public parameter vector (layout above) reproducing this record.
  std::vector<double> parameters() const;
  /// Normalized single-mode factor (0 or 1) of a factorized core.
  Eigen::VectorXcd factor(int which) const;

  bool operator==(const OptimizationRecord&) const = default;
};

/// Objective over the public parameter layout.
class Objective {
 public:
  Objective(AnsatzSpec ansatz, double kappa, const OptimizerConfig& config = {});

  const AnsatzSpec& ansatz() const { return ansatz_; }
  double kappa() const { return kappa_; }

  /// Variance of the normalized state. Throws std::invalid_argument for a
  /// wrong length or lambda outside the configured bounds.
  double operator()(std::span<const double> params);
  VarianceReport report(std::span<const double> params);

  /// Unnormalized core amplitudes encoded by params.
  Eigen::VectorXcd core(std::span<const double> params) const;
  /// Unnormalized single-mode factors (factorized families only).
  std::pair<Eigen::VectorXcd, Eigen::VectorXcd> factors(std::span<const double> params) const;
  GaussianParams gaussian(std::span<const double> params) const;

  /// Parameters reproducing a given core and Gaussian layer. The core must be
  /// representable by the ansatz (a product state for factorized families).
  std::vector<double> encode(const Eigen::VectorXcd& factor1, const Eigen::VectorXcd& factor2, const GaussianParams& g) const;
  std::vector<double> encode(const Eigen::VectorXcd& core, const GaussianParams& g) const;

 private:
  void check(std::span<const double> params) const;
  Eigen::VectorXcd decode_factor(std::span<const double> params, std::size_t& pos, int dim) const;

  AnsatzSpec ansatz_;
  double kappa_;
  double lambda_min_, lambda_max_;
  VarianceEvaluator evaluator_;
};

/// Free-function form; builds an Objective per call.
double objective(std::span<const double> params, const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config = {});

struct SearchExtras {
  std::optional<double> v_g;                      // benchmark to use instead of recomputing
  std::vector<std::vector<double>> warm_starts;   // public-layout points searched before random starts
};

/// Best record over config.starts seeded local searches plus any warm starts.
/// Throws NumericalError when no local search converged.
OptimizationRecord minimize(const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config,
                            const SearchExtras& extras = {});

/// Applies the canonical gauge to a parameter vector without changing its
/// objective value: canonical Gaussian angles, normalized factors and first
/// significant coefficient of each factor (or of the entangled core) real
/// and non-negative.
std::vector<double> gauge_fixed(const Objective& objective, std::span<const double> params);

struct InvariantViolation {
  std::size_t first = 0;
  std::size_t second = 0;
  std::string quantity;
  double first_value = 0.0;
  double second_value = 0.0;
};

struct InvariantReport {
  std::vector<InvariantViolation> violations;
  bool passed() const { return violations.empty(); }
  std::string to_string() const;
};

/// Compares I1, I2, lambda1/lambda2, kappa/lambda1^3, kappa/lambda2^3 and
/// the gauge-fixed cores between every pair of records (relative tolerance
/// for the scalars, absolute for amplitudes).
InvariantReport check_invariants(const std::vector<OptimizationRecord>& records, double tolerance = 2e-2);

struct SweepResult {
  std::vector<OptimizationRecord> records;
  std::vector<bool> local_minimum;  // R_V below both neighbours

  /// "kappa,r_v,v_ng,v_g,local_minimum" rows in kappa order.
  std::string to_csv() const;
};

/// minimize at each kappa, warm-started from the previous optimum.
SweepResult sweep(const AnsatzSpec& ansatz, const std::vector<double>& kappas, const OptimizerConfig& config);

}  // namespace mmgate

#endif  // MMGATE_OPTIMIZER_HPP
