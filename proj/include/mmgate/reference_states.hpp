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

#ifndef MMGATE_REFERENCE_STATES_HPP
#define MMGATE_REFERENCE_STATES_HPP

// The eight tabulated optimal resource states for kappa x1 x2^2 (amplitudes
// rounded to two decimals) and their comparison with fresh optimizer runs.
// The squeezed entries carry no kappa; they are reproduced at kappa = 1.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmgate/bfgs.hpp"
#include "mmgate/nlsq.hpp"
#include "mmgate/optimizer.hpp"

namespace mmgate {

struct ReferenceState {
  std::string name;
  AnsatzSpec ansatz;
  double kappa = 0.0;
  GaussianParams gaussian;
  Eigen::VectorXcd factor1;  // factorized entries
  Eigen::VectorXcd factor2;
  Eigen::VectorXcd core;     // entangled entries, as tabulated (not normalized)

  double tolerance = 0.03;              // on every compared parameter
  std::optional<double> quoted_r_v;     // checked to +-0.02
  std::optional<double> variance_match; // relative gap allowed between found and tabulated V_NG

  /// Normalized core over ansatz.core_basis().
  fock::KetVector state() const;
};

const std::vector<ReferenceState>& reference_states();
const ReferenceState& reference_state(const std::string& name);

struct ParameterDeviation {
  std::string parameter;
  double tabulated = 0.0;
  double found = 0.0;
};

struct ReferenceComparison {
  OptimizationRecord found;
  double tabulated_variance = 0.0;   // the rounded tabulated state, normalized
  std::vector<ParameterDeviation> parameters;

  double max_deviation() const;
  const ParameterDeviation& worst() const;
  bool variance_consistent(double slack = 1e-6) const { return tabulated_variance >= found.v_ng - slack; }
  bool parameters_match(double tolerance = 0.03) const { return max_deviation() <= tolerance; }
};

struct ReferenceCheck {
  std::string what;
  bool passed = false;
  std::string detail;
};

/// Every check that applies to the entry: tabulated variance not below the
/// found one, parameters within tolerance, and the quoted figures if any.
std::vector<ReferenceCheck> reference_checks(const ReferenceState& entry, const ReferenceComparison& comparison);

/// Variance of the tabulated state at its kappa.
VarianceReport evaluate_reference(const ReferenceState& entry);

/// Optimizes the entry's ansatz and lines up the found optimum with the
/// tabulated parameters: Gaussian angles and squeezing directly, amplitudes
/// after normalization and a global phase fitted to the found core.
ReferenceComparison compare_reference(const ReferenceState& entry, const OptimizerConfig& config);

}  // namespace mmgate

#endif  // MMGATE_REFERENCE_STATES_HPP
