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

#include "mmgate/reference_states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace mmgate {

namespace {

using Complex = std::complex<double>;
constexpr Complex I{0.0, 1.0};

Eigen::VectorXcd vec(std::initializer_list<Complex> v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (const auto& c : v) out(k++) = c;
  return out;
}

ReferenceState passive(std::string name, int m, int n, double kappa, double theta, Eigen::VectorXcd f1, Eigen::VectorXcd f2) {
  ReferenceState r;
  r.name = std::move(name);
  r.ansatz.family = AnsatzFamily::SimplifiedPassive;
  r.ansatz.m = m;
  r.ansatz.n = n;
  r.kappa = kappa;
  r.gaussian = {theta, 1.0, 1.0, 0.0};
  r.factor1 = std::move(f1);
  r.factor2 = std::move(f2);
  return r;
}

ReferenceState full_factorized(std::string name, int m, GaussianParams g, Eigen::VectorXcd f1) {
  ReferenceState r;
  r.name = std::move(name);
  r.ansatz.family = AnsatzFamily::Factorized;
  r.ansatz.m = m;
  r.ansatz.n = 0;
  r.ansatz.layers = GaussianLayers::Full;
  r.kappa = 1.0;
  r.gaussian = g;
  r.factor1 = std::move(f1);
  r.factor2 = vec({1.0});
  return r;
}

ReferenceState entangled(std::string name, int m, GaussianParams g, Eigen::VectorXcd core) {
  ReferenceState r;
  r.name = std::move(name);
  r.ansatz.family = AnsatzFamily::Entangled;
  r.ansatz.m = m;
  r.ansatz.n = m;
  r.ansatz.layers = GaussianLayers::Full;
  r.kappa = 1.0;
  r.gaussian = g;
  r.core = std::move(core);
  return r;
}

std::vector<ReferenceState> build() {
  const double q = std::numbers::pi / 4;
  const auto one = vec({1.0});
  std::vector<ReferenceState> states{
      passive("passive-1-0", 1, 0, 0.46, 0.86, vec({0.8, 0.58 * I}), one),
      passive("passive-2-0", 2, 0, 0.38, 0.87, vec({0.47, 0.78 * I, -0.4}), one),
      passive("passive-1-1", 1, 1, 0.38, q, vec({0.82, 0.57 * I}), vec({0.82, 0.57 * I})),
      passive("passive-2-2", 2, 2, 0.29, q, vec({0.51, 0.76 * I, -0.38}), vec({0.51, 0.76 * I, -0.38})),
      full_factorized("full-1-0", 1, {1.07, 1.04, 1.47, -0.16}, vec({0.8, 0.59 * I})),
      full_factorized("full-2-0", 2, {1.14, 1.04, 1.47, -0.22}, vec({0.47, 0.77 * I, -0.41})),
      entangled("entangled-1x1", 1, {q, 1.06, 1.58, 0.0}, vec({0.7, 0.42 * I, 0.42 * I, -0.38})),
      entangled("entangled-2x2", 2, {q, 1.07, 1.79, 0.0},
                vec({0.33, 0.36 * I, -0.11, 0.36 * I, -0.59, -0.3 * I, -0.11, -0.3 * I, 0.21})),
  };
  states[0].quoted_r_v = 0.94;
  states[0].variance_match = 0.01;
  states[2].quoted_r_v = 0.84;
  states[2].tolerance = 0.02;
  return states;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Tabulated amplitudes normalized and rotated by the global phase that best
// matches the found ones.
void compare_amplitudes(const std::string& label, Eigen::VectorXcd tab, const Eigen::VectorXcd& found,
                        std::vector<ParameterDeviation>& out) {
  tab.normalize();
  const Complex overlap = tab.dot(found);  // <tab|found>
  if (std::abs(overlap) > 0.0) tab *= overlap / std::abs(overlap);
  for (Eigen::Index k = 0; k < tab.size(); ++k) {
    const std::string name = label + "[" + std::to_string(k) + "]";
    out.push_back({name + ".re", tab(k).real(), found(k).real()});
    out.push_back({name + ".im", tab(k).imag(), found(k).imag()});
  }
}

}  // namespace

fock::KetVector ReferenceState::state() const {
  if (ansatz.factorized()) return fock::KetVector::product({factor1.normalized(), factor2.normalized()});
  return fock::KetVector(ansatz.core_basis(), core.normalized());
}

const std::vector<ReferenceState>& reference_states() {
  static const std::vector<ReferenceState> states = build();
  return states;
}

const ReferenceState& reference_state(const std::string& name) {
  for (const auto& s : reference_states())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown reference state '" + name + "'");
}

double ReferenceComparison::max_deviation() const { return std::abs(worst().found - worst().tabulated); }

const ParameterDeviation& ReferenceComparison::worst() const {
  if (parameters.empty()) throw std::logic_error("ReferenceComparison: nothing compared");
  return *std::max_element(parameters.begin(), parameters.end(), [](const auto& a, const auto& b) {
    return std::abs(a.found - a.tabulated) < std::abs(b.found - b.tabulated);
  });
}

std::vector<ReferenceCheck> reference_checks(const ReferenceState& entry, const ReferenceComparison& c) {
  std::vector<ReferenceCheck> out;
  out.push_back({"variance", c.variance_consistent(),
                 "tabulated " + fixed(c.tabulated_variance, 6) + " vs found " + fixed(c.found.v_ng, 6)});
  const auto& w = c.worst();
  out.push_back({"parameters", c.parameters_match(entry.tolerance),
                 w.parameter + " " + fixed(w.tabulated, 3) + " vs " + fixed(w.found, 3) + " (tolerance " +
                     fixed(entry.tolerance, 2) + ")"});
  if (entry.quoted_r_v) {
    out.push_back({"r_v", std::abs(c.found.r_v - *entry.quoted_r_v) <= 0.02 + 1e-12,
                   fixed(c.found.r_v) + " vs " + fixed(*entry.quoted_r_v, 2) + " +- 0.02"});
  }
  if (entry.variance_match) {
    const double gap = std::abs(c.found.v_ng - c.tabulated_variance) / c.tabulated_variance;
    out.push_back({"v_ng", gap <= *entry.variance_match,
                   "relative gap " + fixed(gap, 5) + " (allowed " + fixed(*entry.variance_match, 3) + ")"});
  }
  return out;
}

VarianceReport evaluate_reference(const ReferenceState& entry) {
  return nonlinear_variance(entry.state(), two_mode_cubic(entry.kappa), entry.gaussian.transform(), entry.kappa);
}

ReferenceComparison compare_reference(const ReferenceState& entry, const OptimizerConfig& config) {
  ReferenceComparison c;
  c.found = minimize(entry.ansatz, entry.kappa, config);
  c.tabulated_variance = evaluate_reference(entry).total;
  const auto& g = c.found.gaussian;
  c.parameters.push_back({"theta1", entry.gaussian.theta1, entry.gaussian.theta1 + wrap_angle(g.theta1 - entry.gaussian.theta1)});
  if (entry.ansatz.layers == GaussianLayers::Full) {
    c.parameters.push_back({"lambda1", entry.gaussian.lambda1, g.lambda1});
    c.parameters.push_back({"lambda2", entry.gaussian.lambda2, g.lambda2});
    c.parameters.push_back({"theta2", entry.gaussian.theta2, entry.gaussian.theta2 + wrap_angle(g.theta2 - entry.gaussian.theta2)});
  }
  if (entry.ansatz.factorized()) {
    compare_amplitudes("c1", entry.factor1, c.found.factor(0), c.parameters);
    if (entry.ansatz.n > 0) compare_amplitudes("c2", entry.factor2, c.found.factor(1), c.parameters);
  } else {
    const auto found = c.found.core_state().amplitudes();
    compare_amplitudes("c", entry.core, found, c.parameters);
  }
  return c;
}

}  // namespace mmgate
