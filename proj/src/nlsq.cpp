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

#include "mmgate/nlsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mmgate {

double bounded_lambda(double u, double lo, double hi) {
  const double a = std::log(lo), b = std::log(hi);
  return std::exp(0.5 * (a + b) + 0.5 * (b - a) * std::sin(u));
}

double unbounded_lambda(double lambda, double lo, double hi) {
  const double a = std::log(lo), b = std::log(hi);
  const double s = (std::log(lambda) - 0.5 * (a + b)) / (0.5 * (b - a));
  return std::asin(std::clamp(s, -1.0, 1.0));
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::remainder(theta, two_pi);  // [-pi, pi]
  if (t <= -std::numbers::pi) t += two_pi;
  return t;
}

GaugeMove canonical_processing(GaussianParams& g, bool allow_second_parity) {
  constexpr double pi = std::numbers::pi;
  GaugeMove move;
  // R(t2) D R(t1) = R(t2 - pi/2) swap(D) R(t1 + pi/2).
  double t2 = wrap_angle(g.theta2);
  while (t2 > pi / 4) {
    t2 -= pi / 2;
    g.theta1 += pi / 2;
    std::swap(g.lambda1, g.lambda2);
  }
  while (t2 <= -pi / 4) {
    t2 += pi / 2;
    g.theta1 -= pi / 2;
    std::swap(g.lambda1, g.lambda2);
  }
  g.theta2 = t2;
  // R(t + pi) = -R(t), the total parity.
  double t1 = wrap_angle(g.theta1);
  if (t1 > pi / 2) {
    t1 -= pi;
    move.total_parity = true;
  } else if (t1 <= -pi / 2) {
    t1 += pi;
    move.total_parity = true;
  }
  // Parity of mode 2 maps p'_2 to -p'_2 and flips both angles.
  if (allow_second_parity && (t1 < 0.0 || (t1 == 0.0 && g.theta2 < 0.0))) {
    t1 = -t1;
    g.theta2 = -g.theta2;
    move.second_parity = true;
  }
  g.theta1 = t1;
  return move;
}

namespace {

int operator_degree(const Polynomial& v) {
  // Conjugation by a general linear map spreads a term of total degree k over
  // every mode, so the per-mode degree of the image is bounded by k.
  return std::max(1, v.degree() - 1);
}

bool same_transform(const SymplecticTransform& a, const SymplecticTransform& b) {
  return a.matrix() == b.matrix() && a.displacement() == b.displacement();
}

}  // namespace

VarianceEvaluator::VarianceEvaluator(fock::FockBasis core, Polynomial v, double kappa)
    : v_(std::move(v)), kappa_(kappa), quadratures_(gradient_polys(v_)), table_(std::move(core), operator_degree(v_)) {
  if (v_.modes() != table_.core().modes()) {
    throw std::invalid_argument("VarianceEvaluator: Hamiltonian and basis have different mode counts");
  }
}

const std::vector<Eigen::MatrixXcd>& VarianceEvaluator::operators(const SymplecticTransform& transform) {
  if (transform.modes() != v_.modes()) throw std::invalid_argument("VarianceEvaluator: transform mode count mismatch");
  if (cached_transform_ && same_transform(*cached_transform_, transform)) return cached_ops_;
  cached_ops_.clear();
  const auto rows = static_cast<Eigen::Index>(table_.target().size());
  const auto cols = static_cast<Eigen::Index>(table_.core().size());
  for (const auto& q : quadratures_) {
    const Polynomial image = conjugate(q, transform);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
    for (const auto& [e, c] : image.terms()) m += c * table_.monomial(e);
    cached_ops_.push_back(std::move(m));
  }
  cached_transform_ = transform;
  return cached_ops_;
}

VarianceReport VarianceEvaluator::evaluate(const Eigen::VectorXcd& core_amplitudes, const SymplecticTransform& transform) {
  if (static_cast<std::size_t>(core_amplitudes.size()) != table_.core().size()) {
    throw std::invalid_argument("VarianceEvaluator: amplitude count mismatch");
  }
  const double norm = core_amplitudes.squaredNorm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("VarianceEvaluator: state has zero or non-finite norm");
  const auto& ops = operators(transform);
  const Eigen::VectorXcd embedded = table_.embed(core_amplitudes);

  VarianceReport report;
  report.kappa = kappa_;
  for (const auto& m : ops) {
    const Eigen::VectorXcd phi = m * core_amplitudes;
    const double mean = embedded.dot(phi).real() / norm;
    // ||(O - d)psi||^2 stays non-negative under rounding.
    const double var = (phi - mean * embedded).squaredNorm() / norm;
    report.means.push_back(mean);
    report.per_mode.push_back(var);
    report.total += var;
  }
  return report;
}

double VarianceEvaluator::total(const Eigen::VectorXcd& core_amplitudes, const SymplecticTransform& transform) {
  return evaluate(core_amplitudes, transform).total;
}

VarianceReport nonlinear_variance(const fock::KetVector& state, const Polynomial& v, const SymplecticTransform& transform,
                                  double kappa) {
  state.require_normalized();
  if (!v.is_x_only()) throw std::invalid_argument("nonlinear_variance: Hamiltonian must contain x symbols only");
  VarianceEvaluator evaluator(state.basis(), v, kappa);
  auto report = evaluator.evaluate(state.amplitudes(), transform);
  report.setup = "state";
  return report;
}

BenchmarkResult gaussian_benchmark(double kappa, const OptimizerConfig& config) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("gaussian_benchmark: kappa must be >= 0");
  config.validate();
  const double lo = config.lambda_min, hi = config.lambda_max;
  VarianceEvaluator evaluator(fock::FockBasis({1, 1}), two_mode_cubic(kappa), kappa);
  const Eigen::VectorXcd vacuum = Eigen::VectorXcd::Ones(1);

  auto decode = [&](std::span<const double> u) {
    return GaussianParams{u[0], bounded_lambda(u[1], lo, hi), bounded_lambda(u[2], lo, hi), u[3]};
  };
  const ObjectiveFn f = [&](std::span<const double> u) { return evaluator.total(vacuum, decode(u).transform()); };

  BenchmarkResult best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_u;
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> log_lambda(std::log(lo), std::log(hi));
  for (int s = 0; s < config.benchmark_starts; ++s) {
    std::vector<double> u(4);
    if (s == 0) {
      u = {0.0, unbounded_lambda(1.0, lo, hi), unbounded_lambda(1.0, lo, hi), 0.0};
    } else {
      std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(s), std::uint64_t{0x6265}};
      std::mt19937_64 rng(seq);
      u[0] = angle(rng);
      u[1] = unbounded_lambda(std::exp(log_lambda(rng)), lo, hi);
      u[2] = unbounded_lambda(std::exp(log_lambda(rng)), lo, hi);
      u[3] = angle(rng);
    }
    const auto r = bfgs_minimize(f, u, config);
    if (!r.converged) continue;
    ++best.converged_starts;
    if (r.value < best_value) {
      best_value = r.value;
      best_u = r.x;
    }
  }
  if (best.converged_starts == 0) throw NumericalError("gaussian_benchmark: no local search converged");

  best.params = decode(best_u);
  canonical_processing(best.params);  // the vacuum is invariant under both parities
  best.report = evaluator.evaluate(vacuum, best.params.transform());
  best.report.setup = "gaussian-benchmark";
  auto at_bound = [&](double l) { return l <= lo * (1.0 + 1e-6) || l >= hi * (1.0 - 1e-6); };
  best.bound_hit = at_bound(best.params.lambda1) || at_bound(best.params.lambda2);
  return best;
}

double relative_variance(const VarianceReport& state_report, const VarianceReport& benchmark) {
  const double scale = std::max({1.0, std::abs(state_report.kappa), std::abs(benchmark.kappa)});
  if (std::abs(state_report.kappa - benchmark.kappa) > 1e-12 * scale) {
    throw std::invalid_argument("relative_variance: reports were computed for different kappa");
  }
  if (!(benchmark.total > 0.0)) throw NumericalError("relative_variance: benchmark variance is not positive");
  return state_report.total / benchmark.total;
}

}  // namespace mmgate
