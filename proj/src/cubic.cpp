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

#include "mmgate/cubic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mmgate/nlsq.hpp"

namespace mmgate {

namespace {

using Complex = std::complex<double>;

void fix_phase(Eigen::VectorXcd& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-9) {
      v *= std::conj(v(k)) / std::abs(v(k));
      return;
    }
  }
}

Polynomial cubic(double t) { return Polynomial::monomial(1, {3, 0}, t); }

std::mt19937_64 seeded(const OptimizerConfig& config, int index, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(index), tag};
  return std::mt19937_64(seq);
}

}  // namespace

GammaState gamma_state(int n, double strength, const OptimizerConfig& config) {
  if (n < 1) throw std::invalid_argument("gamma_state: cutoff N must be >= 1");
  if (!std::isfinite(strength)) throw std::invalid_argument("gamma_state: strength must be finite");
  config.validate();
  const fock::FockBasis basis({n + 1});
  VarianceEvaluator evaluator(basis, cubic(strength), strength);
  const auto identity = SymplecticTransform::identity(1);
  auto decode = [&](std::span<const double> u) {
    Eigen::VectorXcd a(n + 1);
    for (int k = 0; k <= n; ++k) a(k) = {u[2 * static_cast<std::size_t>(k)], u[2 * static_cast<std::size_t>(k) + 1]};
    return a;
  };
  const ObjectiveFn f = [&](std::span<const double> u) { return evaluator.total(decode(u), identity); };

  std::vector<std::vector<double>> starts;
  {
    // Var = min_d |(O - d) psi|^2, so the lowest eigenvector of
    // (O - d)^dag (O - d) at the best d on a grid is a near-global start.
    const Eigen::MatrixXcd& op = evaluator.operators(identity)[0];
    const double reach = op.operatorNorm();
    auto lowest = [&](double d) {
      Eigen::MatrixXcd b = op;
      for (int k = 0; k <= n; ++k) b(k, k) -= d;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b.adjoint() * b);
      return std::make_pair(es.eigenvalues()(0), Eigen::VectorXcd(es.eigenvectors().col(0)));
    };
    const int grid = 400;
    double best_d = 0.0, best_l = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= grid; ++k) {
      const double d = -reach + 2.0 * reach * k / grid;
      const double l = lowest(d).first;
      if (l < best_l) {
        best_l = l;
        best_d = d;
      }
    }
    const auto v = lowest(best_d).second;
    std::vector<double> u;
    for (int k = 0; k <= n; ++k) {
      u.push_back(v(k).real());
      u.push_back(v(k).imag());
    }
    starts.push_back(std::move(u));
  }
  std::normal_distribution<double> normal;
  for (int s = 1; s < config.benchmark_starts; ++s) {
    auto rng = seeded(config, s, 0x67616d);
    std::vector<double> u(2 * static_cast<std::size_t>(n + 1));
    for (auto& v : u) v = normal(rng);
    starts.push_back(std::move(u));
  }

  GammaState best{fock::KetVector::vacuum(basis), strength, std::numeric_limits<double>::infinity(), 0};
  std::vector<double> best_u;
  for (const auto& u : starts) {
    const auto r = bfgs_minimize(f, u, config);
    if (!r.converged) continue;
    ++best.converged_starts;
    if (r.value < best.variance) {
      best.variance = r.value;
      best_u = r.x;
    }
  }
  if (best.converged_starts == 0) throw NumericalError("gamma_state: no local search converged");
  Eigen::VectorXcd a = decode(best_u).normalized();
  fix_phase(a);
  best.state = fock::KetVector(basis, a);
  best.variance = evaluator.total(a, identity);
  return best;
}

double overlap_audit(const fock::KetVector& gamma, const OptimizationRecord& record, int which) {
  const Eigen::VectorXcd f = record.factor(which);
  const Eigen::VectorXcd& g = gamma.amplitudes();
  if (gamma.basis().modes() != 1 || f.size() != g.size()) {
    throw std::invalid_argument("overlap_audit: gamma and the record factor have different cutoffs");
  }
  Eigen::VectorXcd flipped = f;
  for (Eigen::Index k = 1; k < f.size(); k += 2) flipped(k) = -flipped(k);
  const double gn = g.squaredNorm();
  double best = 0.0;
  for (const Eigen::VectorXcd* v : {&f, static_cast<const Eigen::VectorXcd*>(&flipped)}) {
    best = std::max(best, std::norm(g.dot(*v)) / (gn * v->squaredNorm()));
    best = std::max(best, std::norm(g.dot(v->conjugate())) / (gn * v->squaredNorm()));
  }
  return best;
}

OverlapMatch match_gamma_strength(const OptimizationRecord& record, int which, double lo, double hi,
                                  const OptimizerConfig& config) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("match_gamma_strength: need 0 < lo < hi");
  const int n = static_cast<int>(record.factor(which).size()) - 1;
  if (n < 1) throw std::invalid_argument("match_gamma_strength: the factor is the vacuum");
  std::map<double, double> seen;
  auto overlap = [&](double log_t) {
    auto it = seen.find(log_t);
    if (it != seen.end()) return it->second;
    const double v = overlap_audit(gamma_state(n, std::exp(log_t), config).state, record, which);
    seen.emplace(log_t, v);
    return v;
  };
  // coarse grid, then golden section around the best grid point
  const int grid = 12;
  const double a0 = std::log(lo), b0 = std::log(hi), h = (b0 - a0) / (grid - 1);
  int best = 0;
  for (int k = 0; k < grid; ++k)
    if (overlap(a0 + k * h) > overlap(a0 + best * h)) best = k;
  double a = a0 + std::max(0, best - 1) * h, b = a0 + std::min(grid - 1, best + 1) * h;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  while (b - a > 1e-4) {
    if (overlap(c) > overlap(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  OverlapMatch m;
  for (const auto& [log_t, v] : seen) {
    if (v > m.overlap) m = {std::exp(log_t), v};
  }
  return m;
}

Polynomial limit_exponent(double t, double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw std::invalid_argument("limit_exponent: squeezing must be positive");
  const Polynomial g = Polynomial::monomial(2, {3, 0, 0, 0}, t) + Polynomial::monomial(2, {0, 0, 3, 0}, t);
  // U e^{-iG(x)} U^dag = e^{-iG(U x U^dag)}, and U x U^dag is the Heisenberg
  // image under U^{-1} = U_BS(pi/4)^{-1} S^{-1}.
  const auto inverse = beam_splitter(2, -std::numbers::pi / 4, 0, 1) * squeezer(2, 1.0 / lambda1, 0) *
                       squeezer(2, 1.0 / lambda2, 1);
  return conjugate(g, inverse);
}

void CubicLimitConfig::validate() const {
  if (!std::isfinite(t)) throw std::invalid_argument("cubic limit: t must be finite");
  if (n < 1) throw std::invalid_argument("cubic limit: N must be >= 1");
  if (lambda1.empty()) throw std::invalid_argument("cubic limit: no lambda1 values");
  for (double l : lambda1)
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("cubic limit: lambda1 values must be positive");
  if (!constrained && (!(lambda2 > 0.0) || !std::isfinite(lambda2))) {
    throw std::invalid_argument("cubic limit: lambda2 must be positive");
  }
}

double CubicLimitCurve::monotone_span() const {
  if (points.empty()) return 1.0;
  std::size_t last = 0;
  while (last + 1 < points.size() && !points[last + 1].floor) ++last;
  return points.front().lambda1 / points[last].lambda1;
}

std::string CubicLimitCurve::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(12) << "lambda1,lambda2,kappa,variance,truncation_floor\n";
  for (const auto& p : points) {
    out << p.lambda1 << ',' << p.lambda2 << ',' << p.kappa << ',' << p.variance << ',' << (p.floor ? 1 : 0) << '\n';
  }
  return out.str();
}

CubicLimitCurve cubic_pair_limit(const CubicLimitConfig& limit, const OptimizerConfig& config) {
  limit.validate();
  const auto gamma = gamma_state(limit.n, limit.t, config);
  const Eigen::VectorXcd& g = gamma.state.amplitudes();
  const auto pair = fock::KetVector::product({g, g});
  const double tp = limit.t / (2.0 * std::numbers::sqrt2);

  std::vector<double> lambdas = limit.lambda1;
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

  CubicLimitCurve curve;
  curve.gamma_variance = gamma.variance;
  bool floor = false;
  for (double l1 : lambdas) {
    LimitPoint p;
    p.lambda1 = l1;
    p.lambda2 = limit.constrained ? 1.0 / std::sqrt(l1) : limit.lambda2;
    p.kappa = 6.0 * tp * l1 * p.lambda2 * p.lambda2;
    p.residual = 2.0 * tp * l1 * l1 * l1;
    const auto report = nonlinear_variance(pair, two_mode_cubic(p.kappa),
                                           gaussian_processing(std::numbers::pi / 4, l1, p.lambda2, 0.0), p.kappa);
    p.variance = report.total;
    p.per_mode = report.per_mode;
    if (!curve.points.empty() && !(p.variance < curve.points.back().variance)) floor = true;
    p.floor = floor;
    curve.points.push_back(std::move(p));
  }
  return curve;
}

// ---------------------------------------------------------------------------

namespace {

OptimizationRecord fit_layer(const fock::KetVector& core, double kappa, const OptimizerConfig& config, double v_g,
                             const std::vector<GaussianParams>& warm) {
  const auto t0 = std::chrono::steady_clock::now();
  if (core.basis().modes() != 2) throw std::invalid_argument("fit_gaussian_layer: core must have two modes");
  const double lo = config.lambda_min, hi = config.lambda_max;
  VarianceEvaluator evaluator(core.basis(), two_mode_cubic(kappa), kappa);
  const Eigen::VectorXcd& c = core.amplitudes();
  auto decode = [&](std::span<const double> u) {
    return GaussianParams{wrap_angle(u[0]), bounded_lambda(u[1], lo, hi), bounded_lambda(u[2], lo, hi), wrap_angle(u[3])};
  };
  const ObjectiveFn f = [&](std::span<const double> u) { return evaluator.total(c, decode(u).transform()); };

  std::vector<std::vector<double>> starts;
  auto push = [&](const GaussianParams& g) {
    starts.push_back({g.theta1, unbounded_lambda(g.lambda1, lo, hi), unbounded_lambda(g.lambda2, lo, hi), g.theta2});
  };
  for (const auto& g : warm) push(g);
  push(GaussianParams{});
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> log_lambda(std::log(lo), std::log(hi));
  for (int s = 1; s < config.benchmark_starts; ++s) {
    auto rng = seeded(config, s, 0x666974);
    const double th1 = angle(rng), l1 = std::exp(log_lambda(rng)), l2 = std::exp(log_lambda(rng)), th2 = angle(rng);
    push(GaussianParams{th1, l1, l2, th2});
  }

  int converged = 0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_u;
  for (const auto& u : starts) {
    const auto r = bfgs_minimize(f, u, config);
    if (!r.converged) continue;
    ++converged;
    if (r.value < best_value) {
      best_value = r.value;
      best_u = r.x;
    }
  }
  if (converged == 0) throw NumericalError("fit_gaussian_layer: no local search converged");

  OptimizationRecord rec;
  rec.kappa = kappa;
  rec.ansatz.family = AnsatzFamily::Factorized;
  rec.ansatz.m = core.basis().dim(0) - 1;
  rec.ansatz.n = core.basis().dim(1) - 1;
  rec.ansatz.layers = GaussianLayers::Full;
  rec.gaussian = decode(best_u);
  rec.core.assign(c.data(), c.data() + c.size());
  const auto report = evaluator.evaluate(c, rec.gaussian.transform());
  rec.v_ng = report.total;
  rec.per_mode = report.per_mode;
  rec.means = report.means;
  rec.v_g = v_g;
  rec.r_v = rec.v_ng / v_g;
  const double l1 = rec.gaussian.lambda1, l2 = rec.gaussian.lambda2;
  rec.i1 = kappa / (l1 * l1 * l2);
  rec.i2 = kappa / (l1 * l2 * l2);
  rec.seed = config.seed;
  rec.starts = static_cast<int>(starts.size());
  rec.converged_starts = converged;
  rec.dims = core.basis().dims();
  auto at_bound = [&](double l) { return l <= lo * (1.0 + 1e-6) || l >= hi * (1.0 - 1e-6); };
  rec.bound_hit = at_bound(l1) || at_bound(l2);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

struct ScenarioPoint {
  OptimizationRecord record;
  double gamma_variance = 0.0;
};

CubicScenario scenario(int n, bool pair, const OptimizerConfig& config, const ScenarioOptions& options) {
  if (n < 0) throw std::invalid_argument("cubic scenario: N must be >= 0");
  if (!(options.kappa_min > 0.0) || !(options.kappa_max > options.kappa_min) || options.grid < 3 ||
      !(options.log_tolerance > 0.0)) {
    throw std::invalid_argument("cubic scenario: invalid kappa range options");
  }
  config.validate();
  std::map<double, ScenarioPoint> seen;
  std::vector<GaussianParams> warm;
  auto evaluate = [&](double log_k) -> const ScenarioPoint& {
    auto it = seen.find(log_k);
    if (it != seen.end()) return it->second;
    const double kappa = std::exp(log_k);
    Eigen::VectorXcd g = Eigen::VectorXcd::Ones(1);
    double gv = 0.5;
    if (n > 0) {
      const auto gamma = gamma_state(n, kappa, config);
      g = gamma.state.amplitudes();
      gv = gamma.variance;
    }
    const auto core = fock::KetVector::product({g, pair ? g : Eigen::VectorXcd(Eigen::VectorXcd::Ones(1))});
    const double v_g = gaussian_benchmark(kappa, config).report.total;
    ScenarioPoint p{fit_layer(core, kappa, config, v_g, warm), gv};
    warm = {p.record.gaussian};
    return seen.emplace(log_k, std::move(p)).first->second;
  };

  const double a0 = std::log(options.kappa_min), b0 = std::log(options.kappa_max);
  const double h = (b0 - a0) / (options.grid - 1);
  int best = 0;
  for (int k = 0; k < options.grid; ++k)
    if (evaluate(a0 + k * h).record.r_v < evaluate(a0 + best * h).record.r_v) best = k;
  double a = a0 + std::max(0, best - 1) * h, b = a0 + std::min(options.grid - 1, best + 1) * h;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  while (b - a > options.log_tolerance) {
    if (evaluate(c).record.r_v < evaluate(d).record.r_v) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }

  CubicScenario out;
  const ScenarioPoint* top = nullptr;
  for (const auto& [log_k, p] : seen) {
    out.scan.emplace_back(std::exp(log_k), p.record.r_v);
    if (!top || p.record.r_v < top->record.r_v) top = &p;
  }
  out.record = top->record;
  out.gamma_variance = top->gamma_variance;
  return out;
}

}  // namespace

OptimizationRecord fit_gaussian_layer(const fock::KetVector& core, double kappa, const OptimizerConfig& config) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("fit_gaussian_layer: kappa must be >= 0");
  config.validate();
  return fit_layer(core, kappa, config, gaussian_benchmark(kappa, config).report.total, {});
}

CubicScenario single_cubic_scenario(int n, const OptimizerConfig& config, const ScenarioOptions& options) {
  return scenario(n, false, config, options);
}

CubicScenario cubic_pair_scenario(int n, const OptimizerConfig& config, const ScenarioOptions& options) {
  return scenario(n, true, config, options);
}

}  // namespace mmgate
