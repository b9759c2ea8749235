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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mmgate/optimizer.hpp"

using namespace mmgate;

namespace {

using Complex = std::complex<double>;

OptimizerConfig config_with(int starts, std::uint64_t seed = 1) {
  OptimizerConfig c;
  c.starts = starts;
  c.seed = seed;
  c.benchmark_starts = 16;
  return c;
}

const AnsatzSpec kPassive10{AnsatzFamily::SimplifiedPassive, 1, 0, GaussianLayers::PassiveOnly};
const AnsatzSpec kPassive11{AnsatzFamily::SimplifiedPassive, 1, 1, GaussianLayers::PassiveOnly};
const AnsatzSpec kFull10{AnsatzFamily::Factorized, 1, 0, GaussianLayers::Full};
const AnsatzSpec kFull11{AnsatzFamily::Factorized, 1, 1, GaussianLayers::Full};
const AnsatzSpec kEntangled11{AnsatzFamily::Entangled, 1, 1, GaussianLayers::Full};

// Global core optimum for fixed Gaussian parameters: min over d of the lowest
// eigenvalue of sum_j (O_j - d_j)^dag (O_j - d_j) on the core, found by
// alternating eigenvector and mean updates from a grid of initial d.
double eigen_route(const AnsatzSpec& a, double kappa, const GaussianParams& g) {
  VarianceEvaluator ev(a.core_basis(), two_mode_cubic(kappa), kappa);
  fock::MonomialTable table(a.core_basis(), 2);
  const auto& ops = ev.operators(g.transform());
  const Eigen::MatrixXcd id = table.monomial(Exponents(4, 0));
  double best = 1e300;
  for (double d1 = -2.0; d1 <= 2.0; d1 += 0.5) {
    for (double d2 = -2.0; d2 <= 2.0; d2 += 0.5) {
      double d[2] = {d1, d2};
      double value = 0.0;
      for (int it = 0; it < 2000; ++it) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(id.cols(), id.cols());
        for (int j = 0; j < 2; ++j) {
          const Eigen::MatrixXcd s = ops[static_cast<std::size_t>(j)] - d[j] * id;
          m += s.adjoint() * s;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        const Eigen::VectorXcd v = es.eigenvectors().col(0);
        const double next = es.eigenvalues()(0);
        for (int j = 0; j < 2; ++j) d[j] = (id * v).dot(ops[static_cast<std::size_t>(j)] * v).real();
        if (it > 0 && std::abs(value - next) < 1e-15) break;
        value = next;
      }
      // At a fixed point the eigenvalue equals the variance sum.
      best = std::min(best, value);
    }
  }
  return best;
}

}  // namespace

TEST(AnsatzSpec, ParameterCounts) {
  EXPECT_EQ(kPassive10.parameter_count(), 4u + 1u);
  EXPECT_EQ(kFull11.parameter_count(), 8u + 4u);
  EXPECT_EQ(kEntangled11.parameter_count(), 8u + 4u);
  AnsatzSpec sym = kEntangled11;
  sym.exchange_symmetric = true;
  sym.real_up_to_phase = true;
  EXPECT_EQ(sym.parameter_count(), 3u + 4u);
}

TEST(AnsatzSpec, SimplifiedRequiresPassive) {
  AnsatzSpec a = kPassive10;
  a.layers = GaussianLayers::Full;
  EXPECT_THROW(a.validate(), std::invalid_argument);
}

TEST(AnsatzSpec, ExchangeSymmetryNeedsSquareCore) {
  AnsatzSpec a = kFull10;
  a.exchange_symmetric = true;
  EXPECT_THROW(a.validate(), std::invalid_argument);
}

TEST(Objective, VacuumCoreIdentityGaussian) {
  const AnsatzSpec vac{AnsatzFamily::Entangled, 0, 0, GaussianLayers::Full};
  const std::vector<double> p{0.0, 1.0, 1.0, 0.0};
  EXPECT_NEAR(objective(p, vac, 0.3), 1.135, 1e-14);
}

TEST(Objective, ScaleInvariance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> p(kEntangled11.parameter_count());
  for (auto& v : p) v = n(rng);
  p[9] = 1.2, p[10] = 0.7;
  const double a = objective(p, kEntangled11, 0.5);
  for (std::size_t k = 0; k < 8; ++k) p[k] *= 2.0;
  EXPECT_NEAR(objective(p, kEntangled11, 0.5), a, 1e-12 * a);
}

TEST(Objective, GlobalPhaseInvariance) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  std::vector<double> p(kEntangled11.parameter_count());
  for (auto& v : p) v = n(rng);
  p[9] = 0.9, p[10] = 1.4;
  const double a = objective(p, kEntangled11, 0.5);
  const Complex phase = std::polar(1.0, 1.234);
  for (std::size_t k = 0; k < 8; k += 2) {
    const Complex c = phase * Complex(p[k], p[k + 1]);
    p[k] = c.real(), p[k + 1] = c.imag();
  }
  EXPECT_NEAR(objective(p, kEntangled11, 0.5), a, 1e-12 * a);
}

TEST(Objective, RejectsOutOfBoundsSqueezing) {
  std::vector<double> p{1.0, 0.0, 0.0, 0.5, 0.3, 25.0, 1.0, 0.0};
  EXPECT_THROW(objective(p, kFull10, 0.5), std::invalid_argument);
  p[5] = 0.01;
  EXPECT_THROW(objective(p, kFull10, 0.5), std::invalid_argument);
}

TEST(Objective, RejectsWrongLength) {
  const std::vector<double> p{1.0, 0.0, 0.0};
  EXPECT_THROW(objective(p, kPassive10, 0.5), std::invalid_argument);
}

TEST(Objective, ZeroCoreRaises) {
  const std::vector<double> p{0.0, 0.0, 0.0, 0.0, 0.3};
  EXPECT_THROW(objective(p, kPassive10, 0.5), NumericalError);
}

TEST(Objective, EncodeDecodeRoundTrip) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  for (const auto& a : {kPassive11, kFull11, kEntangled11}) {
    Objective f(a, 0.4);
    std::vector<double> p(a.parameter_count());
    for (auto& v : p) v = n(rng);
    if (a.layers == GaussianLayers::Full) p[p.size() - 3] = 1.3, p[p.size() - 2] = 0.8;
    const auto q = f.encode(f.core(p), f.gaussian(p));
    EXPECT_NEAR(f(q), f(p), 1e-12 * f(p)) << a.label();
  }
}

TEST(Objective, GradientMatchesRichardson) {
  // Central differences at h against the four-point stencil at the same h.
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> l(0.5, 2.0);
  Objective f(kEntangled11, 0.6);
  const ObjectiveFn fn = [&](std::span<const double> x) { return f(x); };
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(f.ansatz().parameter_count());
    for (auto& v : x) v = n(rng);
    x[9] = l(rng), x[10] = l(rng);
    const auto g = central_gradient(fn, x, OptimizerConfig{}.fd_step);
    double scale = 0.0, worst = 0.0;
    std::vector<double> w = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto at = [&](double s) {
        w[i] = x[i] + s;
        const double v = f(w);
        w[i] = x[i];
        return v;
      };
      const double r = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      scale = std::max(scale, std::abs(r));
      worst = std::max(worst, std::abs(g[i] - r));
    }
    EXPECT_LE(worst, 1e-5 * std::max(1.0, scale));
  }
}

TEST(Minimize, SinglePhotonPassive) {
  const auto r = minimize(kPassive10, 0.46, config_with(40));
  EXPECT_NEAR(r.gaussian.theta1, 0.86, 0.03);
  EXPECT_NEAR(r.core[0].real(), 0.80, 0.03);
  EXPECT_NEAR(r.core[1].imag(), 0.58, 0.03);
  EXPECT_NEAR(r.r_v, 0.94, 0.02);
  EXPECT_NEAR(r.r_v, r.v_ng / r.v_g, 1e-12);
}

TEST(Minimize, EigenRouteConfirmsCoreOptimum) {
  for (const auto& [a, kappa] : {std::pair{kPassive10, 0.46}, std::pair{kEntangled11, 1.0}}) {
    const auto r = minimize(a, kappa, config_with(30));
    const double oracle = eigen_route(a, kappa, r.gaussian);
    EXPECT_NEAR(r.v_ng, oracle, 1e-7 * r.v_ng) << a.label();
  }
}

TEST(Minimize, DeterministicAcrossThreadCounts) {
  auto c1 = config_with(12, 7);
  auto c3 = c1;
  c1.threads = 1;
  c3.threads = 3;
  const auto a = minimize(kFull10, 0.8, c1), b = minimize(kFull10, 0.8, c3);
  EXPECT_EQ(a.v_ng, b.v_ng);
  ASSERT_EQ(a.core.size(), b.core.size());
  for (std::size_t k = 0; k < a.core.size(); ++k) EXPECT_EQ(a.core[k], b.core[k]);
  EXPECT_EQ(a.gaussian.theta1, b.gaussian.theta1);
  EXPECT_EQ(a.gaussian.lambda2, b.gaussian.lambda2);
}

TEST(Minimize, CoefficientsRealUpToPhotonPhase) {
  const auto basis = kEntangled11.core_basis();
  const auto r = minimize(kEntangled11, 1.0, config_with(30));
  for (std::size_t k = 0; k < r.core.size(); ++k) {
    const auto occ = basis.occupation(k);
    const Complex rotated = r.core[k] * std::pow(Complex(0, -1), occ[0] + occ[1]);
    EXPECT_LT(std::abs(rotated.imag()), 1e-3);
  }
}

TEST(Minimize, EntangledCoreIsExchangeSymmetric) {
  const auto r = minimize(kEntangled11, 1.0, config_with(30));
  EXPECT_LT(std::abs(r.core[1] - r.core[2]), 1e-3);
  EXPECT_NEAR(r.gaussian.theta1, std::numbers::pi / 4, 1e-3);
}

TEST(Minimize, SymmetryRestrictedSearchFindsSameOptimum) {
  AnsatzSpec sym = kEntangled11;
  sym.real_up_to_phase = true;
  sym.exchange_symmetric = true;
  const auto full = minimize(kEntangled11, 1.0, config_with(30));
  const auto restricted = minimize(sym, 1.0, config_with(30));
  EXPECT_NEAR(restricted.v_ng, full.v_ng, 1e-8 * full.v_ng);
  for (std::size_t k = 0; k < full.core.size(); ++k) EXPECT_LT(std::abs(restricted.core[k] - full.core[k]), 1e-4);
}

TEST(Minimize, ResourceOrdering) {
  const double kappa = 1.0;
  const auto cfg = config_with(30);
  const double single = minimize(kFull10, kappa, cfg).r_v;
  const double factorized = minimize(kFull11, kappa, cfg).r_v;
  const double entangled = minimize(kEntangled11, kappa, cfg).r_v;
  EXPECT_LE(entangled, factorized + 1e-9);
  EXPECT_LE(factorized, single + 1e-9);
}

TEST(Minimize, NoConvergedStartRaises) {
  auto c = config_with(3);
  c.max_iters = 1;
  EXPECT_THROW(minimize(kEntangled11, 1.0, c), NumericalError);
}

TEST(Minimize, RecordCoreIsNormalized) {
  const auto r = minimize(kFull11, 0.5, config_with(10));
  double norm = 0.0;
  for (const auto& c : r.core) norm += std::norm(c);
  EXPECT_NEAR(norm, 1.0, 1e-10);
  Objective f(r.ansatz, r.kappa);
  EXPECT_NEAR(f(r.parameters()), r.v_ng, 1e-12 * r.v_ng);
}

TEST(CheckInvariants, SingleRecordPasses) {
  OptimizationRecord r;
  r.ansatz = kFull10;
  r.kappa = 0.5;
  r.i1 = r.i2 = 0.5;
  EXPECT_TRUE(check_invariants({r}).passed());
}

TEST(CheckInvariants, UniformRescalingPreservesInvariants) {
  OptimizationRecord a;
  a.ansatz = kFull10;
  a.kappa = 0.1;
  a.gaussian = {0.5, 1.1, 1.5, -0.1};
  a.core = {0.8, Complex(0, 0.6)};
  auto b = a;
  b.kappa = 0.8;
  b.gaussian.lambda1 *= 2.0;
  b.gaussian.lambda2 *= 2.0;
  for (auto* r : {&a, &b}) {
    const double l1 = r->gaussian.lambda1, l2 = r->gaussian.lambda2;
    r->i1 = r->kappa / (l1 * l1 * l2);
    r->i2 = r->kappa / (l1 * l2 * l2);
  }
  EXPECT_TRUE(check_invariants({a, b}).passed());
  b.kappa = 0.9;
  b.i1 *= 0.9 / 0.8;
  const auto report = check_invariants({a, b});
  EXPECT_FALSE(report.passed());
  EXPECT_EQ(report.violations.front().first, 0u);
  EXPECT_EQ(report.violations.front().second, 1u);
}

TEST(CheckInvariants, PassiveRecordsRejected) {
  OptimizationRecord r;
  r.ansatz = kPassive10;
  EXPECT_THROW(check_invariants({r}), std::invalid_argument);
}

TEST(CheckInvariants, OptimaAcrossKappa) {
  std::vector<OptimizationRecord> rs;
  for (double k : {0.2, 0.3, 0.4}) rs.push_back(minimize(kEntangled11, k, config_with(30)));
  const auto report = check_invariants(rs);
  EXPECT_TRUE(report.passed()) << report.to_string();
}

TEST(Sweep, PassiveCurveDipsAndMarksMinimum) {
  const auto s = sweep(kPassive10, {0.1, 0.2, 0.3, 0.4, 0.46, 0.55, 0.7, 0.9}, config_with(10));
  ASSERT_EQ(s.records.size(), 8u);
  bool dips = false;
  for (const auto& r : s.records) dips = dips || r.r_v < 1.0;
  EXPECT_TRUE(dips);
  int minima = 0;
  for (bool m : s.local_minimum) minima += m;
  EXPECT_EQ(minima, 1);
  EXPECT_EQ(s.to_csv().substr(0, 33), "kappa,r_v,v_ng,v_g,local_minimum\n");
}

TEST(Sweep, RejectsEmptyKappaList) { EXPECT_THROW(sweep(kPassive10, {}, config_with(2)), std::invalid_argument); }
