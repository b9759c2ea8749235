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
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "mmgate/fock.hpp"

using namespace mmgate;
using namespace mmgate::fock;

namespace {

// Brute-force reference: ladder matrices at a generous size, every ordering
// of every monomial multiplied out and averaged.
struct BruteForce {
  std::vector<int> big;
  std::vector<Eigen::MatrixXcd> x, p;

  explicit BruteForce(std::vector<int> dims) : big(std::move(dims)) {
    const std::size_t n = big.size();
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(big[j], big[j]);
      for (int k = 1; k < big[j]; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
      const Eigen::MatrixXcd ad = a.adjoint();
      const Eigen::MatrixXcd xs = (a + ad) / std::sqrt(2.0);
      const Eigen::MatrixXcd ps = (a - ad) / std::complex<double>(0.0, std::sqrt(2.0));
      x.push_back(embed(xs, j));
      p.push_back(embed(ps, j));
    }
  }

  Eigen::MatrixXcd embed(const Eigen::MatrixXcd& single, std::size_t mode) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t j = 0; j < big.size(); ++j) {
      const Eigen::MatrixXcd f = j == mode ? single : Eigen::MatrixXcd::Identity(big[j], big[j]);
      Eigen::MatrixXcd next(out.rows() * f.rows(), out.cols() * f.cols());
      for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
      out = next;
    }
    return out;
  }

  // Average of all words with kx copies of x and kp copies of p.
  Eigen::MatrixXcd weyl(std::size_t mode, int kx, int kp) const {
    const auto n = x[mode].rows();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    int count = 0;
    const int len = kx + kp;
    for (int mask = 0; mask < (1 << len); ++mask) {
      if (__builtin_popcount(mask) != kp) continue;
      Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(n, n);
      for (int i = 0; i < len; ++i) w = w * ((mask >> i) & 1 ? p[mode] : x[mode]);
      sum += w;
      ++count;
    }
    return sum / static_cast<double>(count);
  }

  Eigen::MatrixXcd op(const Polynomial& poly) const {
    const auto n = x[0].rows();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [e, c] : poly.terms()) {
      Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(n, n);
      for (std::size_t j = 0; j < big.size(); ++j) t = t * weyl(j, e[2 * j], e[2 * j + 1]);
      out += c * t;
    }
    return out;
  }
};

Eigen::VectorXcd random_amplitudes(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (auto& c : v) c = {g(rng), g(rng)};
  return v.normalized();
}

}  // namespace

TEST(QuadratureMatrix, LadderElement) {
  const auto x = quadrature_matrix(FockBasis({2}), 0, Quadrature::X);
  EXPECT_NEAR(x.entries()(0, 1).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(x.hermitian());
}

TEST(QuadratureMatrix, CommutatorOnInterior) {
  const FockBasis b({6});
  const auto x = quadrature_matrix(b, 0, Quadrature::X).entries();
  const auto p = quadrature_matrix(b, 0, Quadrature::P).entries();
  const Eigen::MatrixXcd c = x * p - p * x;
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 5; ++n) {
      const std::complex<double> expected = m == n ? std::complex<double>(0, 1) : 0.0;
      EXPECT_LT(std::abs(c(m, n) - expected), 1e-14);
    }
}

TEST(QuadratureMatrix, TensorStructure) {
  const FockBasis b({2, 3});
  const auto x2 = quadrature_matrix(b, 1, Quadrature::X).entries();
  const auto single = quadrature_matrix(FockBasis({3}), 0, Quadrature::X).entries();
  for (int i = 0; i < 2; ++i)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(x2(i * 3 + r, i * 3 + c), single(r, c));
  EXPECT_EQ(x2.block(0, 3, 3, 3).norm(), 0.0);
}

TEST(QuadratureMatrix, RejectsBadMode) { EXPECT_THROW(quadrature_matrix(FockBasis({2, 2}), 2, Quadrature::X), std::out_of_range); }

TEST(PolynomialOperator, VacuumSecondMoment) {
  const auto x2 = Polynomial::x(2, 1);
  const auto op = polynomial_operator(x2 * x2, FockBasis({3, 3}, 4));
  EXPECT_NEAR(op.entries()(0, 0).real(), 0.5, 1e-15);
}

TEST(PolynomialOperator, VacuumFourthMomentOnMinimalBasis) {
  const auto x2 = Polynomial::x(2, 1);
  const auto op = polynomial_operator(x2 * x2 * x2 * x2, FockBasis({1, 1}, 4));
  EXPECT_NEAR(op.entries()(0, 0).real(), 0.75, 1e-15);
}

TEST(PolynomialOperator, MatchesBruteForceReassembly) {
  const double kappa = 0.46;
  const auto poly = Polynomial::p(2, 0) + kappa * Polynomial::x(2, 1) * Polynomial::x(2, 1);
  const FockBasis basis({2, 1}, 2);
  const auto op = polynomial_operator(poly, basis);
  std::vector<Eigen::VectorXcd> f{Eigen::Vector2cd(0.8, std::complex<double>(0, 0.58)), Eigen::VectorXcd::Ones(1)};
  const auto psi = KetVector::product(f).normalized();
  const auto value = expectation(op, psi);

  const BruteForce ref({12, 11});
  const auto big = psi.embedded(FockBasis({12, 11}));
  const auto expected = big.amplitudes().dot(ref.op(poly) * big.amplitudes());
  EXPECT_LT(std::abs(value - expected), 1e-12);
}

TEST(PolynomialOperator, MixedMonomialsAreWeylOrdered) {
  std::mt19937_64 rng(7);
  Polynomial poly(2);
  poly.add_term({1, 1, 0, 0}, 0.7);
  poly.add_term({2, 1, 1, 0}, -0.3);
  poly.add_term({0, 2, 1, 1}, 1.1);
  const FockBasis basis({3, 3}, 3);
  const auto op = polynomial_operator(poly, basis);
  const BruteForce ref({13, 13});
  const Eigen::MatrixXcd full = ref.op(poly);
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < basis.size(); ++c) {
      const auto ro = basis.occupation(r), co = basis.occupation(c);
      const auto br = static_cast<Eigen::Index>(ro[0] * 13 + ro[1]), bc = static_cast<Eigen::Index>(co[0] * 13 + co[1]);
      EXPECT_LT(std::abs(op.entries()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) - full(br, bc)), 1e-12);
    }
}

TEST(PolynomialOperator, RealCoefficientsGiveHermitian) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    Polynomial poly(2);
    poly.add_term({1, 2, 0, 1}, u(rng));
    poly.add_term({0, 0, 3, 0}, u(rng));
    poly.add_term({1, 0, 1, 1}, u(rng));
    const auto op = polynomial_operator(poly, FockBasis({4, 4}, 3));
    EXPECT_TRUE(op.hermitian());
    EXPECT_LE(op.hermiticity_residual(), 1e-12);
  }
}

TEST(PolynomialOperator, ExactUnderTruncationIncrease) {
  std::mt19937_64 rng(13);
  const auto poly = Polynomial::p(2, 1) + 0.8 * Polynomial::x(2, 0) * Polynomial::x(2, 1) +
                    0.3 * Polynomial::x(2, 1) * Polynomial::x(2, 1) * Polynomial::x(2, 1);
  const FockBasis basis({3, 4}, 3);
  const KetVector psi(basis, random_amplitudes(rng, basis.size()));
  const auto a = expectation(polynomial_operator(poly * poly, FockBasis({3, 4}, 6)), psi);
  const FockBasis larger({8, 9}, 6);
  const auto b = expectation(polynomial_operator(poly * poly, larger), psi.embedded(larger));
  EXPECT_LT(std::abs(a - b), 1e-12);
}

TEST(PolynomialOperator, DegreeAboveGuardThrows) {
  const auto x = Polynomial::x(1, 0);
  EXPECT_THROW(polynomial_operator(x * x * x, FockBasis({3}, 2)), std::invalid_argument);
}

TEST(PolynomialOperator, CommutatorBelowGuard) {
  const int d = 6, guard = 1;
  const FockBasis basis({d}, guard);
  const auto x = polynomial_operator(Polynomial::x(1, 0), basis).entries();
  const auto p = polynomial_operator(Polynomial::p(1, 0), basis).entries();
  const Eigen::MatrixXcd c = x * p - p * x;
  for (int m = 0; m < d - guard; ++m)
    for (int n = 0; n < d - guard; ++n) {
      const std::complex<double> expected = m == n ? std::complex<double>(0, 1) : 0.0;
      EXPECT_LT(std::abs(c(m, n) - expected), 1e-14);
    }
}

TEST(Expectation, IdentityOnNormalizedState) {
  std::mt19937_64 rng(1);
  const FockBasis b({3, 2});
  const KetVector psi(b, random_amplitudes(rng, b.size()));
  const auto one = polynomial_operator(Polynomial::constant(2, 1.0), b);
  EXPECT_NEAR(expectation(one, psi).real(), 1.0, 1e-14);
}

TEST(Expectation, OddOperatorOnFockStateVanishes) {
  const FockBasis b({4}, 1);
  const std::vector<int> occ{1};
  EXPECT_EQ(std::abs(expectation(polynomial_operator(Polynomial::x(1, 0), b), KetVector::fock_state(b, occ))), 0.0);
}

TEST(Expectation, SecondMomentOfSuperposition) {
  // <x^2> for (|0> + |2>)/sqrt2 = (1/2 + 5/2)/2 + <0|x^2|2> = 3/2 + 1/sqrt2.
  const FockBasis b({3}, 2);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(3);
  a(0) = a(2) = 1.0 / std::sqrt(2.0);
  const auto x = Polynomial::x(1, 0);
  const auto v = expectation(polynomial_operator(x * x, b), KetVector(b, a));
  const BruteForce ref({12});
  Eigen::VectorXcd big = Eigen::VectorXcd::Zero(12);
  big(0) = big(2) = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(v.real(), big.dot(ref.x[0] * ref.x[0] * big).real(), 1e-14);
  EXPECT_NEAR(v.real(), 1.5 + 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(Expectation, BasisMismatchThrows) {
  const auto op = polynomial_operator(Polynomial::x(1, 0), FockBasis({3}, 1));
  EXPECT_THROW(expectation(op, KetVector::vacuum(FockBasis({4}))), std::invalid_argument);
}

TEST(KetVector, RequireNormalized) {
  const FockBasis b({2});
  Eigen::VectorXcd a(2);
  a << 1.0, 1.0;
  EXPECT_THROW(KetVector(b, a).require_normalized(), std::invalid_argument);
  EXPECT_NO_THROW(KetVector(b, a).normalized().require_normalized());
}

TEST(FockBasis, IndexRoundTrip) {
  const FockBasis b({3, 4, 2});
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.index(b.occupation(i)), i);
  const std::vector<int> occ{1, 0, 0};
  EXPECT_EQ(b.index(occ), 8u);
}

TEST(FockBasis, RejectsZeroDimension) { EXPECT_THROW(FockBasis({0}), std::invalid_argument); }

TEST(MonomialTable, ApplyMatchesOperator) {
  std::mt19937_64 rng(21);
  const FockBasis core({3, 3});
  MonomialTable table(core, 2);
  const auto poly = Polynomial::p(2, 0) + 0.4 * Polynomial::x(2, 0) * Polynomial::x(2, 1);
  const auto psi = random_amplitudes(rng, core.size());
  const auto phi = table.apply(poly, psi);
  const auto op = polynomial_operator(poly * poly, core.with_guard(4));
  const KetVector ket(core, psi);
  EXPECT_NEAR(phi.squaredNorm(), expectation(op, ket).real(), 1e-12);
}
