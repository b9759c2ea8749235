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

#ifndef MMGATE_QUADPOLY_HPP
#define MMGATE_QUADPOLY_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mmgate {

/// Exponents of one monomial, laid out per mode as (k1x, k1p, k2x, k2p, ...).
using Exponents = std::vector<int>;

/// Real-coefficient polynomial in the quadrature symbols x_j, p_j of N modes.
///
/// Multiplication is the commutative product of symbols. The operator a
/// polynomial stands for is its Weyl (fully symmetric) ordering, see
/// fock::polynomial_operator.
class Polynomial {
 public:
  explicit Polynomial(std::size_t modes = 0) : modes_(modes) {}

  static Polynomial constant(std::size_t modes, double value);
  static Polynomial x(std::size_t modes, std::size_t mode);
  static Polynomial p(std::size_t modes, std::size_t mode);
  static Polynomial monomial(std::size_t modes, Exponents exponents, double coefficient);

  std::size_t modes() const { return modes_; }
  const std::map<Exponents, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  double coefficient(const Exponents& exponents) const;

  /// Largest total degree over all terms; 0 for the zero polynomial.
  int degree() const;
  /// Largest k_jx + k_jp over all terms.
  int degree_in_mode(std::size_t mode) const;
  /// Largest per-term sum of x exponents.
  int x_degree() const;
  bool is_x_only() const;

  Polynomial derivative_x(std::size_t mode) const;

  /// Evaluates an x-only polynomial at the point x.
  double evaluate(std::span<const double> x) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double scale);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  bool operator==(const Polynomial& other) const = default;

  /// Drops terms whose |coefficient| is at most tol.
  Polynomial pruned(double tol) const;
  bool approx_equal(const Polynomial& other, double tol) const;

  /// Text form "c*x1*x2^2 - c*p1 + c", coefficients printed with round-trip precision.
  std::string to_string() const;

  void add_term(const Exponents& exponents, double coefficient);

 private:
  void check_same_modes(const Polynomial& other) const;

  std::size_t modes_;
  std::map<Exponents, double> terms_;
};

/// Heisenberg action of a Gaussian unitary U: U^dag xi U = S xi + d, where
/// xi = (x_1, ..., x_N, p_1, ..., p_N).
class SymplecticTransform {
 public:
  static SymplecticTransform identity(std::size_t modes);

  /// Throws std::invalid_argument when the matrix violates S Omega S^T = Omega.
  SymplecticTransform(Eigen::MatrixXd matrix, Eigen::VectorXd displacement);

  std::size_t modes() const { return static_cast<std::size_t>(matrix_.rows() / 2); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& displacement() const { return displacement_; }

  /// max |S Omega S^T - Omega| entrywise.
  double symplectic_residual() const;

  /// Transform of the unitary product a*b (b acts on the state first).
  friend SymplecticTransform operator*(const SymplecticTransform& a, const SymplecticTransform& b);

 private:
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd displacement_;
};

Eigen::MatrixXd symplectic_form(std::size_t modes);

/// x and p blocks of the two modes rotated by [[cos, sin], [-sin, cos]].
SymplecticTransform beam_splitter(std::size_t modes, double theta, std::size_t first, std::size_t second);

/// x_i -> x_i / lambda, p_i -> p_i * lambda.
SymplecticTransform squeezer(std::size_t modes, double lambda, std::size_t mode);

/// x_i -> x_i + dx_i, p_i -> p_i + dp_i.
SymplecticTransform displacement(std::span<const double> dx, std::span<const double> dp);

/// U_BS(theta2) S_1(lambda1) S_2(lambda2) U_BS(theta1) on two modes.
SymplecticTransform gaussian_processing(double theta1, double lambda1, double lambda2, double theta2);

/// Substitutes every symbol by its Heisenberg image: returns U^dag O U.
Polynomial conjugate(const Polynomial& poly, const SymplecticTransform& transform);

/// F(x; q) = V(x + q) - V(x) for an x-only V.
Polynomial shift_polynomial(const Polynomial& v, std::span<const double> q);

/// p_j + dV/dx_j for every mode j.
std::vector<Polynomial> gradient_polys(const Polynomial& v);

/// V = kappa * x1 * x2^2 on two modes.
Polynomial two_mode_cubic(double kappa);

}  // namespace mmgate

#endif  // MMGATE_QUADPOLY_HPP
