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

#ifndef MMGATE_FOCK_HPP
#define MMGATE_FOCK_HPP

// Truncated Fock-space algebra.
//
// Convention: hbar = 1, x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
// so [x, p] = i and the vacuum variance of either quadrature is 1/2. The grid
// simulator's Hermite functions use the same convention.

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmgate/quadpoly.hpp"

namespace mmgate::fock {

using Complex = std::complex<double>;

/// Multi-mode truncated Fock basis |n_1, ..., n_N>, n_j < dims[j]. Index is
/// row-major with mode 1 slowest.
class FockBasis {
 public:
  FockBasis() = default;
  explicit FockBasis(std::vector<int> dims, int guard = 0);

  std::size_t modes() const { return dims_.size(); }
  const std::vector<int>& dims() const { return dims_; }
  int dim(std::size_t mode) const { return dims_.at(mode); }
  int guard() const { return guard_; }
  std::size_t size() const { return size_; }

  std::size_t index(std::span<const int> occupation) const;
  std::vector<int> occupation(std::size_t index) const;

  /// Same guard, every dimension increased by extra.
  FockBasis enlarged(int extra) const;
  FockBasis with_guard(int guard) const { return FockBasis(dims_, guard); }

  bool same_space(const FockBasis& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  int guard_ = 0;
  std::size_t size_ = 0;
};

class KetVector {
 public:
  KetVector(FockBasis basis, Eigen::VectorXcd amplitudes);

  static KetVector vacuum(const FockBasis& basis);
  static KetVector fock_state(const FockBasis& basis, std::span<const int> occupation);
  /// Tensor product of single-mode amplitude vectors, mode 1 first.
  static KetVector product(const std::vector<Eigen::VectorXcd>& factors);

  const FockBasis& basis() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  double squared_norm() const { return amplitudes_.squaredNorm(); }
  KetVector normalized() const;
  /// Throws std::invalid_argument unless |<psi|psi> - 1| <= 1e-12.
  void require_normalized() const;

  /// Zero-padded copy in a basis whose dimensions are all at least as large.
  KetVector embedded(const FockBasis& larger) const;

 private:
  FockBasis basis_;
  Eigen::VectorXcd amplitudes_;
};

class OperatorMatrix {
 public:
  OperatorMatrix(FockBasis basis, Eigen::MatrixXcd entries, bool hermitian);

  const FockBasis& basis() const { return basis_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  bool hermitian() const { return hermitian_; }
  double hermiticity_residual() const;

 private:
  FockBasis basis_;
  Eigen::MatrixXcd entries_;
  bool hermitian_;
};

enum class Quadrature { X, P };

/// Single-mode ladder-built quadrature on `mode`, identity on the others.
/// Plain truncation: [x, p] = i holds exactly except on the top level.
OperatorMatrix quadrature_matrix(const FockBasis& basis, std::size_t mode, Quadrature which);

/// Weyl-ordered operator of `poly`, assembled at dims + guard and restricted
/// to the declared basis, so every element <m|O|n> inside the basis equals the
/// untruncated one. Requires degree_in_mode(j) <= guard for every mode.
OperatorMatrix polynomial_operator(const Polynomial& poly, const FockBasis& basis);

/// <psi|O|psi>; the state is not normalized first.
Complex expectation(const OperatorMatrix& op, const KetVector& state);

/// Exact action of Weyl-ordered monomials on vectors supported in a core
/// basis. Results live in the core basis enlarged by max_degree, which holds
/// the full image of any polynomial whose degree in each mode is at most
/// max_degree.
///
/// Matrices are built on first use and cached; an instance is not safe for
/// concurrent use, give each worker its own.
class MonomialTable {
 public:
  MonomialTable(FockBasis core, int max_degree);

  const FockBasis& core() const { return core_; }
  const FockBasis& target() const { return target_; }
  int max_degree() const { return max_degree_; }

  /// Target-row, core-column matrix of one monomial.
  const Eigen::MatrixXcd& monomial(const Exponents& exponents);

  /// O|psi> in the target basis, for core amplitudes psi.
  Eigen::VectorXcd apply(const Polynomial& poly, const Eigen::VectorXcd& core_amplitudes);

  /// Core amplitudes written into target-basis positions.
  Eigen::VectorXcd embed(const Eigen::VectorXcd& core_amplitudes) const;

 private:
  const Eigen::MatrixXd& single_mode_factor(std::size_t mode, int kx, int kp);

  FockBasis core_;
  FockBasis target_;
  int max_degree_;
  std::vector<std::size_t> core_to_target_;
  std::map<Exponents, Eigen::MatrixXcd> monomials_;
  // Weyl-ordered x^kx p^kp on one mode, stored as the real matrix M with
  // operator = (-i)^kp M (entries of p carry a factor -i).
  std::map<std::tuple<std::size_t, int, int>, Eigen::MatrixXd> factors_;
};

}  // namespace mmgate::fock

#endif  // MMGATE_FOCK_HPP
