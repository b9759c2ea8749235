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

#include "mmgate/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mmgate::fock {

namespace {

// Real parts of the single-mode ladder quadratures at dimension d:
// x = (a + a^dag)/sqrt2, P = (a - a^dag)/sqrt2 with p = -i P.
Eigen::MatrixXd ladder_x(int d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    const double v = std::sqrt(static_cast<double>(n) / 2.0);
    m(n - 1, n) = v;
    m(n, n - 1) = v;
  }
  return m;
}

Eigen::MatrixXd ladder_p_real(int d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    const double v = std::sqrt(static_cast<double>(n) / 2.0);
    m(n - 1, n) = v;
    m(n, n - 1) = -v;
  }
  return m;
}

// Average of all orderings of kx copies of X and kp copies of P.
Eigen::MatrixXd weyl_product(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p, int kx, int kp) {
  const Eigen::Index d = x.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  long count = 0;
  std::function<void(Eigen::MatrixXd, int, int)> rec = [&](Eigen::MatrixXd acc, int rx, int rp) {
    if (rx == 0 && rp == 0) {
      sum += acc;
      ++count;
      return;
    }
    if (rx > 0) rec(acc * x, rx - 1, rp);
    if (rp > 0) rec(acc * p, rx, rp - 1);
  };
  rec(Eigen::MatrixXd::Identity(d, d), kx, kp);
  return sum / static_cast<double>(count);
}

Complex minus_i_power(int k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FockBasis::FockBasis(std::vector<int> dims, int guard) : dims_(std::move(dims)), guard_(guard) {
  if (dims_.empty()) throw std::invalid_argument("FockBasis: need at least one mode");
  if (guard_ < 0) throw std::invalid_argument("FockBasis: guard must be non-negative");
  size_ = 1;
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("FockBasis: every dimension must be >= 1");
    size_ *= static_cast<std::size_t>(d);
  }
}

std::size_t FockBasis::index(std::span<const int> occupation) const {
  if (occupation.size() != dims_.size()) throw std::invalid_argument("FockBasis::index: wrong mode count");
  std::size_t idx = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    if (occupation[j] < 0 || occupation[j] >= dims_[j]) throw std::out_of_range("FockBasis::index: occupation out of range");
    idx = idx * static_cast<std::size_t>(dims_[j]) + static_cast<std::size_t>(occupation[j]);
  }
  return idx;
}

std::vector<int> FockBasis::occupation(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("FockBasis::occupation: index out of range");
  std::vector<int> occ(dims_.size());
  for (std::size_t j = dims_.size(); j-- > 0;) {
    occ[j] = static_cast<int>(index % static_cast<std::size_t>(dims_[j]));
    index /= static_cast<std::size_t>(dims_[j]);
  }
  return occ;
}

FockBasis FockBasis::enlarged(int extra) const {
  std::vector<int> d = dims_;
  for (int& v : d) v += extra;
  return FockBasis(std::move(d), guard_);
}

// ---------------------------------------------------------------------------

KetVector::KetVector(FockBasis basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != basis_.size()) {
    throw std::invalid_argument("KetVector: amplitude count does not match basis");
  }
  if (!amplitudes_.allFinite()) throw std::invalid_argument("KetVector: non-finite amplitude");
}

KetVector KetVector::vacuum(const FockBasis& basis) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  a(0) = 1.0;
  return KetVector(basis, std::move(a));
}

KetVector KetVector::fock_state(const FockBasis& basis, std::span<const int> occupation) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  a(static_cast<Eigen::Index>(basis.index(occupation))) = 1.0;
  return KetVector(basis, std::move(a));
}

KetVector KetVector::product(const std::vector<Eigen::VectorXcd>& factors) {
  if (factors.empty()) throw std::invalid_argument("KetVector::product: no factors");
  std::vector<int> dims;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Ones(1);
  for (const auto& f : factors) {
    if (f.size() == 0) throw std::invalid_argument("KetVector::product: empty factor");
    dims.push_back(static_cast<int>(f.size()));
    Eigen::VectorXcd next(acc.size() * f.size());
    for (Eigen::Index i = 0; i < acc.size(); ++i) next.segment(i * f.size(), f.size()) = acc(i) * f;
    acc = std::move(next);
  }
  return KetVector(FockBasis(std::move(dims)), std::move(acc));
}

KetVector KetVector::normalized() const {
  const double n = amplitudes_.norm();
  if (!(n > 0.0)) throw std::invalid_argument("KetVector::normalized: zero vector");
  return KetVector(basis_, amplitudes_ / n);
}

void KetVector::require_normalized() const {
  if (std::abs(squared_norm() - 1.0) > 1e-12) throw std::invalid_argument("KetVector: state is not normalized");
}

KetVector KetVector::embedded(const FockBasis& larger) const {
  if (larger.modes() != basis_.modes()) throw std::invalid_argument("KetVector::embedded: mode count mismatch");
  for (std::size_t j = 0; j < larger.modes(); ++j) {
    if (larger.dim(j) < basis_.dim(j)) throw std::invalid_argument("KetVector::embedded: target basis is smaller");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(larger.size()));
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const auto occ = basis_.occupation(i);
    out(static_cast<Eigen::Index>(larger.index(occ))) = amplitudes_(static_cast<Eigen::Index>(i));
  }
  return KetVector(larger, std::move(out));
}

// ---------------------------------------------------------------------------

OperatorMatrix::OperatorMatrix(FockBasis basis, Eigen::MatrixXcd entries, bool hermitian)
    : basis_(std::move(basis)), entries_(std::move(entries)), hermitian_(hermitian) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (entries_.rows() != n || entries_.cols() != n) throw std::invalid_argument("OperatorMatrix: size mismatch");
  const double scale = entries_.size() == 0 ? 1.0 : std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if (hermitian_ && hermiticity_residual() > 1e-12 * scale) {
    throw std::invalid_argument("OperatorMatrix: flagged hermitian but is not");
  }
}

double OperatorMatrix::hermiticity_residual() const {
  if (entries_.size() == 0) return 0.0;
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix quadrature_matrix(const FockBasis& basis, std::size_t mode, Quadrature which) {
  if (mode >= basis.modes()) throw std::out_of_range("quadrature_matrix: mode out of range");
  const int d = basis.dim(mode);
  Eigen::MatrixXcd single = which == Quadrature::X ? Eigen::MatrixXcd(ladder_x(d).cast<Complex>())
                                                   : Eigen::MatrixXcd(Complex(0.0, -1.0) * ladder_p_real(d).cast<Complex>());
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto occ_r = basis.occupation(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto occ_c = basis.occupation(static_cast<std::size_t>(c));
      bool others_equal = true;
      for (std::size_t j = 0; j < basis.modes(); ++j) {
        if (j != mode && occ_r[j] != occ_c[j]) {
          others_equal = false;
          break;
        }
      }
      if (others_equal) full(r, c) = single(occ_r[mode], occ_c[mode]);
    }
  }
  return OperatorMatrix(basis, std::move(full), true);
}

OperatorMatrix polynomial_operator(const Polynomial& poly, const FockBasis& basis) {
  if (poly.modes() != basis.modes()) throw std::invalid_argument("polynomial_operator: mode count mismatch");
  for (std::size_t j = 0; j < basis.modes(); ++j) {
    if (poly.degree_in_mode(j) > basis.guard()) {
      throw std::invalid_argument("polynomial_operator: polynomial degree exceeds the basis guard");
    }
  }
  MonomialTable table(basis, basis.guard());
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::Index> rows(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    rows[i] = static_cast<Eigen::Index>(table.target().index(basis.occupation(i)));
  }
  for (const auto& [e, c] : poly.terms()) {
    const Eigen::MatrixXcd& m = table.monomial(e);
    for (Eigen::Index r = 0; r < n; ++r) full.row(r) += c * m.row(rows[static_cast<std::size_t>(r)]);
  }
  return OperatorMatrix(basis, std::move(full), true);
}

Complex expectation(const OperatorMatrix& op, const KetVector& state) {
  if (!op.basis().same_space(state.basis())) throw std::invalid_argument("expectation: basis mismatch");
  return state.amplitudes().dot(op.entries() * state.amplitudes());
}

// ---------------------------------------------------------------------------

MonomialTable::MonomialTable(FockBasis core, int max_degree)
    : core_(std::move(core)), max_degree_(max_degree) {
  if (max_degree_ < 0) throw std::invalid_argument("MonomialTable: negative degree");
  target_ = core_.enlarged(max_degree_);
  core_to_target_.resize(core_.size());
  for (std::size_t i = 0; i < core_.size(); ++i) core_to_target_[i] = target_.index(core_.occupation(i));
}

const Eigen::MatrixXd& MonomialTable::single_mode_factor(std::size_t mode, int kx, int kp) {
  const auto key = std::make_tuple(mode, kx, kp);
  auto it = factors_.find(key);
  if (it != factors_.end()) return it->second;
  const int d = target_.dim(mode);
  Eigen::MatrixXd m = weyl_product(ladder_x(d), ladder_p_real(d), kx, kp);
  return factors_.emplace(key, std::move(m)).first->second;
}

const Eigen::MatrixXcd& MonomialTable::monomial(const Exponents& exponents) {
  if (exponents.size() != 2 * core_.modes()) throw std::invalid_argument("MonomialTable: exponent length mismatch");
  auto it = monomials_.find(exponents);
  if (it != monomials_.end()) return it->second;

  int total_p = 0;
  // Kronecker product of the core-column blocks of the per-mode factors.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t j = 0; j < core_.modes(); ++j) {
    const int kx = exponents[2 * j], kp = exponents[2 * j + 1];
    if (kx + kp > max_degree_) throw std::invalid_argument("MonomialTable: monomial degree exceeds table degree");
    total_p += kp;
    const Eigen::MatrixXd& f = single_mode_factor(j, kx, kp);
    const Eigen::MatrixXd block = f.leftCols(core_.dim(j));
    Eigen::MatrixXd next(acc.rows() * block.rows(), acc.cols() * block.cols());
    for (Eigen::Index r = 0; r < acc.rows(); ++r) {
      for (Eigen::Index c = 0; c < acc.cols(); ++c) {
        next.block(r * block.rows(), c * block.cols(), block.rows(), block.cols()) = acc(r, c) * block;
      }
    }
    acc = std::move(next);
  }
  Eigen::MatrixXcd m = minus_i_power(total_p) * acc.cast<Complex>();
  return monomials_.emplace(exponents, std::move(m)).first->second;
}

Eigen::VectorXcd MonomialTable::apply(const Polynomial& poly, const Eigen::VectorXcd& core_amplitudes) {
  if (poly.modes() != core_.modes()) throw std::invalid_argument("MonomialTable::apply: mode count mismatch");
  if (static_cast<std::size_t>(core_amplitudes.size()) != core_.size()) {
    throw std::invalid_argument("MonomialTable::apply: amplitude count mismatch");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target_.size()));
  for (const auto& [e, c] : poly.terms()) out.noalias() += c * (monomial(e) * core_amplitudes);
  return out;
}

Eigen::VectorXcd MonomialTable::embed(const Eigen::VectorXcd& core_amplitudes) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target_.size()));
  for (std::size_t i = 0; i < core_.size(); ++i) {
    out(static_cast<Eigen::Index>(core_to_target_[i])) = core_amplitudes(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace mmgate::fock
