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

#include "mmgate/quadpoly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmgate {

namespace {

// shortest text that parses back to v
std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

Polynomial Polynomial::constant(std::size_t modes, double value) {
  Polynomial r(modes);
  r.add_term(Exponents(2 * modes, 0), value);
  return r;
}

Polynomial Polynomial::x(std::size_t modes, std::size_t mode) {
  if (mode >= modes) throw std::out_of_range("Polynomial::x: mode out of range");
  Exponents e(2 * modes, 0);
  e[2 * mode] = 1;
  return monomial(modes, e, 1.0);
}

Polynomial Polynomial::p(std::size_t modes, std::size_t mode) {
  if (mode >= modes) throw std::out_of_range("Polynomial::p: mode out of range");
  Exponents e(2 * modes, 0);
  e[2 * mode + 1] = 1;
  return monomial(modes, e, 1.0);
}

Polynomial Polynomial::monomial(std::size_t modes, Exponents exponents, double coefficient) {
  if (exponents.size() != 2 * modes) throw std::invalid_argument("Polynomial::monomial: exponent length mismatch");
  for (int k : exponents) {
    if (k < 0) throw std::invalid_argument("Polynomial::monomial: negative exponent");
  }
  Polynomial r(modes);
  r.add_term(exponents, coefficient);
  return r;
}

void Polynomial::add_term(const Exponents& exponents, double coefficient) {
  if (!std::isfinite(coefficient)) throw std::invalid_argument("Polynomial: non-finite coefficient");
  if (exponents.size() != 2 * modes_) throw std::invalid_argument("Polynomial: exponent length mismatch");
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coefficient(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

int Polynomial::degree_in_mode(std::size_t mode) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[2 * mode] + e[2 * mode + 1]);
  return d;
}

int Polynomial::x_degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (std::size_t j = 0; j < modes_; ++j) s += e[2 * j];
    d = std::max(d, s);
  }
  return d;
}

bool Polynomial::is_x_only() const {
  for (const auto& [e, c] : terms_) {
    for (std::size_t j = 0; j < modes_; ++j) {
      if (e[2 * j + 1] != 0) return false;
    }
  }
  return true;
}

Polynomial Polynomial::derivative_x(std::size_t mode) const {
  if (mode >= modes_) throw std::out_of_range("Polynomial::derivative_x: mode out of range");
  Polynomial r(modes_);
  for (const auto& [e, c] : terms_) {
    int k = e[2 * mode];
    if (k == 0) continue;
    Exponents d = e;
    d[2 * mode] = k - 1;
    r.add_term(d, c * k);
  }
  return r;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != modes_) throw std::invalid_argument("Polynomial::evaluate: point has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (std::size_t j = 0; j < modes_; ++j) {
      if (e[2 * j + 1] != 0) throw std::invalid_argument("Polynomial::evaluate: polynomial contains p symbols");
      for (int k = 0; k < e[2 * j]; ++k) term *= x[j];
    }
    sum += term;
  }
  return sum;
}

void Polynomial::check_same_modes(const Polynomial& other) const {
  if (other.modes_ != modes_) throw std::invalid_argument("Polynomial: mode count mismatch");
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_modes(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same_modes(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double scale) {
  if (!std::isfinite(scale)) throw std::invalid_argument("Polynomial: non-finite scale");
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= scale;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_modes(b);
  Polynomial r(a.modes_);
  Exponents e(2 * a.modes_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial r(modes_);
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) > tol) r.terms_.emplace(e, c);
  }
  return r;
}

bool Polynomial::approx_equal(const Polynomial& other, double tol) const {
  if (other.modes_ != modes_) return false;
  Polynomial diff = *this - other;
  for (const auto& [e, c] : diff.terms_) {
    if (std::abs(c) > tol) return false;
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  // Highest total degree first, then map order, so the text is stable.
  std::vector<std::pair<Exponents, double>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) {
    int dl = 0, dr = 0;
    for (int k : l.first) dl += k;
    for (int k : r.first) dr += k;
    return dl > dr;
  });
  for (const auto& [e, c] : ordered) {
    double mag = std::abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    out << format_number(mag);
    for (std::size_t j = 0; j < modes_; ++j) {
      for (int which = 0; which < 2; ++which) {
        int k = e[2 * j + which];
        if (k == 0) continue;
        out << '*' << (which == 0 ? 'x' : 'p') << (j + 1);
        if (k > 1) out << '^' << k;
      }
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Symplectic transforms.

Eigen::MatrixXd symplectic_form(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return omega;
}

SymplecticTransform SymplecticTransform::identity(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  return SymplecticTransform(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n));
}

SymplecticTransform::SymplecticTransform(Eigen::MatrixXd matrix, Eigen::VectorXd displacement)
    : matrix_(std::move(matrix)), displacement_(std::move(displacement)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() % 2 != 0 || matrix_.rows() == 0) {
    throw std::invalid_argument("SymplecticTransform: matrix must be 2N x 2N");
  }
  if (displacement_.size() != matrix_.rows()) {
    throw std::invalid_argument("SymplecticTransform: displacement length mismatch");
  }
  if (!matrix_.allFinite() || !displacement_.allFinite()) {
    throw std::invalid_argument("SymplecticTransform: non-finite entries");
  }
  // Rounding in products of strongly squeezing maps scales with |S|^2.
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if (symplectic_residual() > 1e-10 * scale * scale) {
    throw std::invalid_argument("SymplecticTransform: matrix is not symplectic");
  }
}

double SymplecticTransform::symplectic_residual() const {
  const Eigen::MatrixXd omega = symplectic_form(modes());
  return (matrix_ * omega * matrix_.transpose() - omega).cwiseAbs().maxCoeff();
}

SymplecticTransform operator*(const SymplecticTransform& a, const SymplecticTransform& b) {
  if (a.modes() != b.modes()) throw std::invalid_argument("SymplecticTransform: mode count mismatch");
  // (ab)^dag xi (ab) = b^dag (S_a xi + d_a) b = S_a (S_b xi + d_b) + d_a.
  return SymplecticTransform(a.matrix_ * b.matrix_, a.matrix_ * b.displacement_ + a.displacement_);
}

SymplecticTransform beam_splitter(std::size_t modes, double theta, std::size_t first, std::size_t second) {
  if (first >= modes || second >= modes) throw std::out_of_range("beam_splitter: mode out of range");
  if (first == second) throw std::invalid_argument("beam_splitter: modes must be distinct");
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  const double c = std::cos(theta), sn = std::sin(theta);
  for (Eigen::Index block : {Eigen::Index{0}, n}) {
    const Eigen::Index i = block + static_cast<Eigen::Index>(first);
    const Eigen::Index j = block + static_cast<Eigen::Index>(second);
    s(i, i) = c;
    s(i, j) = sn;
    s(j, i) = -sn;
    s(j, j) = c;
  }
  return SymplecticTransform(std::move(s), Eigen::VectorXd::Zero(2 * n));
}

SymplecticTransform squeezer(std::size_t modes, double lambda, std::size_t mode) {
  if (mode >= modes) throw std::out_of_range("squeezer: mode out of range");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("squeezer: lambda must be positive");
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  s(static_cast<Eigen::Index>(mode), static_cast<Eigen::Index>(mode)) = 1.0 / lambda;
  s(n + static_cast<Eigen::Index>(mode), n + static_cast<Eigen::Index>(mode)) = lambda;
  return SymplecticTransform(std::move(s), Eigen::VectorXd::Zero(2 * n));
}

SymplecticTransform displacement(std::span<const double> dx, std::span<const double> dp) {
  if (dx.size() != dp.size()) throw std::invalid_argument("displacement: length mismatch");
  const auto n = static_cast<Eigen::Index>(dx.size());
  Eigen::VectorXd d(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j) = dx[static_cast<std::size_t>(j)];
    d(n + j) = dp[static_cast<std::size_t>(j)];
  }
  return SymplecticTransform(Eigen::MatrixXd::Identity(2 * n, 2 * n), std::move(d));
}

SymplecticTransform gaussian_processing(double theta1, double lambda1, double lambda2, double theta2) {
  return beam_splitter(2, theta2, 0, 1) * squeezer(2, lambda1, 0) * squeezer(2, lambda2, 1) *
         beam_splitter(2, theta1, 0, 1);
}

Polynomial conjugate(const Polynomial& poly, const SymplecticTransform& transform) {
  const std::size_t n = poly.modes();
  if (transform.modes() != n) throw std::invalid_argument("conjugate: mode count mismatch");
  const Eigen::MatrixXd& s = transform.matrix();
  const Eigen::VectorXd& d = transform.displacement();

  // images[k] is the image of exponent slot k (x_j at 2j, p_j at 2j+1).
  std::vector<Polynomial> images;
  images.reserve(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t which = 0; which < 2; ++which) {
      const auto row = static_cast<Eigen::Index>(which * n + j);
      Polynomial img = Polynomial::constant(n, d(row));
      for (std::size_t l = 0; l < n; ++l) {
        img += s(row, static_cast<Eigen::Index>(l)) * Polynomial::x(n, l);
        img += s(row, static_cast<Eigen::Index>(n + l)) * Polynomial::p(n, l);
      }
      images.push_back(std::move(img));
    }
  }

  std::vector<std::vector<Polynomial>> powers(2 * n);
  auto power = [&](std::size_t slot, int k) -> const Polynomial& {
    auto& cache = powers[slot];
    if (cache.empty()) cache.push_back(Polynomial::constant(n, 1.0));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * images[slot]);
    return cache[static_cast<std::size_t>(k)];
  };

  Polynomial result(n);
  for (const auto& [e, c] : poly.terms()) {
    Polynomial term = Polynomial::constant(n, c);
    for (std::size_t slot = 0; slot < 2 * n; ++slot) {
      if (e[slot] > 0) term = term * power(slot, e[slot]);
    }
    result += term;
  }
  return result;
}

Polynomial shift_polynomial(const Polynomial& v, std::span<const double> q) {
  if (!v.is_x_only()) throw std::invalid_argument("shift_polynomial: V must contain x symbols only");
  if (q.size() != v.modes()) throw std::invalid_argument("shift_polynomial: shift has wrong dimension");
  const std::vector<double> zeros(q.size(), 0.0);
  return conjugate(v, displacement(q, zeros)) - v;
}

std::vector<Polynomial> gradient_polys(const Polynomial& v) {
  if (!v.is_x_only()) throw std::invalid_argument("gradient_polys: V must contain x symbols only");
  std::vector<Polynomial> out;
  out.reserve(v.modes());
  for (std::size_t j = 0; j < v.modes(); ++j) out.push_back(Polynomial::p(v.modes(), j) + v.derivative_x(j));
  return out;
}

Polynomial two_mode_cubic(double kappa) { return Polynomial::monomial(2, {1, 0, 2, 0}, kappa); }

}  // namespace mmgate
