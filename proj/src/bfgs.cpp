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

#include "mmgate/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace mmgate {

void OptimizerConfig::validate() const {
  if (starts < 1) throw std::invalid_argument("OptimizerConfig: starts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("OptimizerConfig: max_iters must be >= 1");
  if (!(fd_step > 0.0)) throw std::invalid_argument("OptimizerConfig: fd_step must be > 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("OptimizerConfig: tolerance must be > 0");
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
    throw std::invalid_argument("OptimizerConfig: need 0 < lambda_min < lambda_max");
  }
  if (threads < 0) throw std::invalid_argument("OptimizerConfig: threads must be >= 0");
  if (benchmark_starts < 1) throw std::invalid_argument("OptimizerConfig: benchmark_starts must be >= 1");
}

namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw NumericalError("objective returned a non-finite value");
  return v;
}

struct LineSearch {
  const ObjectiveFn& f;
  double h;
  int evaluations = 0;

  double value(const Eigen::VectorXd& x) {
    ++evaluations;
    return checked(f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) {
    int n = 0;
    auto g = central_gradient(f, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), h, &n);
    evaluations += n;
    return Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  }
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or bisection.
double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (std::isfinite(t) && t > lo + 0.1 * (hi - lo) && t < hi - 0.1 * (hi - lo)) return t;
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> central_gradient(const ObjectiveFn& f, std::span<const double> x, double h, int* evaluations) {
  std::vector<double> work(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    work[i] = x[i] + step;
    const double fp = checked(f(work));
    work[i] = x[i] - step;
    const double fm = checked(f(work));
    work[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  if (evaluations) *evaluations += static_cast<int>(2 * x.size());
  return g;
}

LocalSearchResult bfgs_minimize(const ObjectiveFn& f, std::vector<double> x0, const OptimizerConfig& config) {
  constexpr double c1 = 1e-4, c2 = 0.9;
  const auto n = static_cast<Eigen::Index>(x0.size());
  LineSearch ls{f, config.fd_step};

  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(x0.data(), n);
  double fx = ls.value(x);
  Eigen::VectorXd g = ls.gradient(x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool first_step = true;

  LocalSearchResult result;
  const double gtol = 1e-8;
  int it = 0;
  for (; it < config.max_iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= gtol * (1.0 + std::abs(fx))) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -g;
      slope = g.dot(dir);
    }
    double alpha = 1.0;
    if (first_step) alpha = std::min(1.0, 1.0 / std::max(1e-12, g.lpNorm<Eigen::Infinity>()));

    // Strong Wolfe line search (bracket, then zoom).
    double a_prev = 0.0, f_prev = fx, d_prev = slope;
    double a_star = -1.0, f_star = fx;
    Eigen::VectorXd g_star;
    double a_lo = 0, f_lo = 0, d_lo = 0, a_hi = 0, f_hi = 0, d_hi = 0;
    bool zoom = false;
    for (int k = 0; k < 30; ++k) {
      const Eigen::VectorXd xt = x + alpha * dir;
      const double ft = ls.value(xt);
      if (ft > fx + c1 * alpha * slope || (k > 0 && ft >= f_prev)) {
        a_lo = a_prev, f_lo = f_prev, d_lo = d_prev;
        a_hi = alpha, f_hi = ft;
        d_hi = ls.gradient(xt).dot(dir);
        zoom = true;
        break;
      }
      const Eigen::VectorXd gt = ls.gradient(xt);
      const double dt = gt.dot(dir);
      if (std::abs(dt) <= -c2 * slope) {
        a_star = alpha, f_star = ft, g_star = gt;
        break;
      }
      if (dt >= 0.0) {
        a_lo = alpha, f_lo = ft, d_lo = dt;
        a_hi = a_prev, f_hi = f_prev, d_hi = d_prev;
        zoom = true;
        break;
      }
      a_prev = alpha, f_prev = ft, d_prev = dt;
      alpha *= 2.0;
    }
    if (zoom) {
      for (int k = 0; k < 30; ++k) {
        const double aj = cubic_step(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi);
        const Eigen::VectorXd xt = x + aj * dir;
        const double ft = ls.value(xt);
        if (ft > fx + c1 * aj * slope || ft >= f_lo) {
          a_hi = aj, f_hi = ft;
          d_hi = ls.gradient(xt).dot(dir);
        } else {
          const Eigen::VectorXd gt = ls.gradient(xt);
          const double dt = gt.dot(dir);
          if (std::abs(dt) <= -c2 * slope) {
            a_star = aj, f_star = ft, g_star = gt;
            break;
          }
          if (dt * (a_hi - a_lo) >= 0.0) a_hi = a_lo, f_hi = f_lo, d_hi = d_lo;
          a_lo = aj, f_lo = ft, d_lo = dt;
        }
        if (std::abs(a_hi - a_lo) < 1e-14 * std::max(1.0, std::abs(a_lo))) break;
      }
      // Accept a sufficient-decrease point even without the curvature condition.
      if (a_star < 0.0 && a_lo > 0.0 && f_lo < fx) {
        a_star = a_lo, f_star = f_lo;
        g_star = ls.gradient(x + a_lo * dir);
      }
    }
    if (a_star < 0.0) {
      // No decrease along the search direction: the gradient is dominated by
      // finite-difference noise.
      result.converged = g.lpNorm<Eigen::Infinity>() <= 1e-5 * (1.0 + std::abs(fx));
      break;
    }

    const Eigen::VectorXd s = a_star * dir;
    const Eigen::VectorXd y = g_star - g;
    const double f_old = fx;
    x += s;
    fx = f_star;
    g = g_star;

    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (first_step) {
        hinv *= sy / y.squaredNorm();
        first_step = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * y;
      const double yhy = y.dot(hy);
      hinv += ((1.0 + rho * yhy) * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
    if (f_old - fx <= config.tolerance * (1.0 + std::abs(fx))) {
      result.converged = true;
      ++it;
      break;
    }
  }

  result.x.assign(x.data(), x.data() + n);
  result.value = fx;
  result.iterations = it;
  result.evaluations = ls.evaluations;
  return result;
}

}  // namespace mmgate
