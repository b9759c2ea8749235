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

#include "mmgate/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mmgate {

namespace {

using Complex = std::complex<double>;

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::size_t factor_parameters(int dim, bool real) {
  if (dim <= 1) return 0;
  return static_cast<std::size_t>(dim) * (real ? 1 : 2);
}

// Entangled coefficient slots: every (i, j), or i <= j when exchange symmetric.
std::vector<std::pair<int, int>> entangled_slots(const AnsatzSpec& a) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i <= a.m; ++i)
    for (int j = 0; j <= a.n; ++j)
      if (!a.exchange_symmetric || i <= j) out.emplace_back(i, j);
  return out;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Rotates the global phase so the first coefficient with modulus above the
// threshold is real and non-negative.
void fix_phase(Eigen::VectorXcd& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-6 * scale) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = std::abs(v(k));
      return;
    }
  }
}

// Rotates the global phase so the first significant coefficient c_k satisfies
// c_k i^(-k(index)) >= 0; returns the applied factor.
template <class PhotonNumber>
Complex align_phase(Eigen::VectorXcd& v, PhotonNumber photons) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > 1e-6 * scale) {
      const Complex target = i_power(photons(k));
      const Complex rot = target * std::conj(v(k)) / std::abs(v(k));
      v *= rot;
      return rot;
    }
  }
  return 1.0;
}

void flip_odd(Eigen::VectorXcd& v) {
  for (Eigen::Index k = 1; k < v.size(); k += 2) v(k) = -v(k);
}

bool lexicographically_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

int worker_count(const OptimizerConfig& config, std::size_t jobs) {
  int t = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), std::max<std::size_t>(jobs, 1)));
}

}  // namespace

void AnsatzSpec::validate() const {
  if (m < 0 || n < 0) throw std::invalid_argument("AnsatzSpec: photon numbers must be >= 0");
  if (family == AnsatzFamily::SimplifiedPassive && layers != GaussianLayers::PassiveOnly) {
    throw std::invalid_argument("AnsatzSpec: the simplified family uses a single beam splitter only");
  }
  if (exchange_symmetric && m != n) throw std::invalid_argument("AnsatzSpec: exchange symmetry needs equal photon numbers");
}

std::size_t AnsatzSpec::coefficient_parameters() const {
  if (factorized()) {
    return factor_parameters(m + 1, real_up_to_phase) + (exchange_symmetric ? 0 : factor_parameters(n + 1, real_up_to_phase));
  }
  const auto slots = entangled_slots(*this).size();
  if (slots <= 1) return 0;
  return slots * (real_up_to_phase ? 1 : 2);
}

std::string to_string(AnsatzFamily family) {
  switch (family) {
    case AnsatzFamily::Factorized: return "factorized";
    case AnsatzFamily::Entangled: return "entangled";
    case AnsatzFamily::SimplifiedPassive: return "simplified";
  }
  return "?";
}

std::string to_string(GaussianLayers layers) { return layers == GaussianLayers::Full ? "full" : "passive"; }

AnsatzFamily parse_family(const std::string& text) {
  if (text == "factorized") return AnsatzFamily::Factorized;
  if (text == "entangled") return AnsatzFamily::Entangled;
  if (text == "simplified") return AnsatzFamily::SimplifiedPassive;
  throw std::invalid_argument("unknown ansatz family '" + text + "'");
}

GaussianLayers parse_layers(const std::string& text) {
  if (text == "full") return GaussianLayers::Full;
  if (text == "passive") return GaussianLayers::PassiveOnly;
  throw std::invalid_argument("unknown Gaussian layers '" + text + "'");
}

std::string AnsatzSpec::label() const {
  std::string s = to_string(family) + " " + std::to_string(m) + "x" + std::to_string(n) + " " +
                  to_string(layers);
  if (real_up_to_phase) s += " real";
  if (exchange_symmetric) s += " symmetric";
  return s;
}

// ---------------------------------------------------------------------------

Objective::Objective(AnsatzSpec ansatz, double kappa, const OptimizerConfig& config)
    : ansatz_(ansatz),
      kappa_(kappa),
      lambda_min_(config.lambda_min),
      lambda_max_(config.lambda_max),
      evaluator_((ansatz.validate(), ansatz.core_basis()), two_mode_cubic(kappa), kappa) {}

void Objective::check(std::span<const double> params) const {
  if (params.size() != ansatz_.parameter_count()) {
    throw std::invalid_argument("objective: expected " + std::to_string(ansatz_.parameter_count()) + " parameters, got " +
                                std::to_string(params.size()));
  }
  if (ansatz_.layers == GaussianLayers::Full) {
    const std::size_t g = ansatz_.coefficient_parameters();
    for (std::size_t k : {g + 1, g + 2}) {
      const double l = params[k];
      if (!(l >= lambda_min_ * (1.0 - 1e-12) && l <= lambda_max_ * (1.0 + 1e-12))) {
        throw std::invalid_argument("objective: squeezing parameter outside [lambda_min, lambda_max]");
      }
    }
  }
}

Eigen::VectorXcd Objective::decode_factor(std::span<const double> params, std::size_t& pos, int dim) const {
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(dim);
  if (dim == 1) {
    f(0) = 1.0;
    return f;
  }
  for (int k = 0; k < dim; ++k) {
    if (ansatz_.real_up_to_phase) {
      f(k) = i_power(k) * params[pos++];
    } else {
      f(k) = Complex(params[pos], params[pos + 1]);
      pos += 2;
    }
  }
  return f;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> Objective::factors(std::span<const double> params) const {
  if (!ansatz_.factorized()) throw std::logic_error("Objective::factors: entangled ansatz");
  std::size_t pos = 0;
  Eigen::VectorXcd f1 = decode_factor(params, pos, ansatz_.m + 1);
  Eigen::VectorXcd f2 = ansatz_.exchange_symmetric ? f1 : decode_factor(params, pos, ansatz_.n + 1);
  return {f1, f2};
}

Eigen::VectorXcd Objective::core(std::span<const double> params) const {
  if (ansatz_.factorized()) {
    const auto [f1, f2] = factors(params);
    return kron(f1, f2);
  }
  const int cols = ansatz_.n + 1;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero((ansatz_.m + 1) * cols);
  const auto slots = entangled_slots(ansatz_);
  if (slots.size() == 1) {
    c(0) = 1.0;
    return c;
  }
  std::size_t pos = 0;
  for (const auto& [i, j] : slots) {
    Complex v;
    if (ansatz_.real_up_to_phase) {
      v = i_power(i + j) * params[pos++];
    } else {
      v = Complex(params[pos], params[pos + 1]);
      pos += 2;
    }
    c(i * cols + j) = v;
    if (ansatz_.exchange_symmetric) c(j * cols + i) = v;
  }
  return c;
}

GaussianParams Objective::gaussian(std::span<const double> params) const {
  const std::size_t g = ansatz_.coefficient_parameters();
  if (ansatz_.layers == GaussianLayers::PassiveOnly) return {params[g], 1.0, 1.0, 0.0};
  return {params[g], params[g + 1], params[g + 2], params[g + 3]};
}

double Objective::operator()(std::span<const double> params) { return report(params).total; }

VarianceReport Objective::report(std::span<const double> params) {
  check(params);
  auto r = evaluator_.evaluate(core(params), gaussian(params).transform());
  r.setup = ansatz_.label();
  return r;
}

std::vector<double> Objective::encode(const Eigen::VectorXcd& factor1, const Eigen::VectorXcd& factor2,
                                      const GaussianParams& g) const {
  if (!ansatz_.factorized()) throw std::invalid_argument("Objective::encode: ansatz is not factorized");
  if (factor1.size() != ansatz_.m + 1 || factor2.size() != ansatz_.n + 1) {
    throw std::invalid_argument("Objective::encode: factor dimensions do not match the ansatz");
  }
  std::vector<double> out;
  auto put = [&](const Eigen::VectorXcd& f) {
    if (f.size() == 1) return;
    for (Eigen::Index k = 0; k < f.size(); ++k) {
      if (ansatz_.real_up_to_phase) {
        out.push_back((f(k) * std::conj(i_power(static_cast<int>(k)))).real());
      } else {
        out.push_back(f(k).real());
        out.push_back(f(k).imag());
      }
    }
  };
  put(factor1);
  if (!ansatz_.exchange_symmetric) put(factor2);
  out.push_back(g.theta1);
  if (ansatz_.layers == GaussianLayers::Full) {
    out.push_back(g.lambda1);
    out.push_back(g.lambda2);
    out.push_back(g.theta2);
  }
  return out;
}

std::vector<double> Objective::encode(const Eigen::VectorXcd& core, const GaussianParams& g) const {
  const int rows = ansatz_.m + 1, cols = ansatz_.n + 1;
  if (core.size() != rows * cols) throw std::invalid_argument("Objective::encode: core size does not match the ansatz");
  if (ansatz_.factorized()) {
    const Eigen::MatrixXcd c = Eigen::Map<const Eigen::MatrixXcd>(core.data(), cols, rows).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s.size() > 1 && s(1) > 1e-8 * s(0)) throw std::invalid_argument("Objective::encode: core is not a product state");
    Eigen::VectorXcd f1 = std::sqrt(s(0)) * svd.matrixU().col(0);
    Eigen::VectorXcd f2 = std::sqrt(s(0)) * svd.matrixV().col(0).conjugate();
    const bool real = ansatz_.real_up_to_phase;
    f2 /= align_phase(f1, [real](Eigen::Index k) { return real ? static_cast<int>(k) : 0; });
    if (ansatz_.exchange_symmetric) {
      const Complex beta = f1.dot(f2) / f1.squaredNorm();
      f1 *= std::sqrt(beta);
      f2 = f1;
    }
    return encode(f1, f2, g);
  }
  std::vector<double> out;
  const auto slots = entangled_slots(ansatz_);
  if (slots.size() > 1) {
    for (const auto& [i, j] : slots) {
      const Complex v = core(i * cols + j);
      if (ansatz_.real_up_to_phase) {
        out.push_back((v * std::conj(i_power(i + j))).real());
      } else {
        out.push_back(v.real());
        out.push_back(v.imag());
      }
    }
  }
  out.push_back(g.theta1);
  if (ansatz_.layers == GaussianLayers::Full) {
    out.push_back(g.lambda1);
    out.push_back(g.lambda2);
    out.push_back(g.theta2);
  }
  return out;
}

double objective(std::span<const double> params, const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config) {
  Objective f(ansatz, kappa, config);
  return f(params);
}

// ---------------------------------------------------------------------------

std::vector<double> gauge_fixed(const Objective& objective, std::span<const double> params) {
  const AnsatzSpec& a = objective.ansatz();
  GaussianParams g = objective.gaussian(params);
  const GaugeMove move = canonical_processing(g, !a.exchange_symmetric);
  if (a.layers == GaussianLayers::PassiveOnly) g.lambda1 = g.lambda2 = 1.0;

  const bool real = a.real_up_to_phase;
  if (a.factorized()) {
    auto [f1, f2] = objective.factors(params);
    if (move.total_parity) {
      flip_odd(f1);
      flip_odd(f2);
    }
    if (move.second_parity) flip_odd(f2);
    auto photons = [real](Eigen::Index k) { return real ? static_cast<int>(k) : 0; };
    f1.normalize();
    f2.normalize();
    align_phase(f1, photons);
    align_phase(f2, photons);
    return objective.encode(f1, a.exchange_symmetric ? f1 : f2, g);
  }

  Eigen::VectorXcd c = objective.core(params);
  const auto basis = a.core_basis();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto occ = basis.occupation(k);
    bool flip = false;
    if (move.total_parity && (occ[0] + occ[1]) % 2) flip = !flip;
    if (move.second_parity && occ[1] % 2) flip = !flip;
    if (flip) c(static_cast<Eigen::Index>(k)) = -c(static_cast<Eigen::Index>(k));
  }
  c.normalize();
  align_phase(c, [&](Eigen::Index k) {
    const auto occ = basis.occupation(static_cast<std::size_t>(k));
    return real ? occ[0] + occ[1] : 0;
  });
  return objective.encode(c, g);
}

// ---------------------------------------------------------------------------

fock::KetVector OptimizationRecord::core_state() const {
  Eigen::VectorXcd a(static_cast<Eigen::Index>(core.size()));
  for (std::size_t k = 0; k < core.size(); ++k) a(static_cast<Eigen::Index>(k)) = core[k];
  return fock::KetVector(ansatz.core_basis(), a);
}

std::vector<double> OptimizationRecord::parameters() const {
  OptimizerConfig wide;
  wide.lambda_min = std::min(wide.lambda_min, std::min(gaussian.lambda1, gaussian.lambda2));
  wide.lambda_max = std::max(wide.lambda_max, std::max(gaussian.lambda1, gaussian.lambda2));
  const Objective f(ansatz, kappa, wide);
  return f.encode(core_state().amplitudes(), gaussian);
}

Eigen::VectorXcd OptimizationRecord::factor(int which) const {
  if (!ansatz.factorized()) throw std::logic_error("OptimizationRecord::factor: entangled core");
  if (which != 0 && which != 1) throw std::out_of_range("OptimizationRecord::factor: index must be 0 or 1");
  const int rows = ansatz.m + 1, cols = ansatz.n + 1;
  Eigen::MatrixXcd c(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) c(i, j) = core[static_cast<std::size_t>(i * cols + j)];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXcd f = which == 0 ? Eigen::VectorXcd(svd.matrixU().col(0)) : Eigen::VectorXcd(svd.matrixV().col(0).conjugate());
  fix_phase(f);
  return f;
}

// ---------------------------------------------------------------------------

namespace {

struct SearchSpace {
  std::size_t g;  // index of first Gaussian slot
  bool full;
  double lo, hi;

  std::vector<double> to_public(std::span<const double> u) const {
    std::vector<double> p(u.begin(), u.end());
    if (full) {
      p[g + 1] = bounded_lambda(u[g + 1], lo, hi);
      p[g + 2] = bounded_lambda(u[g + 2], lo, hi);
    }
    return p;
  }
  std::vector<double> to_search(std::span<const double> p) const {
    std::vector<double> u(p.begin(), p.end());
    if (full) {
      u[g + 1] = unbounded_lambda(p[g + 1], lo, hi);
      u[g + 2] = unbounded_lambda(p[g + 2], lo, hi);
    }
    return u;
  }
};

std::vector<double> random_start(const AnsatzSpec& a, const OptimizerConfig& config, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(index), std::uint64_t{0x6f7074}};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> log_lambda(std::log(config.lambda_min), std::log(config.lambda_max));
  std::vector<double> p;
  for (std::size_t k = 0; k < a.coefficient_parameters(); ++k) p.push_back(normal(rng));
  p.push_back(angle(rng));
  if (a.layers == GaussianLayers::Full) {
    p.push_back(std::exp(log_lambda(rng)));
    p.push_back(std::exp(log_lambda(rng)));
    p.push_back(angle(rng));
  }
  return p;
}

}  // namespace

OptimizationRecord minimize(const AnsatzSpec& ansatz, double kappa, const OptimizerConfig& config, const SearchExtras& extras) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  ansatz.validate();
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("minimize: kappa must be >= 0");
  const double v_g = extras.v_g ? *extras.v_g : gaussian_benchmark(kappa, config).report.total;

  const SearchSpace space{ansatz.coefficient_parameters(), ansatz.layers == GaussianLayers::Full, config.lambda_min,
                          config.lambda_max};
  std::vector<std::vector<double>> starts;
  for (const auto& w : extras.warm_starts) {
    if (w.size() != ansatz.parameter_count()) throw std::invalid_argument("minimize: warm start has the wrong length");
    starts.push_back(space.to_search(w));
  }
  for (int s = 0; s < config.starts; ++s) starts.push_back(space.to_search(random_start(ansatz, config, static_cast<std::size_t>(s))));

  std::vector<LocalSearchResult> results(starts.size());
  const int workers = worker_count(config, starts.size());
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      Objective f(ansatz, kappa, config);
      const ObjectiveFn fn = [&](std::span<const double> u) { return f(space.to_public(u)); };
      for (std::size_t i = static_cast<std::size_t>(w); i < starts.size(); i += static_cast<std::size_t>(workers)) {
        results[i] = bfgs_minimize(fn, starts[i], config);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Deterministic reduction in start order: lower value wins, near-ties go to
  // the lexicographically smaller gauge-fixed vector.
  Objective f(ansatz, kappa, config);
  int converged = 0;
  std::vector<double> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (!r.converged) continue;
    ++converged;
    const auto p = gauge_fixed(f, space.to_public(r.x));
    const double tie = 1e-10 * std::max(1.0, std::abs(best_value));
    if (best.empty() || r.value < best_value - tie || (std::abs(r.value - best_value) <= tie && lexicographically_less(p, best))) {
      best_value = std::min(best_value, r.value);
      best = p;
    }
  }
  if (converged == 0) throw NumericalError("minimize: no local search converged");

  OptimizationRecord rec;
  rec.kappa = kappa;
  rec.ansatz = ansatz;
  rec.gaussian = f.gaussian(best);
  Eigen::VectorXcd core = f.core(best);
  core.normalize();
  rec.core.assign(core.data(), core.data() + core.size());
  const auto report = f.report(best);
  rec.v_ng = report.total;
  rec.per_mode = report.per_mode;
  rec.means = report.means;
  rec.v_g = v_g;
  rec.r_v = rec.v_ng / v_g;
  const double l1 = rec.gaussian.lambda1, l2 = rec.gaussian.lambda2;
  rec.i1 = kappa / (l1 * l1 * l2);
  rec.i2 = kappa / (l1 * l2 * l2);
  rec.seed = config.seed;
  rec.starts = config.starts;
  rec.converged_starts = converged;
  rec.dims = {ansatz.m + 1, ansatz.n + 1};
  if (space.full) {
    auto at_bound = [&](double l) { return l <= config.lambda_min * (1.0 + 1e-6) || l >= config.lambda_max * (1.0 - 1e-6); };
    rec.bound_hit = at_bound(l1) || at_bound(l2);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

// ---------------------------------------------------------------------------

std::string InvariantReport::to_string() const {
  if (violations.empty()) return "all invariants agree\n";
  std::ostringstream out;
  for (const auto& v : violations) {
    out << "records " << v.first << " and " << v.second << ": " << v.quantity << " " << v.first_value << " vs "
        << v.second_value << "\n";
  }
  return out.str();
}

InvariantReport check_invariants(const std::vector<OptimizationRecord>& records, double tolerance) {
  InvariantReport report;
  for (const auto& r : records) {
    if (r.ansatz.layers != GaussianLayers::Full) throw std::invalid_argument("check_invariants: records need the full Gaussian layer");
    if (!(r.ansatz == records.front().ansatz)) throw std::invalid_argument("check_invariants: records use different ansatz");
  }
  auto scalars = [](const OptimizationRecord& r) {
    const double l1 = r.gaussian.lambda1, l2 = r.gaussian.lambda2;
    return std::vector<std::pair<std::string, double>>{{"I1", r.i1},
                                                       {"I2", r.i2},
                                                       {"lambda1/lambda2", l1 / l2},
                                                       {"kappa/lambda1^3", r.kappa / (l1 * l1 * l1)},
                                                       {"kappa/lambda2^3", r.kappa / (l2 * l2 * l2)}};
  };
  for (std::size_t a = 0; a < records.size(); ++a) {
    for (std::size_t b = a + 1; b < records.size(); ++b) {
      const auto sa = scalars(records[a]), sb = scalars(records[b]);
      for (std::size_t k = 0; k < sa.size(); ++k) {
        const double x = sa[k].second, y = sb[k].second;
        if (std::abs(x - y) > tolerance * std::max(std::abs(x), std::abs(y))) {
          report.violations.push_back({a, b, sa[k].first, x, y});
        }
      }
      double worst = 0.0;
      for (std::size_t k = 0; k < records[a].core.size(); ++k) worst = std::max(worst, std::abs(records[a].core[k] - records[b].core[k]));
      if (worst > tolerance) report.violations.push_back({a, b, "core amplitude difference", worst, 0.0});
    }
  }
  return report;
}

std::string SweepResult::to_csv() const {
  std::string out = "kappa,r_v,v_ng,v_g,local_minimum\n";
  char buf[160];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%d\n", r.kappa, r.r_v, r.v_ng, r.v_g, local_minimum[i] ? 1 : 0);
    out += buf;
  }
  return out;
}

SweepResult sweep(const AnsatzSpec& ansatz, const std::vector<double>& kappas, const OptimizerConfig& config) {
  if (kappas.empty()) throw std::invalid_argument("sweep: no kappa values");
  std::vector<double> ks = kappas;
  std::sort(ks.begin(), ks.end());
  SweepResult out;
  for (double k : ks) {
    SearchExtras extras;
    if (!out.records.empty()) {
      const auto& prev = out.records.back();
      auto p = prev.parameters();
      if (ansatz.layers == GaussianLayers::Full && prev.kappa > 0.0 && k > 0.0) {
        // Optimal squeezing follows kappa^(1/3) along the invariants.
        const double s = std::cbrt(k / prev.kappa);
        const std::size_t g = ansatz.coefficient_parameters();
        for (std::size_t j : {g + 1, g + 2}) p[j] = std::clamp(p[j] * s, config.lambda_min, config.lambda_max);
      }
      extras.warm_starts.push_back(std::move(p));
    }
    out.records.push_back(minimize(ansatz, k, config, extras));
  }
  out.local_minimum.assign(out.records.size(), false);
  for (std::size_t i = 1; i + 1 < out.records.size(); ++i) {
    const double r = out.records[i].r_v;
    out.local_minimum[i] = r < out.records[i - 1].r_v && r < out.records[i + 1].r_v;
  }
  return out;
}

}  // namespace mmgate
