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

#include "mmgate/gridsim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "mmgate/bfgs.hpp"

namespace mmgate::grid {

namespace {

constexpr double kTail = 1e-8;
constexpr double kMeasureLeak = 1e-6;
constexpr double kShearLeak = 1e-3;
constexpr char kMagic[8] = {'M', 'M', 'G', 'R', 'I', 'D', 'W', 'F'};
constexpr std::uint32_t kSnapshotVersion = 1;
constexpr const char* kConvention = "hbar=1 x=(a+a^dag)/sqrt2 phi0=pi^-1/4 exp(-x^2/2) row-major mode0-slowest";

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / base) throw std::invalid_argument("grid: state too large");
    r *= base;
  }
  return r;
}

// Planner calls are not thread safe in FFTW.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place length-L transforms on a private buffer.
class LineFft {
 public:
  explicit LineFft(int n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(n));
    if (!buf_) throw std::bad_alloc();
    fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~LineFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  LineFft(const LineFft&) = delete;
  LineFft& operator=(const LineFft&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

// Calls f(base) for the first element of every line along `mode`.
template <class F>
void for_each_line(std::size_t size, int points, std::size_t stride, F&& f) {
  const std::size_t block = stride * static_cast<std::size_t>(points);
  for (std::size_t outer = 0; outer < size; outer += block)
    for (std::size_t inner = 0; inner < stride; ++inner) f(outer + inner);
}

// Row-major odometer over an N-mode grid.
template <class F>
void for_each_point(int modes, int points, std::size_t size, F&& f) {
  std::vector<int> idx(static_cast<std::size_t>(modes), 0);
  for (std::size_t i = 0; i < size; ++i) {
    f(i, idx);
    for (int j = modes - 1; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] < points) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
}

// An x-only polynomial tabulated against grid coordinates.
class GridPolynomial {
 public:
  GridPolynomial(const Polynomial& poly, const GridSpec& grid, int modes) : modes_(static_cast<std::size_t>(modes)) {
    if (!poly.is_x_only()) throw std::invalid_argument("grid: polynomial contains p symbols, only x-only terms act as phases");
    if (poly.modes() > modes_) throw std::invalid_argument("grid: polynomial has more modes than the state");
    const std::size_t pm = poly.modes();
    int top = 0;
    for (const auto& [e, c] : poly.terms()) {
      Term t{c, std::vector<int>(pm)};
      for (std::size_t j = 0; j < pm; ++j) {
        t.powers[j] = e[2 * j];
        top = std::max(top, e[2 * j]);
      }
      terms_.push_back(std::move(t));
    }
    const auto L = static_cast<std::size_t>(grid.points);
    table_.assign(L * static_cast<std::size_t>(top + 1), 1.0);
    stride_ = static_cast<std::size_t>(top + 1);
    for (std::size_t k = 0; k < L; ++k) {
      const double x = grid.coordinate(static_cast<int>(k));
      for (int e = 1; e <= top; ++e) table_[k * stride_ + static_cast<std::size_t>(e)] = table_[k * stride_ + static_cast<std::size_t>(e) - 1] * x;
    }
  }

  double operator()(const std::vector<int>& idx) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double v = t.coefficient;
      for (std::size_t j = 0; j < t.powers.size(); ++j)
        if (t.powers[j]) v *= table_[static_cast<std::size_t>(idx[j]) * stride_ + static_cast<std::size_t>(t.powers[j])];
      s += v;
    }
    return s;
  }

  bool empty() const { return terms_.empty(); }

 private:
  struct Term {
    double coefficient;
    std::vector<int> powers;
  };
  std::size_t modes_;
  std::vector<Term> terms_;
  std::vector<double> table_;
  std::size_t stride_ = 1;
};

// p_j psi by spectral differentiation along mode j.
std::vector<Complex> momentum_apply(const std::vector<Complex>& psi, const GridSpec& grid, std::size_t stride, LineFft& fft) {
  const int L = grid.points;
  const auto k = grid.wavenumbers();
  std::vector<Complex> out(psi.size());
  Complex* buf = fft.data();
  const double inv = 1.0 / L;
  for_each_line(psi.size(), L, stride, [&](std::size_t base) {
    for (int n = 0; n < L; ++n) buf[n] = psi[base + static_cast<std::size_t>(n) * stride];
    fft.forward();
    for (int m = 0; m < L; ++m) buf[m] *= (m == L / 2 ? 0.0 : k[static_cast<std::size_t>(m)]) * inv;
    fft.backward();
    for (int n = 0; n < L; ++n) out[base + static_cast<std::size_t>(n) * stride] = buf[n];
  });
  return out;
}

// f(u) -> f(u + coefficient * y) along `mode`, y the coordinate of `by`.
void shear(GridWavefunction& state, int mode, int by, double coefficient, LineFft& fft) {
  const auto& g = state.grid();
  const int L = g.points;
  const auto k = g.wavenumbers();
  const std::size_t stride = state.stride(mode), by_stride = state.stride(by);
  auto& a = state.amplitudes();
  Complex* buf = fft.data();
  const double inv = 1.0 / L;
  for_each_line(a.size(), L, stride, [&](std::size_t base) {
    const int kb = static_cast<int>((base / by_stride) % static_cast<std::size_t>(L));
    const double s = coefficient * g.coordinate(kb);
    for (int n = 0; n < L; ++n) buf[n] = a[base + static_cast<std::size_t>(n) * stride];
    fft.forward();
    for (int m = 0; m < L; ++m) {
      const double km = k[static_cast<std::size_t>(m)];
      buf[m] *= (m == L / 2 ? Complex(std::cos(km * s), 0.0) : std::polar(1.0, km * s)) * inv;
    }
    fft.backward();
    for (int n = 0; n < L; ++n) a[base + static_cast<std::size_t>(n) * stride] = buf[n];
  });
}

// g(u, v) = f((u - v)/sqrt2, (u + v)/sqrt2) on the (first, second) plane,
// as three Fourier shears.
void rotate_quarter(GridWavefunction& state, int first, int second, LineFft& fft) {
  const double a = -std::tan(std::numbers::pi / 8), b = std::sin(std::numbers::pi / 4);
  shear(state, first, second, a, fft);
  shear(state, second, first, b, fft);
  shear(state, first, second, a, fft);
}

// Trigonometric interpolation matrix: row k holds the weights giving the
// interpolant at scale * x_k + shift; rows outside [-X, X) are zero.
Eigen::MatrixXcd resampling_matrix(const GridSpec& g, double scale, double shift) {
  const int L = g.points;
  const auto k = g.wavenumbers();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(L, L);
  for (int r = 0; r < L; ++r) {
    const double u = scale * g.coordinate(r) + shift;
    if (u < -g.half_width || u >= g.half_width) continue;
    for (int n = 0; n < L; ++n) {
      const double d = u - g.coordinate(n);
      Complex s = 0.0;
      for (int j = 0; j < L; ++j) {
        const double kj = k[static_cast<std::size_t>(j)];
        s += j == L / 2 ? Complex(std::cos(kj * d), 0.0) : std::polar(1.0, kj * d);
      }
      m(r, n) = s / static_cast<double>(L);
    }
  }
  return m;
}

// out = M applied along `mode`.
void transform_lines(GridWavefunction& state, int mode, const Eigen::MatrixXcd& m) {
  const int L = state.grid().points;
  const std::size_t stride = state.stride(mode);
  auto& a = state.amplitudes();
  Eigen::VectorXcd line(L);
  for_each_line(a.size(), L, stride, [&](std::size_t base) {
    for (int n = 0; n < L; ++n) line(n) = a[base + static_cast<std::size_t>(n) * stride];
    const Eigen::VectorXcd out = m * line;
    for (int n = 0; n < L; ++n) a[base + static_cast<std::size_t>(n) * stride] = out(n);
  });
}

// Offsets of measured and remaining sub-indices in a flattened state.
struct Split {
  std::vector<int> measured;
  std::vector<int> remaining;
  std::vector<std::size_t> measured_offsets;
  std::vector<std::size_t> remaining_offsets;
};

std::vector<std::size_t> offsets_for(const GridWavefunction& s, const std::vector<int>& modes) {
  const int L = s.grid().points;
  std::vector<std::size_t> out(ipow(static_cast<std::size_t>(L), static_cast<int>(modes.size())));
  for_each_point(static_cast<int>(modes.size()), L, out.size(), [&](std::size_t i, const std::vector<int>& idx) {
    std::size_t o = 0;
    for (std::size_t j = 0; j < modes.size(); ++j) o += static_cast<std::size_t>(idx[j]) * s.stride(modes[j]);
    out[i] = o;
  });
  return out;
}

Split split_modes(const GridWavefunction& s, const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("homodyne: no modes to measure");
  std::vector<bool> used(static_cast<std::size_t>(s.modes()), false);
  for (int m : modes) {
    if (m < 0 || m >= s.modes()) throw std::invalid_argument("homodyne: mode index out of range");
    if (used[static_cast<std::size_t>(m)]) throw std::invalid_argument("homodyne: mode measured twice");
    used[static_cast<std::size_t>(m)] = true;
  }
  Split sp;
  sp.measured = modes;
  for (int j = 0; j < s.modes(); ++j)
    if (!used[static_cast<std::size_t>(j)]) sp.remaining.push_back(j);
  if (sp.remaining.empty()) throw std::invalid_argument("homodyne: at least one mode must remain unmeasured");
  if (s.leaked() > kMeasureLeak)
    throw GridDomainError("homodyne: " + std::to_string(s.leaked()) + " of the norm left the grid, enlarge the domain");
  sp.measured_offsets = offsets_for(s, sp.measured);
  sp.remaining_offsets = offsets_for(s, sp.remaining);
  return sp;
}

MeasurementOutcome outcome_for(const GridWavefunction& s, const Split& sp, std::size_t m, double weight) {
  MeasurementOutcome o;
  o.modes = sp.measured;
  const int L = s.grid().points;
  o.indices.resize(sp.measured.size());
  o.q.resize(sp.measured.size());
  std::size_t rest = m;
  for (std::size_t j = sp.measured.size(); j-- > 0;) {
    o.indices[j] = static_cast<int>(rest % static_cast<std::size_t>(L));
    rest /= static_cast<std::size_t>(L);
    o.q[j] = s.grid().coordinate(o.indices[j]);
  }
  o.probability_density = weight / std::pow(s.grid().spacing(), static_cast<double>(sp.measured.size()));
  return o;
}

// Writes the normalized slice into cond; returns its probability mass.
double fill_conditional(const GridWavefunction& s, const Split& sp, std::size_t m, GridWavefunction& cond) {
  const std::size_t base = sp.measured_offsets[m];
  auto& c = cond.amplitudes();
  double s2 = 0.0;
  for (std::size_t r = 0; r < sp.remaining_offsets.size(); ++r) {
    c[r] = s[base + sp.remaining_offsets[r]];
    s2 += std::norm(c[r]);
  }
  if (s2 == 0.0) return 0.0;
  const double scale = 1.0 / std::sqrt(s2 * cond.volume_element());
  for (auto& v : c) v *= scale;
  cond.set_leaked(0.0);
  return s2 * s.volume_element();
}

void check_protocol_inputs(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v) {
  if (!(input.grid() == ancilla.grid())) throw std::invalid_argument("protocol: input and ancilla grids differ");
  if (input.modes() != ancilla.modes()) throw std::invalid_argument("protocol: need one ancilla per target mode");
  if (v.modes() != static_cast<std::size_t>(input.modes()))
    throw std::invalid_argument("protocol: V must act on exactly the target modes");
  if (!v.is_x_only()) throw std::invalid_argument("protocol: V must contain x symbols only");
}

std::vector<int> ancilla_modes(int n) {
  std::vector<int> m;
  for (int j = 0; j < n; ++j) m.push_back(n + j);
  return m;
}

// Coupled joint state, ready for measuring the ancillas.
GridWavefunction coupled(const GridWavefunction& input, const GridWavefunction& ancilla, Coupling coupling) {
  GridWavefunction joint = product(input, ancilla);
  const int n = input.modes();
  if (coupling == Coupling::Qsg) {
    for (int j = 0; j < n; ++j) qsg_couple(joint, j, n + j);
  } else {
    LineFft fft(joint.grid().points);
    for (int j = 0; j < n; ++j) rotate_quarter(joint, j, n + j, fft);
  }
  return joint;
}

// Turns a conditional target slice into the protocol output for outcome q:
// beam-splitter resampling when requested, then the feed-forward phase.
class BranchProcessor {
 public:
  BranchProcessor(const Polynomial& v, const GridSpec& grid, FeedPolicy policy, Coupling coupling)
      : v_(v), grid_(grid), policy_(policy), coupling_(coupling), cache_(static_cast<std::size_t>(grid.points)) {}

  // Returns the resampling norm error (0 for the QSG route).
  double process(GridWavefunction& cond, const MeasurementOutcome& o) {
    double error = 0.0;
    std::vector<double> shift = o.q;
    if (coupling_ == Coupling::BeamSplitter) {
      const double before = cond.norm();
      for (int j = 0; j < cond.modes(); ++j) {
        const auto& m = matrix(o.indices[static_cast<std::size_t>(j)]);
        transform_lines(cond, j, m);
      }
      const double after = cond.norm();
      error = std::abs(1.0 - after / before);
      if (after == 0.0) throw NumericalError("beamsplitter_variant: resampled branch vanished");
      cond.normalize();
      for (auto& q : shift) q *= std::numbers::sqrt2;
    }
    if (policy_ == FeedPolicy::Feedforward) apply_phase_in_place(cond, -shift_polynomial(v_, shift));
    return error;
  }

 private:
  const Eigen::MatrixXcd& matrix(int index) {
    auto& slot = cache_[static_cast<std::size_t>(index)];
    if (!slot) slot = std::pow(2.0, 0.25) * resampling_matrix(grid_, std::numbers::sqrt2, grid_.coordinate(index));
    return *slot;
  }

  const Polynomial& v_;
  GridSpec grid_;
  FeedPolicy policy_;
  Coupling coupling_;
  std::vector<std::optional<Eigen::MatrixXcd>> cache_;
};

bool inside_window(const MeasurementOutcome& o, double epsilon) {
  for (double q : o.q)
    if (std::abs(q) > epsilon + 1e-12) return false;
  return true;
}

ProtocolResult run(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                   const ProtocolOptions& options, Coupling coupling, double max_error) {
  check_protocol_inputs(input, ancilla, v);
  const int n = input.modes();
  const GridWavefunction joint = coupled(input, ancilla, coupling);
  BranchProcessor proc(v, input.grid(), options.policy, coupling);
  const auto measured = ancilla_modes(n);

  std::optional<ProtocolResult> result;
  if (options.policy == FeedPolicy::Postselect) {
    if (!(options.epsilon >= 0.0)) throw std::invalid_argument("run_protocol: epsilon must be non-negative");
    double acceptance = 0.0, best = std::numeric_limits<double>::infinity();
    homodyne_scan(joint, measured, [&](const MeasurementOutcome& o, double w, GridWavefunction& cond) {
      if (!inside_window(o, options.epsilon)) return;
      acceptance += w;
      double r2 = 0.0;
      for (double q : o.q) r2 += q * q;
      if (r2 < best) {
        best = r2;
        result = ProtocolResult{cond, o};
      }
    });
    if (!result || acceptance <= 0.0) throw NumericalError("run_protocol: no outcome inside the post-selection window");
    result->outcome.acceptance = acceptance;
  } else {
    std::mt19937_64 rng(options.seed);
    auto c = homodyne_sample(joint, measured, rng);
    result = ProtocolResult{std::move(c.state), std::move(c.outcome)};
  }
  const double error = proc.process(result->output, result->outcome);
  if (error > max_error)
    throw NumericalError("beamsplitter_variant: resampling norm error " + std::to_string(error) + " above threshold");
  return std::move(*result);
}

}  // namespace

GridSpec::GridSpec(int points_, double half_width_) : points(points_), half_width(half_width_) {
  if (points < 8 || points % 2 != 0) throw std::invalid_argument("GridSpec: need an even number of points, at least 8");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw std::invalid_argument("GridSpec: half-width must be positive");
}

long GridSpec::nearest_index(double x) const { return std::lround((x + half_width) / spacing()); }

std::vector<double> GridSpec::wavenumbers() const {
  std::vector<double> k(static_cast<std::size_t>(points));
  const double unit = 2.0 * std::numbers::pi / (points * spacing());
  for (int m = 0; m < points; ++m) k[static_cast<std::size_t>(m)] = unit * (m < points / 2 ? m : m - points);
  return k;
}

GridWavefunction::GridWavefunction(GridSpec grid, int modes) : grid_(grid), modes_(modes) {
  (void)GridSpec(grid.points, grid.half_width);  // validates
  if (modes < 1) throw std::invalid_argument("GridWavefunction: need at least one mode");
  amplitudes_.assign(ipow(static_cast<std::size_t>(grid.points), modes), Complex(0.0, 0.0));
}

std::size_t GridWavefunction::stride(int mode) const {
  if (mode < 0 || mode >= modes_) throw std::out_of_range("GridWavefunction: mode out of range");
  return ipow(static_cast<std::size_t>(grid_.points), modes_ - 1 - mode);
}

double GridWavefunction::volume_element() const { return std::pow(grid_.spacing(), modes_); }

double GridWavefunction::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s * volume_element();
}

void GridWavefunction::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw NumericalError("GridWavefunction: cannot normalize a zero state");
  const double scale = 1.0 / std::sqrt(n);
  for (auto& a : amplitudes_) a *= scale;
  leaked_ = 0.0;
}

std::vector<double> hermite_functions(int n, double x) {
  std::vector<double> h(static_cast<std::size_t>(n + 1));
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n >= 1) h[1] = std::numbers::sqrt2 * x * h[0];
  for (int k = 1; k < n; ++k)
    h[static_cast<std::size_t>(k + 1)] = std::sqrt(2.0 / (k + 1)) * x * h[static_cast<std::size_t>(k)] -
                                         std::sqrt(static_cast<double>(k) / (k + 1)) * h[static_cast<std::size_t>(k - 1)];
  return h;
}

namespace {

struct CoreTerms {
  std::vector<std::vector<int>> occupations;
  std::vector<Complex> amplitudes;
  std::vector<int> highest;
};

CoreTerms occupied(const fock::KetVector& state) {
  CoreTerms t;
  const auto& b = state.basis();
  t.highest.assign(b.modes(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Complex c = state.amplitudes()(static_cast<Eigen::Index>(i));
    if (c == Complex(0.0, 0.0)) continue;
    auto occ = b.occupation(i);
    for (std::size_t j = 0; j < occ.size(); ++j) t.highest[j] = std::max(t.highest[j], occ[j]);
    t.occupations.push_back(std::move(occ));
    t.amplitudes.push_back(c);
  }
  return t;
}

}  // namespace

GridWavefunction fock_to_grid(const fock::KetVector& state, const GridSpec& grid) {
  const auto t = occupied(state);
  const int n = static_cast<int>(state.basis().modes());
  for (std::size_t j = 0; j < t.highest.size(); ++j) {
    const double tail = std::abs(hermite_functions(t.highest[j], grid.half_width).back());
    if (tail > kTail)
      throw GridDomainError("fock_to_grid: |phi_" + std::to_string(t.highest[j]) + "(X)| = " + std::to_string(tail) +
                            " above 1e-8 in mode " + std::to_string(j + 1) + ", use a larger half-width");
  }
  int top = 0;
  for (int h : t.highest) top = std::max(top, h);
  std::vector<std::vector<double>> table(static_cast<std::size_t>(grid.points));
  for (int k = 0; k < grid.points; ++k) table[static_cast<std::size_t>(k)] = hermite_functions(top, grid.coordinate(k));

  GridWavefunction out(grid, n);
  for_each_point(n, grid.points, out.size(), [&](std::size_t i, const std::vector<int>& idx) {
    Complex s = 0.0;
    for (std::size_t b = 0; b < t.amplitudes.size(); ++b) {
      double w = 1.0;
      for (int j = 0; j < n; ++j)
        w *= table[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])][static_cast<std::size_t>(t.occupations[b][static_cast<std::size_t>(j)])];
      s += t.amplitudes[b] * w;
    }
    out[i] = s;
  });
  return out;
}

GridWavefunction fock_to_grid(const fock::KetVector& state, const GridSpec& grid, const SymplecticTransform& transform) {
  const int n = static_cast<int>(state.basis().modes());
  if (transform.modes() != static_cast<std::size_t>(n)) throw std::invalid_argument("fock_to_grid: transform has wrong mode count");
  const Eigen::MatrixXd& s = transform.matrix();
  if (s.topRightCorner(n, n).cwiseAbs().maxCoeff() > 1e-12 || s.bottomLeftCorner(n, n).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("fock_to_grid: transform mixes x and p, no point-transformation form");
  const Eigen::MatrixXd a = s.topLeftCorner(n, n);
  const Eigen::MatrixXd b = a.inverse();
  const Eigen::VectorXd shift = transform.displacement().head(n);
  const Eigen::VectorXd kick = transform.displacement().tail(n);
  const double jac = std::sqrt(std::abs(b.determinant()));

  const auto t = occupied(state);
  int top = 0;
  for (int h : t.highest) top = std::max(top, h);

  GridWavefunction out(grid, n);
  Eigen::VectorXd x(n);
  double boundary = 0.0;
  std::vector<std::vector<double>> h(static_cast<std::size_t>(n));
  for_each_point(n, grid.points, out.size(), [&](std::size_t i, const std::vector<int>& idx) {
    bool edge = false;
    for (int j = 0; j < n; ++j) {
      x(j) = grid.coordinate(idx[static_cast<std::size_t>(j)]);
      edge = edge || idx[static_cast<std::size_t>(j)] == 0 || idx[static_cast<std::size_t>(j)] == grid.points - 1;
    }
    const Eigen::VectorXd y = b * (x - shift);
    for (int j = 0; j < n; ++j) h[static_cast<std::size_t>(j)] = hermite_functions(top, y(j));
    Complex v = 0.0;
    for (std::size_t c = 0; c < t.amplitudes.size(); ++c) {
      double w = 1.0;
      for (int j = 0; j < n; ++j) w *= h[static_cast<std::size_t>(j)][static_cast<std::size_t>(t.occupations[c][static_cast<std::size_t>(j)])];
      v += t.amplitudes[c] * w;
    }
    v *= jac * std::polar(1.0, kick.dot(x));
    out[i] = v;
    if (edge) boundary = std::max(boundary, std::abs(v));
  });
  if (boundary > kTail)
    throw GridDomainError("fock_to_grid: |psi| = " + std::to_string(boundary) + " on the boundary, use a larger half-width");
  return out;
}

GridWavefunction coherent_state(const GridSpec& grid, const std::vector<Complex>& alphas) {
  const int n = static_cast<int>(alphas.size());
  GridWavefunction out(grid, n);
  std::vector<std::vector<Complex>> f(alphas.size(), std::vector<Complex>(static_cast<std::size_t>(grid.points)));
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double x0 = std::numbers::sqrt2 * alphas[j].real(), p0 = std::numbers::sqrt2 * alphas[j].imag();
    for (int k = 0; k < grid.points; ++k) {
      const double x = grid.coordinate(k);
      f[j][static_cast<std::size_t>(k)] = std::exp(Complex(-0.5 * (x - x0) * (x - x0), p0 * x));
    }
  }
  for_each_point(n, grid.points, out.size(), [&](std::size_t i, const std::vector<int>& idx) {
    Complex v = 1.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) v *= f[j][static_cast<std::size_t>(idx[j])];
    out[i] = v;
  });
  out.normalize();
  return out;
}

GridWavefunction ideal_ancilla(const GridSpec& grid, const Polynomial& v, double envelope_std) {
  if (!(envelope_std > 0.0)) throw std::invalid_argument("ideal_ancilla: envelope width must be positive");
  const int n = static_cast<int>(v.modes());
  GridPolynomial phase(v, grid, n);
  GridWavefunction out(grid, n);
  const double c = 1.0 / (4.0 * envelope_std * envelope_std);
  for_each_point(n, grid.points, out.size(), [&](std::size_t i, const std::vector<int>& idx) {
    double r2 = 0.0;
    for (int k : idx) r2 += grid.coordinate(k) * grid.coordinate(k);
    out[i] = std::polar(std::exp(-c * r2), -phase(idx));
  });
  out.normalize();
  return out;
}

GridWavefunction product(const GridWavefunction& a, const GridWavefunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("product: grids differ");
  GridWavefunction out(a.grid(), a.modes() + b.modes());
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex ai = a[i];
    Complex* dst = out.amplitudes().data() + i * nb;
    for (std::size_t j = 0; j < nb; ++j) dst[j] = ai * b[j];
  }
  out.set_leaked(1.0 - (1.0 - a.leaked()) * (1.0 - b.leaked()));
  return out;
}

void apply_phase_in_place(GridWavefunction& state, const Polynomial& poly) {
  GridPolynomial f(poly, state.grid(), state.modes());
  if (f.empty()) return;
  auto& a = state.amplitudes();
  for_each_point(state.modes(), state.grid().points, a.size(),
                 [&](std::size_t i, const std::vector<int>& idx) { a[i] *= std::polar(1.0, -f(idx)); });
}

GridWavefunction apply_phase(GridWavefunction state, const Polynomial& poly) {
  apply_phase_in_place(state, poly);
  return state;
}

void qsg_couple(GridWavefunction& state, int target_mode, int ancilla_mode) {
  if (target_mode == ancilla_mode) throw std::invalid_argument("qsg_couple: target and ancilla must differ");
  const std::size_t st = state.stride(target_mode), sa = state.stride(ancilla_mode);
  const int L = state.grid().points;
  auto& a = state.amplitudes();
  double dropped = 0.0;
  for_each_line(a.size(), L, sa, [&](std::size_t base) {
    const int kt = static_cast<int>((base / st) % static_cast<std::size_t>(L));
    const int s = kt - L / 2;  // new[k] = old[k + s]
    auto at = [&](int k) -> Complex& { return a[base + static_cast<std::size_t>(k) * sa]; };
    if (s > 0) {
      for (int k = 0; k < s; ++k) dropped += std::norm(at(k));
      for (int k = 0; k < L - s; ++k) at(k) = at(k + s);
      for (int k = std::max(0, L - s); k < L; ++k) at(k) = 0.0;
    } else if (s < 0) {
      for (int k = L + s; k < L; ++k) dropped += std::norm(at(k));
      for (int k = L - 1; k >= -s; --k) at(k) = at(k + s);
      for (int k = 0; k < std::min(L, -s); ++k) at(k) = 0.0;
    }
  });
  state.add_leaked(dropped * state.volume_element());
  if (state.leaked() > kShearLeak)
    throw GridDomainError("qsg_couple: " + std::to_string(state.leaked()) + " of the norm sheared off the grid, enlarge the domain");
}

Conditional homodyne_sample(const GridWavefunction& state, const std::vector<int>& modes, std::mt19937_64& rng) {
  const Split sp = split_modes(state, modes);
  std::vector<double> cdf(sp.measured_offsets.size());
  double total = 0.0;
  for (std::size_t m = 0; m < cdf.size(); ++m) {
    double s = 0.0;
    for (std::size_t off : sp.remaining_offsets) s += std::norm(state[sp.measured_offsets[m] + off]);
    total += s;
    cdf[m] = total;
  }
  if (!(total > 0.0)) throw NumericalError("homodyne_sample: zero-probability state");
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  const std::size_t m = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  const std::size_t pick = std::min(m, cdf.size() - 1);
  GridWavefunction cond(state.grid(), static_cast<int>(sp.remaining.size()));
  const double w = fill_conditional(state, sp, pick, cond);
  return Conditional{outcome_for(state, sp, pick, w), w, std::move(cond)};
}

Postselection homodyne_postselect(const GridWavefunction& state, const std::vector<int>& modes, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("homodyne_postselect: epsilon must be non-negative");
  Postselection out;
  homodyne_scan(state, modes, [&](const MeasurementOutcome& o, double w, GridWavefunction& cond) {
    if (!inside_window(o, epsilon)) return;
    out.acceptance += w;
    out.branches.push_back(Conditional{o, w, cond});
  });
  if (out.branches.empty() || !(out.acceptance > 0.0))
    throw NumericalError("homodyne_postselect: zero acceptance, no grid outcome inside the window");
  for (auto& b : out.branches) b.outcome.acceptance = out.acceptance;
  return out;
}

void homodyne_scan(const GridWavefunction& state, const std::vector<int>& modes, const ScanVisitor& visit) {
  const Split sp = split_modes(state, modes);
  GridWavefunction cond(state.grid(), static_cast<int>(sp.remaining.size()));
  for (std::size_t m = 0; m < sp.measured_offsets.size(); ++m) {
    const double w = fill_conditional(state, sp, m, cond);
    if (w == 0.0) continue;
    visit(outcome_for(state, sp, m, w), w, cond);
  }
}

double fidelity(const GridWavefunction& a, const GridWavefunction& b) {
  if (!(a.grid() == b.grid()) || a.modes() != b.modes()) throw std::invalid_argument("fidelity: states live on different grids");
  Complex ov = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ov += std::conj(a[i]) * b[i];
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericalError("fidelity: zero state");
  return std::norm(ov) / (na * nb);
}

double x_moment(const GridWavefunction& state, const std::vector<int>& powers) {
  if (powers.size() != static_cast<std::size_t>(state.modes())) throw std::invalid_argument("x_moment: one power per mode");
  const auto& g = state.grid();
  double s = 0.0, n = 0.0;
  for_each_point(state.modes(), g.points, state.size(), [&](std::size_t i, const std::vector<int>& idx) {
    const double w = std::norm(state[i]);
    double m = w;
    for (std::size_t j = 0; j < powers.size(); ++j) m *= std::pow(g.coordinate(idx[j]), powers[j]);
    s += m;
    n += w;
  });
  if (!(n > 0.0)) throw NumericalError("x_moment: zero state");
  return s / n;
}

Moments moments(const GridWavefunction& state) {
  const int n = state.modes();
  const auto& g = state.grid();
  LineFft fft(g.points);
  std::vector<std::vector<Complex>> p(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) p[static_cast<std::size_t>(j)] = momentum_apply(state.amplitudes(), g, state.stride(j), fft);

  Moments m;
  m.mean = Eigen::VectorXd::Zero(2 * n);
  m.second = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  double norm = 0.0;
  std::vector<double> x(static_cast<std::size_t>(n));
  for_each_point(n, g.points, state.size(), [&](std::size_t i, const std::vector<int>& idx) {
    const Complex psi = state[i];
    const double w = std::norm(psi);
    norm += w;
    for (int a = 0; a < n; ++a) x[static_cast<std::size_t>(a)] = g.coordinate(idx[static_cast<std::size_t>(a)]);
    for (int a = 0; a < n; ++a) {
      const double xa = x[static_cast<std::size_t>(a)];
      const Complex pa = p[static_cast<std::size_t>(a)][i];
      m.mean(a) += w * xa;
      m.mean(n + a) += (std::conj(psi) * pa).real();
      for (int b = 0; b < n; ++b) {
        const Complex pb = p[static_cast<std::size_t>(b)][i];
        m.second(a, b) += w * xa * x[static_cast<std::size_t>(b)];
        m.second(n + a, n + b) += (std::conj(pa) * pb).real();
        m.second(a, n + b) += xa * (std::conj(psi) * pb).real();
      }
    }
  });
  if (!(norm > 0.0)) throw NumericalError("moments: zero state");
  m.mean /= norm;
  m.second /= norm;
  m.second.bottomLeftCorner(n, n) = m.second.topRightCorner(n, n).transpose();
  return m;
}

std::vector<double> QuadratureMoments::variance() const {
  std::vector<double> v(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) v[j] = square[j] - mean[j] * mean[j];
  return v;
}

double QuadratureMoments::total_variance() const {
  double s = 0.0;
  for (double v : variance()) s += v;
  return s;
}

QuadratureMoments nonlinear_quadrature_moments(const GridWavefunction& state, const Polynomial& v, bool strip_phase) {
  if (v.modes() != static_cast<std::size_t>(state.modes())) throw std::invalid_argument("nonlinear_quadrature_moments: V must act on every mode");
  const int n = state.modes();
  const auto& g = state.grid();
  GridWavefunction phi = state;
  if (strip_phase) apply_phase_in_place(phi, -v);
  LineFft fft(g.points);
  QuadratureMoments out;
  const double norm = phi.norm() / phi.volume_element();
  if (!(norm > 0.0)) throw NumericalError("nonlinear_quadrature_moments: zero state");
  for (int j = 0; j < n; ++j) {
    auto o = momentum_apply(phi.amplitudes(), g, phi.stride(j), fft);
    if (!strip_phase) {
      GridPolynomial grad(v.derivative_x(static_cast<std::size_t>(j)), g, n);
      for_each_point(n, g.points, phi.size(), [&](std::size_t i, const std::vector<int>& idx) { o[i] += grad(idx) * phi[i]; });
    }
    double mean = 0.0, square = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      mean += (std::conj(phi[i]) * o[i]).real();
      square += std::norm(o[i]);
    }
    out.mean.push_back(mean / norm);
    out.square.push_back(square / norm);
  }
  return out;
}

ProtocolResult run_protocol(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                            const ProtocolOptions& options) {
  return run(input, ancilla, v, options, Coupling::Qsg, std::numeric_limits<double>::infinity());
}

ProtocolResult beamsplitter_variant(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                                    const ProtocolOptions& options, double max_resampling_error) {
  return run(input, ancilla, v, options, Coupling::BeamSplitter, max_resampling_error);
}

ProtocolStatistics protocol_statistics(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                                       const ProtocolOptions& options, const GridWavefunction* reference, Coupling coupling) {
  check_protocol_inputs(input, ancilla, v);
  if (reference && (!(reference->grid() == input.grid()) || reference->modes() != input.modes()))
    throw std::invalid_argument("protocol_statistics: reference must match the input grid");
  const int n = input.modes();
  const GridWavefunction joint = coupled(input, ancilla, coupling);
  BranchProcessor proc(v, input.grid(), options.policy, coupling);

  ProtocolStatistics st;
  st.output_moments.mean = Eigen::VectorXd::Zero(2 * n);
  st.output_moments.second = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  std::vector<double> qmean(static_cast<std::size_t>(n), 0.0), qsquare(static_cast<std::size_t>(n), 0.0);
  double fid = 0.0;
  homodyne_scan(joint, ancilla_modes(n), [&](const MeasurementOutcome& o, double w, GridWavefunction& cond) {
    if (options.policy == FeedPolicy::Postselect && !inside_window(o, options.epsilon)) return;
    st.resampling_error += w * proc.process(cond, o);
    st.accepted += w;
    ++st.outcomes;
    if (reference) fid += w * fidelity(*reference, cond);
    if (options.moments) {
      const Moments m = moments(cond);
      st.output_moments.mean += w * m.mean;
      st.output_moments.second += w * m.second;
      const auto q = nonlinear_quadrature_moments(cond, v, true);
      for (int j = 0; j < n; ++j) {
        qmean[static_cast<std::size_t>(j)] += w * q.mean[static_cast<std::size_t>(j)];
        qsquare[static_cast<std::size_t>(j)] += w * q.square[static_cast<std::size_t>(j)];
      }
    }
  });
  if (!(st.accepted > 0.0)) throw NumericalError("protocol_statistics: no accepted outcome");
  st.fidelity = fid / st.accepted;
  st.resampling_error /= st.accepted;
  st.root_fidelity = std::sqrt(st.fidelity);
  st.output_moments.mean /= st.accepted;
  st.output_moments.second /= st.accepted;
  if (options.moments) {
    for (int j = 0; j < n; ++j) {
      const double m = qmean[static_cast<std::size_t>(j)] / st.accepted;
      st.output_nonlinear_variance.push_back(qsquare[static_cast<std::size_t>(j)] / st.accepted - m * m);
    }
  }
  return st;
}

std::string ProtocolStatistics::csv_header() const {
  return "label,accepted,outcomes,fidelity,root_fidelity,output_nonlinear_variance,resampling_error";
}

std::string ProtocolStatistics::csv_row(const std::string& label) const {
  double nv = 0.0;
  for (double v : output_nonlinear_variance) nv += v;
  std::ostringstream s;
  s.precision(12);
  s << label << ',' << accepted << ',' << outcomes << ',' << fidelity << ',' << root_fidelity << ',' << nv << ','
    << resampling_error;
  return s.str();
}

std::string AuditReport::csv_row(const std::string& label) const {
  std::ostringstream s;
  s.precision(12);
  s << label << ',' << audit;
  for (double v : per_mode) s << ',' << v;
  s << ',' << protocol_excess << ',' << (cross_checked ? 1 : 0);
  return s.str();
}

AuditReport heisenberg_noise_audit_report(const GridWavefunction& ancilla, const Polynomial& v, bool cross_check,
                                          double tolerance) {
  AuditReport r;
  r.per_mode = nonlinear_quadrature_moments(ancilla, v, false).variance();
  for (double x : r.per_mode) r.audit += x;
  if (!cross_check) return r;

  const int n = ancilla.modes();
  if (ipow(static_cast<std::size_t>(ancilla.grid().points), 2 * n) > (std::size_t{1} << 25))
    throw std::invalid_argument("heisenberg_noise_audit: grid too large for the protocol cross-check");
  const GridWavefunction input = coherent_state(ancilla.grid(), std::vector<Complex>(static_cast<std::size_t>(n)));
  const Moments in = moments(input);
  const auto st = protocol_statistics(input, ancilla, v, ProtocolOptions{});
  r.protocol_excess = 0.0;
  for (int j = 0; j < n; ++j) {
    const double var_in = in.covariance()(n + j, n + j);
    r.protocol_excess += st.output_nonlinear_variance[static_cast<std::size_t>(j)] - var_in;
  }
  r.cross_checked = true;
  if (std::abs(r.protocol_excess - r.audit) > tolerance)
    throw NumericalError("heisenberg_noise_audit: ancilla noise " + std::to_string(r.audit) + " but protocol excess " +
                         std::to_string(r.protocol_excess));
  return r;
}

double heisenberg_noise_audit(const GridWavefunction& ancilla, const Polynomial& v) {
  return heisenberg_noise_audit_report(ancilla, v).audit;
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <class T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) throw std::runtime_error("read_snapshot: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_snapshot(std::ostream& out, const GridWavefunction& state) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kSnapshotVersion);
  const std::string tag = kConvention;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tag.size()));
  out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
  put<std::int32_t>(out, state.grid().points);
  put<double>(out, state.grid().half_width);
  put<std::int32_t>(out, state.modes());
  put<double>(out, state.leaked());
  put<std::uint64_t>(out, state.size());
  for (const auto& a : state.amplitudes()) {
    put<double>(out, a.real());
    put<double>(out, a.imag());
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed");
}

GridWavefunction read_snapshot(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("read_snapshot: not a wavefunction snapshot");
  if (const auto version = get<std::uint32_t>(in); version != kSnapshotVersion)
    throw std::runtime_error("read_snapshot: unsupported version " + std::to_string(version));
  const auto len = get<std::uint32_t>(in);
  std::string tag(len, '\0');
  if (!in.read(tag.data(), len)) throw std::runtime_error("read_snapshot: truncated input");
  if (tag != kConvention) throw std::runtime_error("read_snapshot: unknown convention tag '" + tag + "'");
  const auto points = get<std::int32_t>(in);
  const auto half = get<double>(in);
  const auto modes = get<std::int32_t>(in);
  const auto leaked = get<double>(in);
  const auto count = get<std::uint64_t>(in);
  GridWavefunction s(GridSpec(points, half), modes);
  if (count != s.size()) throw std::runtime_error("read_snapshot: amplitude count does not match the header");
  for (auto& a : s.amplitudes()) {
    const double re = get<double>(in);
    a = Complex(re, get<double>(in));
  }
  s.set_leaked(leaked);
  return s;
}

}  // namespace mmgate::grid
