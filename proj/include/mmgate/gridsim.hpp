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

#ifndef MMGATE_GRIDSIM_HPP
#define MMGATE_GRIDSIM_HPP

// Position-representation simulation of the measurement-induced gate:
// targets T_1..T_N are coupled to ancillas A_1..A_N by quadrature sum gates
// |x, y> -> |x, y - x>, the ancilla positions are measured and the outcome
// dependent phase e^{+iF(x; q)}, F(x; q) = V(x + q) - V(x), is applied.
//
// Amplitudes live on a uniform grid x_k = -X + k dx, k = 0..L-1, one axis per
// mode, row-major with mode 0 slowest. Momenta are spectral derivatives.
// A 64^4 state takes 268 MB; nothing below copies a state of that size
// except product().

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmgate/fock.hpp"
#include "mmgate/quadpoly.hpp"

namespace mmgate::grid {

using Complex = std::complex<double>;

/// Domain too small: tails at the boundary or norm pushed off the grid.
class GridDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  int points = 64;          // L, even
  double half_width = 8.0;  // X

  GridSpec() = default;
  GridSpec(int points, double half_width);

  double spacing() const { return 2.0 * half_width / points; }
  double coordinate(int k) const { return -half_width + k * spacing(); }
  /// Index of the grid value nearest to x (not clamped).
  long nearest_index(double x) const;
  /// Angular wavenumbers in FFT order, Nyquist included as -pi/dx.
  std::vector<double> wavenumbers() const;

  bool operator==(const GridSpec&) const = default;
};

class GridWavefunction {
 public:
  GridWavefunction(GridSpec grid, int modes);

  const GridSpec& grid() const { return grid_; }
  int modes() const { return modes_; }
  std::size_t size() const { return amplitudes_.size(); }
  std::size_t stride(int mode) const;

  std::vector<Complex>& amplitudes() { return amplitudes_; }
  const std::vector<Complex>& amplitudes() const { return amplitudes_; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  /// Norm removed by boundary clipping so far; sum |psi|^2 dx^N = 1 - leaked.
  double leaked() const { return leaked_; }
  void add_leaked(double amount) { leaked_ += amount; }
  void set_leaked(double amount) { leaked_ = amount; }

  double volume_element() const;
  /// sum |psi|^2 dx^N
  double norm() const;
  /// Rescales to unit norm and clears the leak record.
  void normalize();

 private:
  GridSpec grid_;
  int modes_;
  std::vector<Complex> amplitudes_;
  double leaked_ = 0.0;
};

/// Harmonic-oscillator eigenfunctions phi_0..phi_n at x.
std::vector<double> hermite_functions(int n, double x);

/// psi(x) = sum c phi_n(x). Throws GridDomainError when the highest occupied
/// eigenfunction of some mode exceeds 1e-8 at |x| = X.
GridWavefunction fock_to_grid(const fock::KetVector& state, const GridSpec& grid);

/// Wavefunction of U|state> for a Gaussian U without x-p mixing
/// (U^dag x U = A x + a, U^dag p U = A^-T p + b). Throws
/// std::invalid_argument for other transforms and GridDomainError when
/// |psi| exceeds 1e-8 on the boundary.
GridWavefunction fock_to_grid(const fock::KetVector& state, const GridSpec& grid, const SymplecticTransform& transform);

/// Product of coherent states |alpha_1> ... |alpha_N>.
GridWavefunction coherent_state(const GridSpec& grid, const std::vector<Complex>& alphas);

/// e^{-iV(y)} times a Gaussian envelope whose position distribution has the
/// given standard deviation in every mode, normalized on the grid.
GridWavefunction ideal_ancilla(const GridSpec& grid, const Polynomial& v, double envelope_std);

/// Tensor product, modes of a first.
GridWavefunction product(const GridWavefunction& a, const GridWavefunction& b);

/// Multiplies by e^{-i poly(x)}. poly must be x-only on at most modes() modes.
void apply_phase_in_place(GridWavefunction& state, const Polynomial& poly);
GridWavefunction apply_phase(GridWavefunction state, const Polynomial& poly);

/// |x_T, y_A> -> |x_T, y_A - x_T> by index shear. Amplitude sheared off the
/// grid is dropped and recorded as leaked; throws GridDomainError when the
/// total leak exceeds 1e-3.
void qsg_couple(GridWavefunction& state, int target_mode, int ancilla_mode);

struct MeasurementOutcome {
  std::vector<int> modes;
  std::vector<double> q;
  std::vector<int> indices;        // grid indices of q
  double probability_density = 0.0;
  double acceptance = 1.0;         // post-selection success probability
};

struct Conditional {
  MeasurementOutcome outcome;
  double weight = 0.0;             // probability mass of this grid outcome
  GridWavefunction state;          // normalized, over the unmeasured modes
};

/// Inverse-CDF draw from the discrete marginal of the measured modes.
Conditional homodyne_sample(const GridWavefunction& state, const std::vector<int>& modes, std::mt19937_64& rng);

struct Postselection {
  double acceptance = 0.0;
  std::vector<Conditional> branches;  // every grid outcome with all |q_j| <= epsilon
};

/// Throws NumericalError when no grid outcome is accepted or the accepted
/// probability vanishes.
Postselection homodyne_postselect(const GridWavefunction& state, const std::vector<int>& modes, double epsilon);

/// Visits every grid outcome with nonzero weight. The conditional state is a
/// reused buffer; weights sum to 1 - leaked.
using ScanVisitor = std::function<void(const MeasurementOutcome&, double weight, GridWavefunction& conditional)>;
void homodyne_scan(const GridWavefunction& state, const std::vector<int>& modes, const ScanVisitor& visit);

/// |<a|b>|^2 / (<a|a><b|b>)
double fidelity(const GridWavefunction& a, const GridWavefunction& b);

/// <prod_j x_j^k_j> / norm
double x_moment(const GridWavefunction& state, const std::vector<int>& powers);

/// First and symmetrized second moments over xi = (x_1..x_N, p_1..p_N).
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd second;  // <{xi_a, xi_b}>/2

  Eigen::MatrixXd covariance() const { return second - mean * mean.transpose(); }
};
Moments moments(const GridWavefunction& state);

/// Per-mode <O_j> and <O_j^2> for O_j = p_j + dV/dx_j. With strip_phase the
/// state is first multiplied by e^{+iV}, which turns O_j into p_j; this is
/// the accurate route for states carrying the gate phase.
struct QuadratureMoments {
  std::vector<double> mean;
  std::vector<double> square;

  std::vector<double> variance() const;
  double total_variance() const;
};
QuadratureMoments nonlinear_quadrature_moments(const GridWavefunction& state, const Polynomial& v, bool strip_phase = false);

enum class FeedPolicy { Feedforward, Postselect, None };

struct ProtocolOptions {
  FeedPolicy policy = FeedPolicy::Feedforward;
  double epsilon = 0.0;     // post-selection window
  std::uint64_t seed = 1;   // outcome sampling
  bool moments = true;      // protocol_statistics: also accumulate output moments
};

struct ProtocolResult {
  GridWavefunction output;
  MeasurementOutcome outcome;
};

/// One run of the protocol on N targets with N ancillas (target j couples to
/// ancilla j). Feedforward and None sample one outcome; Postselect returns
/// the accepted outcome nearest q = 0, with acceptance in the outcome.
ProtocolResult run_protocol(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                            const ProtocolOptions& options);

/// Same circuit with a 50:50 beam splitter per pair instead of the QSG,
/// followed by the sqrt(2) rescaling and -q/sqrt(2) displacement done by
/// trigonometric resampling. Throws NumericalError when the resampling norm
/// error of the returned branch exceeds max_resampling_error.
ProtocolResult beamsplitter_variant(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                                    const ProtocolOptions& options, double max_resampling_error = 1e-4);

/// Outcome-averaged figures of the protocol (all outcomes for Feedforward and
/// None, the accepted window for Postselect).
struct ProtocolStatistics {
  double accepted = 0.0;            // total weight of the outcomes used
  double fidelity = 0.0;            // mean |<reference|out_q>|^2, when a reference is given
  double root_fidelity = 0.0;       // sqrt of the above
  Moments output_moments;           // of the outcome mixture
  std::vector<double> output_nonlinear_variance;  // Var(p_j + dV/dx_j) of the mixture
  double resampling_error = 0.0;  // probability-weighted norm error, beam-splitter route only
  std::size_t outcomes = 0;

  std::string csv_header() const;
  std::string csv_row(const std::string& label) const;
};

enum class Coupling { Qsg, BeamSplitter };

ProtocolStatistics protocol_statistics(const GridWavefunction& input, const GridWavefunction& ancilla, const Polynomial& v,
                                       const ProtocolOptions& options, const GridWavefunction* reference = nullptr,
                                       Coupling coupling = Coupling::Qsg);

struct AuditReport {
  double audit = 0.0;           // sum_j Var(p_Aj + dV/dx_Aj) on the ancilla
  std::vector<double> per_mode;
  double protocol_excess = 0.0;  // output minus input nonlinear variance, vacuum input
  bool cross_checked = false;
  std::string csv_row(const std::string& label) const;
};

/// Noise the ancilla adds to the gate. With cross_check the full protocol is
/// run on vacuum targets and NumericalError is thrown when its excess output
/// variance differs from the audit value by more than tolerance.
AuditReport heisenberg_noise_audit_report(const GridWavefunction& ancilla, const Polynomial& v, bool cross_check = true,
                                          double tolerance = 1e-3);
double heisenberg_noise_audit(const GridWavefunction& ancilla, const Polynomial& v);

/// Binary snapshot: magic, version, convention tag, grid, mode count, leak,
/// then little-endian complex doubles.
void write_snapshot(std::ostream& out, const GridWavefunction& state);
GridWavefunction read_snapshot(std::istream& in);

}  // namespace mmgate::grid

#endif  // MMGATE_GRIDSIM_HPP
