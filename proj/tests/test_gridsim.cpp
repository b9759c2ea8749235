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
#include <sstream>

#include <gtest/gtest.h>

#include "mmgate/gridsim.hpp"
#include "mmgate/nlsq.hpp"

using namespace mmgate;
using namespace mmgate::grid;

namespace {

using fock::FockBasis;
using fock::KetVector;

KetVector random_ket(const std::vector<int>& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  FockBasis b(dims);
  Eigen::VectorXcd a(static_cast<Eigen::Index>(b.size()));
  for (auto& v : a) v = {n(rng), n(rng)};
  return KetVector(b, a.normalized());
}

double fock_moment(const KetVector& psi, const Polynomial& poly) {
  return fock::expectation(fock::polynomial_operator(poly, psi.basis().with_guard(poly.degree())), psi).real();
}

// Outcome-averaged fidelity of the ideal-ancilla protocol for a coherent
// input: each target mode is reweighted by the shifted Gaussian envelope.
double envelope_fidelity_closed_form(double sd, int modes) {
  const double s2 = 0.5, v = sd * sd;
  const double post = s2 * v / (s2 + v);
  const double width = 2.0 * std::sqrt(s2 * post) / (s2 + post);
  const double shift = 1.0 / std::sqrt(1.0 + s2 * s2 / (s2 + v) / (s2 + post));
  return std::pow(width * shift, modes);
}

const Polynomial kCubic03 = Polynomial::monomial(2, {1, 0, 2, 0}, 0.3);

}  // namespace

TEST(GridSpec, Validation) {
  EXPECT_THROW(GridSpec(6, 8.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(33, 8.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(64, 0.0), std::invalid_argument);
  const GridSpec g(64, 8.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_DOUBLE_EQ(g.coordinate(32), 0.0);
  EXPECT_EQ(g.nearest_index(0.1), 32);
}

TEST(FockToGrid, VacuumAtOrigin) {
  const auto s = fock_to_grid(KetVector::vacuum(FockBasis({1})), GridSpec(128, 8.0));
  EXPECT_NEAR(s[64].real(), std::pow(std::numbers::pi, -0.25), 1e-15);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
}

TEST(FockToGrid, OddStateVanishesAtOrigin) {
  const int one[] = {1};
  const auto s = fock_to_grid(KetVector::fock_state(FockBasis({2}), one), GridSpec(128, 8.0));
  EXPECT_EQ(std::abs(s[64]), 0.0);
}

TEST(FockToGrid, SecondMomentMatchesFock) {
  FockBasis b({3});
  Eigen::VectorXcd a(3);
  a << 1.0, 0.0, 1.0;
  const KetVector psi(b, a.normalized());
  const auto s = fock_to_grid(psi, GridSpec(128, 8.0));
  const auto x = Polynomial::x(1, 0);
  EXPECT_NEAR(x_moment(s, {2}), fock_moment(psi, x * x), 1e-8);
}

TEST(FockToGrid, RepresentationConsistency) {
  const auto psi = random_ket({4, 3}, 17);
  const auto s = fock_to_grid(psi, GridSpec(96, 9.0));
  const auto x1 = Polynomial::x(2, 0), x2 = Polynomial::x(2, 1);
  EXPECT_NEAR(x_moment(s, {1, 0}), fock_moment(psi, x1), 1e-8);
  EXPECT_NEAR(x_moment(s, {0, 1}), fock_moment(psi, x2), 1e-8);
  EXPECT_NEAR(x_moment(s, {2, 0}), fock_moment(psi, x1 * x1), 1e-8);
  EXPECT_NEAR(x_moment(s, {1, 1}), fock_moment(psi, x1 * x2), 1e-8);
  EXPECT_NEAR(x_moment(s, {4, 0}), fock_moment(psi, x1 * x1 * x1 * x1), 1e-8);
  EXPECT_NEAR(x_moment(s, {2, 2}), fock_moment(psi, x1 * x1 * x2 * x2), 1e-8);
}

TEST(FockToGrid, TailConditionEnforced) {
  const int forty[] = {40};
  EXPECT_THROW(fock_to_grid(KetVector::fock_state(FockBasis({41}), forty), GridSpec(64, 8.0)), GridDomainError);
}

TEST(FockToGrid, PointTransformMatchesHeisenbergMoments) {
  const auto psi = random_ket({3, 2}, 5);
  const GaussianParams g{0.4, 1.3, 0.8, -0.2};
  const auto t = g.transform();
  const auto s = fock_to_grid(psi, GridSpec(96, 12.0), t);
  const auto x1 = Polynomial::x(2, 0), x2 = Polynomial::x(2, 1);
  EXPECT_NEAR(s.norm(), 1.0, 1e-10);
  EXPECT_NEAR(x_moment(s, {1, 0}), fock_moment(psi, conjugate(x1, t)), 1e-8);
  EXPECT_NEAR(x_moment(s, {0, 2}), fock_moment(psi, conjugate(x2 * x2, t)), 1e-8);
  EXPECT_NEAR(x_moment(s, {1, 1}), fock_moment(psi, conjugate(x1 * x2, t)), 1e-8);
  const auto m = moments(s);
  const auto p1 = Polynomial::p(2, 0);
  EXPECT_NEAR(m.mean(2), fock_moment(psi, conjugate(p1, t)), 1e-8);
  EXPECT_NEAR(m.second(2, 2), fock_moment(psi, conjugate(p1 * p1, t)), 1e-8);
}

TEST(FockToGrid, RejectsMixingTransform) {
  const auto t = squeezer(1, 2.0, 0);
  Eigen::MatrixXd rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;  // Fourier transform
  const SymplecticTransform fourier(rot, Eigen::VectorXd::Zero(2));
  EXPECT_NO_THROW(fock_to_grid(KetVector::vacuum(FockBasis({1})), GridSpec(64, 8.0), t));
  EXPECT_THROW(fock_to_grid(KetVector::vacuum(FockBasis({1})), GridSpec(64, 8.0), fourier), std::invalid_argument);
}

TEST(Moments, CoherentState) {
  const auto s = coherent_state(GridSpec(64, 8.0), {{0.5, 0.3}, {-0.4, 0.2}});
  const auto m = moments(s);
  EXPECT_NEAR(m.mean(0), std::numbers::sqrt2 * 0.5, 1e-10);
  EXPECT_NEAR(m.mean(1), -std::numbers::sqrt2 * 0.4, 1e-10);
  EXPECT_NEAR(m.mean(2), std::numbers::sqrt2 * 0.3, 1e-10);
  EXPECT_NEAR(m.mean(3), std::numbers::sqrt2 * 0.2, 1e-10);
  const auto c = m.covariance();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(c(a, b), a == b ? 0.5 : 0.0, 1e-10);
}

TEST(ApplyPhase, ZeroIsIdentity) {
  auto s = coherent_state(GridSpec(32, 8.0), {{0.3, 0.1}, {0.2, -0.5}});
  const auto before = s.amplitudes();
  apply_phase_in_place(s, Polynomial(2));
  EXPECT_EQ(s.amplitudes(), before);
}

TEST(ApplyPhase, NormPreservedAndInvertible) {
  const auto psi = random_ket({3, 3}, 8);
  const auto s = fock_to_grid(psi, GridSpec(64, 8.0));
  const auto v = two_mode_cubic(0.46);
  const auto t = apply_phase(s, v);
  EXPECT_NEAR(t.norm(), s.norm(), 1e-12);
  const auto back = apply_phase(t, -v);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LT(std::abs(back[i] - s[i]), 1e-12);
}

TEST(ApplyPhase, RejectsMomentumSymbols) {
  auto s = coherent_state(GridSpec(32, 8.0), {{0.0, 0.0}});
  EXPECT_THROW(apply_phase_in_place(s, Polynomial::p(1, 0)), std::invalid_argument);
}

TEST(QsgCouple, ZeroShiftForTargetAtOrigin) {
  const GridSpec g(32, 8.0);
  GridWavefunction target(g, 1);
  target[16] = 1.0 / std::sqrt(g.spacing());
  const auto anc = coherent_state(g, {{0.4, -0.3}});
  auto joint = product(target, anc);
  const auto before = joint.amplitudes();
  qsg_couple(joint, 0, 1);
  EXPECT_EQ(joint.amplitudes(), before);
  EXPECT_EQ(joint.leaked(), 0.0);
}

TEST(QsgCouple, TargetMarginalUntouched) {
  const GridSpec g(64, 10.0);
  auto joint = product(coherent_state(g, {{0.7, 0.2}}), coherent_state(g, {{-0.3, 0.5}}));
  const auto before = moments(joint);
  std::vector<double> marginal(64, 0.0), after(64, 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) marginal[i / 64] += std::norm(joint[i]);
  qsg_couple(joint, 0, 1);
  for (std::size_t i = 0; i < joint.size(); ++i) after[i / 64] += std::norm(joint[i]);
  for (int k = 0; k < 64; ++k) EXPECT_NEAR(after[static_cast<std::size_t>(k)], marginal[static_cast<std::size_t>(k)], 1e-15);
  EXPECT_NEAR(moments(joint).mean(0), before.mean(0), 1e-12);
}

TEST(QsgCouple, HeisenbergMomentumSum) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const GridSpec g(64, 10.0);
  for (int t = 0; t < 5; ++t) {
    auto joint = product(coherent_state(g, {{u(rng), u(rng)}}), coherent_state(g, {{u(rng), u(rng)}}));
    const auto before = moments(joint);
    qsg_couple(joint, 0, 1);
    const auto after = moments(joint);
    EXPECT_NEAR(after.mean(2), before.mean(2) + before.mean(3), 1e-6);
    EXPECT_NEAR(after.mean(3), before.mean(3), 1e-6);
    EXPECT_NEAR(after.mean(1), before.mean(1) - before.mean(0), 1e-6);
  }
}

TEST(QsgCouple, LeakAccounting) {
  const GridSpec g(32, 6.0);
  auto joint = product(coherent_state(g, {{1.2, 0.0}}), ideal_ancilla(g, Polynomial(1), 1.2));
  qsg_couple(joint, 0, 1);
  EXPECT_GT(joint.leaked(), 1e-8);
  EXPECT_NEAR(joint.norm() + joint.leaked(), 1.0, 1e-12);
}

TEST(QsgCouple, ExcessiveLeakThrows) {
  const GridSpec g(32, 6.0);
  auto joint = product(coherent_state(g, {{2.0, 0.0}}), ideal_ancilla(g, Polynomial(1), 4.0));
  EXPECT_THROW(qsg_couple(joint, 0, 1), GridDomainError);
}

TEST(Homodyne, ProductStateConditionalIndependentOfOutcome) {
  const GridSpec g(48, 8.0);
  const auto a = coherent_state(g, {{0.3, 0.2}});
  const auto joint = product(a, coherent_state(g, {{-0.5, 0.1}}));
  int visited = 0;
  homodyne_scan(joint, {1}, [&](const MeasurementOutcome&, double w, GridWavefunction& c) {
    if (w < 1e-20) return;
    EXPECT_NEAR(fidelity(a, c), 1.0, 1e-12);
    ++visited;
  });
  EXPECT_GT(visited, 10);
}

TEST(Homodyne, SeededSamplingReproducible) {
  const GridSpec g(32, 8.0);
  const auto joint = fock_to_grid(random_ket({3, 3}, 2), g);
  std::mt19937_64 r1(99), r2(99);
  const auto a = homodyne_sample(joint, {1}, r1);
  const auto b = homodyne_sample(joint, {1}, r2);
  EXPECT_EQ(a.outcome.q, b.outcome.q);
  EXPECT_EQ(a.state.amplitudes(), b.state.amplitudes());
  EXPECT_NEAR(a.state.norm(), 1.0, 1e-12);
}

TEST(Homodyne, CorrelatedGaussianConditionalMean) {
  // Squeezed vacuum on mode 1 then a beam splitter: jointly Gaussian x with
  // covariance A A^T / 2.
  const auto t = beam_splitter(2, 0.5, 0, 1) * squeezer(2, 0.7, 0);
  const auto joint = fock_to_grid(KetVector::vacuum(FockBasis({1, 1})), GridSpec(64, 12.0), t);
  const Eigen::MatrixXd a = t.matrix().topLeftCorner(2, 2);
  const Eigen::MatrixXd cov = 0.5 * a * a.transpose();
  const double slope = cov(0, 1) / cov(1, 1);
  int checked = 0;
  homodyne_scan(joint, {1}, [&](const MeasurementOutcome& o, double w, GridWavefunction& c) {
    if (w < 1e-6) return;
    EXPECT_NEAR(x_moment(c, {1}), slope * o.q[0], 1e-8);
    ++checked;
  });
  EXPECT_GT(checked, 10);
}

TEST(Homodyne, ScanWeightsSumToUnleakedNorm) {
  const GridSpec g(32, 8.0);
  auto joint = product(coherent_state(g, {{1.2, 0.0}}), ideal_ancilla(g, Polynomial(1), 1.1));
  qsg_couple(joint, 0, 1);
  ASSERT_LE(joint.leaked(), 1e-6);
  double total = 0.0;
  homodyne_scan(joint, {1}, [&](const MeasurementOutcome&, double w, GridWavefunction&) { total += w; });
  EXPECT_NEAR(total, 1.0 - joint.leaked(), 1e-8);
}

TEST(Homodyne, PostselectionLimitIsZeroSlice) {
  const GridSpec g(32, 8.0);
  const auto joint = fock_to_grid(random_ket({3, 3}, 4), g);
  const auto p = homodyne_postselect(joint, {1}, 0.0);
  ASSERT_EQ(p.branches.size(), 1u);
  homodyne_scan(joint, {1}, [&](const MeasurementOutcome& o, double w, GridWavefunction& c) {
    if (o.q[0] != 0.0) return;
    EXPECT_DOUBLE_EQ(p.acceptance, w);
    EXPECT_EQ(p.branches[0].state.amplitudes(), c.amplitudes());
  });
  EXPECT_GT(homodyne_postselect(joint, {1}, 1.0).acceptance, p.acceptance);
}

TEST(Homodyne, ZeroProbabilityConditioningRaises) {
  const int occ[] = {0, 1};
  const auto joint = fock_to_grid(KetVector::fock_state(FockBasis({1, 2}), occ), GridSpec(32, 8.0));
  EXPECT_THROW(homodyne_postselect(joint, {1}, 0.0), NumericalError);
}

TEST(Homodyne, LeakedStateRefused) {
  auto s = coherent_state(GridSpec(32, 8.0), {{0.0, 0.0}, {0.0, 0.0}});
  s.set_leaked(1e-5);
  std::mt19937_64 rng(1);
  EXPECT_THROW(homodyne_sample(s, {1}, rng), GridDomainError);
}

TEST(Protocol, FeedforwardReproducesIdealGateTimesEnvelope) {
  const GridSpec g(32, 12.0);
  const auto in = coherent_state(g, {{0.5, 0.3}, {-0.4, 0.2}});
  const double sd = 2.0;
  const auto anc = ideal_ancilla(g, kCubic03, sd);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ProtocolOptions o;
    o.seed = seed;
    const auto r = run_protocol(in, anc, kCubic03, o);
    auto expect = apply_phase(in, kCubic03);
    std::size_t i = 0;
    for (int k1 = 0; k1 < g.points; ++k1)
      for (int k2 = 0; k2 < g.points; ++k2, ++i) {
        const double y1 = g.coordinate(k1) + r.outcome.q[0], y2 = g.coordinate(k2) + r.outcome.q[1];
        const bool inside = y1 >= -g.half_width && y1 < g.half_width && y2 >= -g.half_width && y2 < g.half_width;
        expect[i] *= inside ? std::exp(-(y1 * y1 + y2 * y2) / (4 * sd * sd)) : 0.0;
      }
    expect.normalize();
    for (std::size_t j = 0; j < expect.size(); ++j) ASSERT_LT(std::abs(r.output[j] - expect[j]), 1e-10);
  }
}

TEST(Protocol, TrivialGateLeavesFeedforwardInert) {
  const GridSpec g(32, 8.0);
  const auto in = coherent_state(g, {{0.2, 0.1}, {0.1, 0.0}});
  const auto anc = coherent_state(g, {{0.0, 0.0}, {0.0, 0.0}});
  ProtocolOptions ff, none;
  none.policy = FeedPolicy::None;
  const auto a = run_protocol(in, anc, Polynomial(2), ff);
  const auto b = run_protocol(in, anc, Polynomial(2), none);
  EXPECT_EQ(a.outcome.q, b.outcome.q);
  for (std::size_t i = 0; i < a.output.size(); ++i) EXPECT_LT(std::abs(a.output[i] - b.output[i]), 1e-10);
}

TEST(Protocol, EnvelopeLadderMatchesClosedForm) {
  double previous = 0.0;
  for (double sd : {1.0, 1.5, 2.0}) {
    const GridSpec g(32, 5.0 * sd + 4.0);
    const auto in = coherent_state(g, {{0.3, 0.2}, {-0.2, 0.1}});
    const auto ref = apply_phase(in, kCubic03);
    ProtocolOptions o;
    o.moments = false;
    const auto st = protocol_statistics(in, ideal_ancilla(g, kCubic03, sd), kCubic03, o, &ref);
    EXPECT_NEAR(st.fidelity, envelope_fidelity_closed_form(sd, 2), 2e-3) << sd;
    EXPECT_GT(st.fidelity, previous);
    previous = st.fidelity;
  }
}

TEST(Protocol, PostselectionBeatsNoFeedforward) {
  // Passive single-photon resource at kappa 0.46.
  FockBasis b({2, 1});
  Eigen::VectorXcd c(2);
  c << 0.8, std::complex<double>(0.0, 0.58);
  const KetVector core(b, c.normalized());
  const auto v = two_mode_cubic(0.46);
  const GridSpec g(32, 8.0);
  const auto anc = fock_to_grid(core, g, beam_splitter(2, 0.86, 0, 1));
  const auto in = coherent_state(g, {{0.2, 0.1}, {-0.1, 0.2}});
  const auto ref = apply_phase(in, v);
  ProtocolOptions ps, none;
  ps.policy = FeedPolicy::Postselect;
  none.policy = FeedPolicy::None;
  ps.moments = none.moments = false;
  const auto post = protocol_statistics(in, anc, v, ps, &ref);
  const auto free = protocol_statistics(in, anc, v, none, &ref);
  EXPECT_EQ(post.outcomes, 1u);
  EXPECT_GT(post.fidelity, free.fidelity);
  const auto single = run_protocol(in, anc, v, ps);
  EXPECT_NEAR(fidelity(ref, single.output), post.fidelity, 1e-12);
  EXPECT_NEAR(single.outcome.acceptance, post.accepted, 1e-15);
}

TEST(BeamSplitterVariant, ConditionalMatchesQsgForm) {
  const GridSpec g(32, 8.0);
  const auto in = coherent_state(g, {{0.3, 0.2}, {-0.2, 0.1}});
  const auto anc = coherent_state(g, {{0.1, 0.0}, {0.0, -0.1}});
  for (std::uint64_t seed : {3u, 4u}) {
    ProtocolOptions o;
    o.seed = seed;
    o.policy = FeedPolicy::None;
    const auto r = beamsplitter_variant(in, anc, Polynomial(2), o, 1e-6);
    // psi(x) a(x + sqrt2 q), evaluated analytically for the coherent ancilla.
    GridWavefunction expect = in;
    std::size_t i = 0;
    for (int k1 = 0; k1 < g.points; ++k1)
      for (int k2 = 0; k2 < g.points; ++k2, ++i) {
        const double y1 = g.coordinate(k1) + std::numbers::sqrt2 * r.outcome.q[0];
        const double y2 = g.coordinate(k2) + std::numbers::sqrt2 * r.outcome.q[1];
        const double m1 = std::numbers::sqrt2 * 0.1, m2 = 0.0, p2 = -std::numbers::sqrt2 * 0.1;
        expect[i] *= std::exp(std::complex<double>(-0.5 * ((y1 - m1) * (y1 - m1) + (y2 - m2) * (y2 - m2)), p2 * y2));
      }
    EXPECT_NEAR(fidelity(expect, r.output), 1.0, 1e-6);
  }
}

TEST(BeamSplitterVariant, GaussianMomentsMatchQsg) {
  const GridSpec g(32, 8.0);
  const auto in = coherent_state(g, {{0.3, 0.2}, {-0.2, 0.1}});
  const auto anc = coherent_state(g, {{0.0, 0.0}, {0.0, 0.0}});
  const auto a = protocol_statistics(in, anc, kCubic03, ProtocolOptions{}, nullptr, Coupling::Qsg);
  const auto b = protocol_statistics(in, anc, kCubic03, ProtocolOptions{}, nullptr, Coupling::BeamSplitter);
  EXPECT_LE((a.output_moments.mean - b.output_moments.mean).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LE((a.output_moments.covariance() - b.output_moments.covariance()).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LE(b.resampling_error, 1e-6);
}

TEST(NoiseAudit, VacuumAncilla) {
  const double kappa = 0.4;
  const auto anc = coherent_state(GridSpec(32, 8.0), {{0.0, 0.0}, {0.0, 0.0}});
  const auto r = heisenberg_noise_audit_report(anc, two_mode_cubic(kappa));
  EXPECT_NEAR(r.audit, 1.0 + 1.5 * kappa * kappa, 1e-8);
  EXPECT_TRUE(r.cross_checked);
  EXPECT_NEAR(r.protocol_excess, r.audit, 1e-3);
}

TEST(NoiseAudit, IdealAncillaNoiseShrinksWithEnvelope) {
  // e^{-iV} times the envelope leaves only the envelope momentum spread,
  // 1 / (4 sd^2) per mode.
  const auto v = Polynomial::monomial(2, {1, 0, 2, 0}, 0.05);
  double previous = 1e9;
  for (double sd : {1.0, 1.5, 2.0}) {
    const auto anc = ideal_ancilla(GridSpec(128, 6.0 * sd + 2.0), v, sd);
    const double a = heisenberg_noise_audit_report(anc, v, false).audit;
    EXPECT_NEAR(a, 0.5 / (sd * sd), 1e-6);
    EXPECT_LT(a, previous);
    previous = a;
  }
}

TEST(NoiseAudit, MatchesNonlinearVarianceForResourceState) {
  FockBasis b({2, 1});
  Eigen::VectorXcd c(2);
  c << 0.8, std::complex<double>(0.0, 0.58);
  const KetVector core(b, c.normalized());
  const auto v = two_mode_cubic(0.46);
  const auto t = beam_splitter(2, 0.86, 0, 1);
  const auto anc = fock_to_grid(core, GridSpec(64, 10.0), t);
  const auto r = heisenberg_noise_audit_report(anc, v, false);
  EXPECT_NEAR(r.audit, nonlinear_variance(core, v, t, 0.46).total, 1e-6);
}

TEST(Snapshot, RoundTrip) {
  auto s = fock_to_grid(random_ket({2, 2}, 3), GridSpec(16, 8.0));
  s.set_leaked(2.5e-7);
  std::stringstream buf;
  write_snapshot(buf, s);
  const auto t = read_snapshot(buf);
  EXPECT_EQ(t.grid(), s.grid());
  EXPECT_EQ(t.modes(), 2);
  EXPECT_EQ(t.leaked(), s.leaked());
  EXPECT_EQ(t.amplitudes(), s.amplitudes());
}

TEST(Snapshot, RejectsForeignData) {
  std::stringstream buf("not a snapshot at all");
  EXPECT_THROW(read_snapshot(buf), std::runtime_error);
}

TEST(Fidelity, OrthogonalAndIdentical) {
  const GridSpec g(64, 8.0);
  const int one[] = {1};
  const auto a = fock_to_grid(KetVector::vacuum(FockBasis({2})), g);
  const auto b = fock_to_grid(KetVector::fock_state(FockBasis({2}), one), g);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(a, b), 0.0, 1e-14);
}
