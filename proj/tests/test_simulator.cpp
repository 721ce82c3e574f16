#include <gtest/gtest.h>

#include "hubsim/circuits.hpp"
#include "hubsim/model.hpp"
#include "hubsim/simulator.hpp"
#include "oracles.hpp"

using namespace hubsim;
using hubsim::testing::unitary_distance;

TEST(StateVector, HadamardTwiceIsIdentity) {
  StateVector s(1);
  Circuit c(1);
  c.h(0);
  c.h(0);
  Rng rng(0);
  apply_circuit(s, c, rng);
  EXPECT_NEAR(std::abs(s.amp(0) - cplx(1.0, 0.0)), 0.0, 1e-14);
}

TEST(StateVector, NormPreservedByGates) {
  Rng rng(3);
  StateVector s(6);
  for (auto& a : s.amps()) a = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
  s.normalize();
  Circuit c(6);
  c.h(0);
  c.ybasis(3);
  c.rz(2, 0.7);
  c.cnot(1, 4);
  c.fswap(2, 3);
  c.cz(0, 5);
  apply_circuit(s, c, rng);
  EXPECT_NEAR(s.norm2(), 1.0, 1e-12);
}

TEST(StateVector, BornRuleFrequencies) {
  Rng rng(17);
  int ones = 0;
  const int shots = 10000;
  for (int k = 0; k < shots; ++k) {
    StateVector s(1);
    Circuit c(1);
    c.h(0);
    c.measure_z(0, 0);
    Rng shot_rng(42, k);
    auto res = apply_circuit(s, c, shot_rng);
    if (res.outcomes[0] == -1) ++ones;
  }
  EXPECT_NEAR(ones / static_cast<double>(shots), 0.5, 0.02);
  (void)rng;
}

TEST(StateVector, MeasurementCollapses) {
  StateVector s(2);
  Circuit c(2);
  c.h(0);
  c.cnot(0, 1);  // Bell state
  Rng rng(9);
  apply_circuit(s, c, rng);
  const int m0 = s.measure_z(0, rng);
  const int m1 = s.measure_z(1, rng);
  EXPECT_EQ(m0, m1);  // perfectly correlated
  EXPECT_NEAR(s.norm2(), 1.0, 1e-12);
}

TEST(Simulator, CircuitMatchesDenseApplication) {
  LatticeSpec spec(3, 1);
  auto order = snake_order(spec);
  Term t{TermKind::Hopping, -1.0, {0, Spin::Up}, {2, Spin::Up}, +1};
  auto circ = term_evolution_circuit(t, 0.83, order);

  Rng rng(21);
  StateVector psi(order.qubits());
  for (auto& a : psi.amps()) a = cplx{rng.uniform() - 0.5, rng.uniform() - 0.5};
  psi.normalize();

  StateVector via_circ = psi;
  apply_circuit(via_circ, circ, rng);
  Vector via_dense = circuit_unitary(circ) * psi.to_eigen();
  for (std::size_t i = 0; i < psi.dim(); ++i)
    EXPECT_NEAR(std::abs(via_circ.amp(i) - via_dense(static_cast<Eigen::Index>(i))), 0.0, 1e-10);
}

TEST(Propagator, IdentityAtZeroTime) {
  LatticeSpec spec(2, 1);
  auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, 4.0));
  Matrix u = exact_propagator(h, 0.0);
  EXPECT_LT(unitary_distance(u, Matrix::Identity(u.rows(), u.cols())), 1e-12);
}

TEST(Propagator, DiagonalHamiltonianGivesPhases) {
  LatticeSpec spec(2, 1);
  auto c = CouplingSet::uniform(spec, 0.0, 4.0, -0.5);
  auto h = build_hubbard_terms(spec, c);
  auto order = snake_order(spec);
  Matrix hd = terms_to_dense(h, order);
  Matrix u = exact_propagator(h, order, 0.77);
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (i == j)
        EXPECT_NEAR(std::abs(u(i, j) - std::exp(-kI * 0.77 * hd(i, i))), 0.0, 1e-12);
      else
        EXPECT_NEAR(std::abs(u(i, j)), 0.0, 1e-12);
    }
}

TEST(Propagator, Composition) {
  LatticeSpec spec(2, 2);
  auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, 2.5));
  Matrix u1 = exact_propagator(h, 0.3);
  Matrix u2 = exact_propagator(h, 0.45);
  Matrix u12 = exact_propagator(h, 0.75);
  EXPECT_LT(unitary_distance(u1 * u2, u12), 1e-10);
}

TEST(GroundState, TwoSiteHubbardSector11) {
  LatticeSpec spec(2, 1);
  auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, 4.0));
  auto gs = ground_state_ed(h, std::pair{1, 1});
  EXPECT_NEAR(gs.energy, 2.0 - 2.0 * std::sqrt(2.0), 1e-10);
  EXPECT_FALSE(gs.degenerate);
  EXPECT_NEAR(gs.state.norm2(), 1.0, 1e-10);
}

TEST(GroundState, FreeFermionsMatchHoppingSpectrum) {
  LatticeSpec spec(3, 2);
  auto c = CouplingSet::uniform(spec, 1.0, 0.0);
  auto h = build_hubbard_terms(spec, c);

  // single-particle hopping matrix
  RealMatrix hop = RealMatrix::Zero(spec.sites(), spec.sites());
  for (const auto& b : spec.bonds()) {
    hop(b.a, b.b) = hop(b.b, b.a) = -1.0;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(hop);

  for (auto [nup, ndn] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 3}}) {
    auto gs = ground_state_ed(h, std::pair{nup, ndn});
    double expect = 0.0;
    for (int i = 0; i < nup; ++i) expect += es.eigenvalues()(i);
    for (int i = 0; i < ndn; ++i) expect += es.eigenvalues()(i);
    EXPECT_NEAR(gs.energy, expect, 1e-9) << nup << "," << ndn;
  }
}

TEST(GroundState, LargeUAtHalfFillingApproachesZero) {
  LatticeSpec spec(2, 1);
  double prev = -10;
  for (double U : {4.0, 16.0, 64.0, 256.0}) {
    auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, U));
    auto gs = ground_state_ed(h, std::pair{1, 1});
    EXPECT_GT(gs.energy, prev);  // monotone toward 0
    prev = gs.energy;
  }
  EXPECT_GT(prev, -4.0 * 2 / 256.0 * 4);  // bounded by ~ -8 t^2/U scale
  EXPECT_LT(prev, 0.0);
}

TEST(GroundState, DegenerateGroundFlagged) {
  // two decoupled dimers, sector (1,1): spin arrangement degeneracy
  LatticeSpec spec(4, 1);
  auto c = CouplingSet::uniform(spec, 1.0, 0.0);
  c.t[1] = 0.0;  // cut the middle bond -> two decoupled dimers
  auto h = build_hubbard_terms(spec, c);
  auto gs = ground_state_ed(h, std::pair{1, 1});
  EXPECT_TRUE(gs.degenerate);
}

TEST(GroundState, EnergyInvariantUnderOrderingGauge) {
  LatticeSpec spec(2, 2);
  auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, 3.0));
  auto snake = snake_order(spec);

  // row-major (non-snake) ordering as an alternative gauge
  OrderingMap rowmajor;
  rowmajor.spec = spec;
  rowmajor.site_to_pos.resize(spec.sites());
  rowmajor.pos_to_site.resize(spec.sites());
  for (int s = 0; s < spec.sites(); ++s) {
    rowmajor.site_to_pos[s] = s;
    rowmajor.pos_to_site[s] = s;
  }
  auto g1 = ground_state_ed(h, snake, std::pair{2, 2});
  auto g2 = ground_state_ed(h, rowmajor, std::pair{2, 2});
  EXPECT_NEAR(g1.energy, g2.energy, 1e-10);
}

TEST(Expectation, BasicPaulis) {
  StateVector zero(1);
  PauliString z(1);
  z.set(0, PauliLetter::Z);
  EXPECT_NEAR(expectation_pauli(zero, z).real(), 1.0, 1e-14);

  // singlet (|01> - |10>)/sqrt(2)
  StateVector singlet(2);
  singlet.amps()[0] = 0;
  singlet.amps()[1] = 1.0 / std::sqrt(2.0);
  singlet.amps()[2] = -1.0 / std::sqrt(2.0);
  PauliString zz(2);
  zz.set(0, PauliLetter::Z).set(1, PauliLetter::Z);
  EXPECT_NEAR(expectation_pauli(singlet, zz).real(), -1.0, 1e-14);
}

TEST(Expectation, SampledMatchesExactWithin3Sigma) {
  LatticeSpec spec(2, 1);
  auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, 4.0));
  auto gs = ground_state_ed(h, std::pair{1, 1});

  // sample Z on qubit 0 by bitstring sampling
  PauliString z(spec.qubits());
  z.set(0, PauliLetter::Z);
  const double exact = expectation_pauli(gs.state, z).real();
  const int shots = 10000;
  Rng rng(123);
  double sum = 0.0;
  for (int k = 0; k < shots; ++k) {
    const auto bits = gs.state.sample_bitstring(rng);
    sum += (bits & 1) ? -1.0 : 1.0;
  }
  const double mean = sum / shots;
  const double sigma = std::sqrt((1.0 - exact * exact) / shots) + 1e-12;
  EXPECT_LT(std::abs(mean - exact), 3 * sigma + 0.01);
}

TEST(GapTrace, EndpointsMatchGroundStateEd) {
  LatticeSpec spec(2, 1);
  auto a = CouplingSet::uniform(spec, 1.0, 0.0);
  auto b = CouplingSet::uniform(spec, 1.0, 4.0);
  Schedule sched;
  sched.segments.push_back({5.0, a, b, Interp::Linear, 0});
  auto order = snake_order(spec);
  auto trace = sector_gap_trace(spec, sched, order, 10, 3, std::pair{1, 1});
  ASSERT_EQ(trace.size(), 11u);

  auto g0 = ground_state_ed(build_hubbard_terms(spec, a), std::pair{1, 1});
  auto g1 = ground_state_ed(build_hubbard_terms(spec, b), std::pair{1, 1});
  EXPECT_NEAR(trace.front().levels[0], g0.energy, 1e-9);
  EXPECT_NEAR(trace.back().levels[0], g1.energy, 1e-9);
}

// Eigenvalue drift between samples is bounded by the coupling change (Weyl).
TEST(GapTrace, EigenvalueContinuity) {
  LatticeSpec spec(2, 1);
  auto a = CouplingSet::uniform(spec, 1.0, 0.0);
  auto b = CouplingSet::uniform(spec, 1.0, 6.0);
  Schedule sched;
  sched.segments.push_back({1.0, a, b, Interp::Linear, 0});
  auto order = snake_order(spec);
  const int samples = 20;
  auto trace = sector_gap_trace(spec, sched, order, samples, 2, std::pair{1, 1});
  for (int i = 0; i + 1 <= samples; ++i) {
    const double t0 = trace[i].s, t1 = trace[i + 1].s;
    Matrix h0 = terms_to_dense(build_path_terms(spec, interpolate(sched, t0)), order);
    Matrix h1 = terms_to_dense(build_path_terms(spec, interpolate(sched, t1)), order);
    const double bound = spectral_norm(h1 - h0) + 1e-9;
    for (std::size_t k = 0; k < trace[i].levels.size(); ++k)
      EXPECT_LE(std::abs(trace[i + 1].levels[k] - trace[i].levels[k]), bound);
  }
}

TEST(SectorBasis, DimensionsAndMasks) {
  auto b = sector_basis(8, 2, 1);
  EXPECT_EQ(b.dim(), 6u * 4u);  // C(4,2) * C(4,1)
  for (auto m : b.masks) {
    EXPECT_EQ(__builtin_popcountll(m & 0xF), 2);
    EXPECT_EQ(__builtin_popcountll(m >> 4), 1);
  }
}

TEST(SectorEd, RejectsPairingTerms) {
  LatticeSpec spec(2, 1);
  auto c = CouplingSet::uniform(spec, 1.0, 0.0);
  c.set_dwave(spec, 1.0);
  auto h = build_meanfield_terms(spec, MeanFieldKind::DSC, c);
  EXPECT_THROW(ground_state_ed(h, std::pair{1, 1}), Error);
}

TEST(Lanczos, MatchesDenseOnMediumSector) {
  // 3x2 lattice half filling: dim C(6,3)^2 = 400 -> exercises both paths
  LatticeSpec spec(3, 2);
  auto h = build_hubbard_terms(spec, CouplingSet::uniform(spec, 1.0, 4.0));
  auto order = snake_order(spec);
  auto basis = sector_basis(order.qubits(), 3, 3);
  auto sm = sector_matrix(h, order, basis);

  Matrix dense = Matrix::Zero(basis.dim(), basis.dim());
  for (std::size_t r = 0; r < sm.dim; ++r)
    for (auto& [c2, w] : sm.rows[r]) dense(static_cast<Eigen::Index>(r), c2) += w;
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);

  auto [evals, evecs] = lanczos_lowest(sm, 3, 400);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(evals(k), es.eigenvalues()(k), 1e-8);
  (void)evecs;
}
