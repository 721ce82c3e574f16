#include <gtest/gtest.h>

#include "hubsim/encoding.hpp"
#include "hubsim/model.hpp"
#include "hubsim/rng.hpp"
#include "hubsim/simulator.hpp"

using namespace hubsim;

TEST(Snake, TwoByTwo) {
  LatticeSpec spec(2, 2);
  auto m = snake_order(spec);
  EXPECT_EQ(m.qubit(spec.site(0, 0), Spin::Up), 0);
  EXPECT_EQ(m.qubit(spec.site(1, 0), Spin::Up), 1);
  EXPECT_EQ(m.qubit(spec.site(1, 1), Spin::Up), 2);
  EXPECT_EQ(m.qubit(spec.site(0, 1), Spin::Up), 3);
  // spin-down block, same snake
  EXPECT_EQ(m.qubit(spec.site(0, 0), Spin::Down), 4);
  EXPECT_EQ(m.qubit(spec.site(1, 1), Spin::Down), 6);
}

TEST(Snake, ChainIsIdentity) {
  LatticeSpec chain(5, 1);
  auto m = snake_order(chain);
  for (int x = 0; x < 5; ++x) EXPECT_EQ(m.qubit(chain.site(x, 0), Spin::Up), x);
}

TEST(Snake, AdjacentIndicesAreLatticeAdjacent) {
  LatticeSpec spec(4, 4);
  auto m = snake_order(spec);
  for (int pos = 0; pos + 1 < spec.sites(); ++pos) {
    const int a = m.pos_to_site[pos], b = m.pos_to_site[pos + 1];
    const int dx = std::abs(spec.x_of(a) - spec.x_of(b));
    const int dy = std::abs(spec.y_of(a) - spec.y_of(b));
    EXPECT_EQ(dx + dy, 1) << "positions " << pos << "," << pos + 1;
  }
}

TEST(Snake, Bijection) {
  LatticeSpec spec(3, 4);
  auto m = snake_order(spec);
  std::vector<bool> seen(spec.qubits(), false);
  for (int s = 0; s < spec.sites(); ++s) {
    for (Spin sp : {Spin::Up, Spin::Down}) {
      const int q = m.qubit(s, sp);
      ASSERT_GE(q, 0);
      ASSERT_LT(q, spec.qubits());
      EXPECT_FALSE(seen[q]);
      seen[q] = true;
      auto so = m.orbital(q);
      EXPECT_EQ(so.site, s);
      EXPECT_EQ(so.spin, sp);
    }
  }
}

TEST(JW, SnakeAdjacentHoppingHasEmptyString) {
  LatticeSpec spec(4, 2);
  auto order = snake_order(spec);
  // bond (3,0)-(3,1) is snake adjacent: positions 3 and 4
  Term t{TermKind::Hopping, -1.0, {spec.site(3, 0), Spin::Up}, {spec.site(3, 1), Spin::Up}, +1};
  auto ps = jw_pauli_terms(t, order);
  ASSERT_EQ(ps.size(), 2u);
  for (const auto& p : ps) EXPECT_EQ(p.weight(), 2);
}

TEST(JW, RepulsionExpansion) {
  LatticeSpec spec(2, 1);
  auto order = snake_order(spec);
  Term t{TermKind::Repulsion, 4.0, {0, Spin::Up}, {0, Spin::Down}, +1};
  auto ps = jw_pauli_terms(t, order);
  ASSERT_EQ(ps.size(), 4u);
  for (const auto& p : ps) EXPECT_NEAR(std::abs(p.coeff.real()), 1.0, 1e-15);
}

// Oracle equivalence: JW Pauli images must reproduce the dense fermionic
// matrix built by direct antisymmetrized construction.
TEST(JW, MatchesFermionicDenseOracle) {
  LatticeSpec spec(2, 2);
  auto order = snake_order(spec);
  const int n = spec.qubits();

  std::vector<Term> cases = {
      {TermKind::Hopping, -1.3, {spec.site(0, 0), Spin::Up}, {spec.site(0, 1), Spin::Up}, +1},
      {TermKind::Hopping, 0.7, {spec.site(0, 0), Spin::Down}, {spec.site(1, 0), Spin::Down}, +1},
      {TermKind::Repulsion, 4.0, {spec.site(1, 1), Spin::Up}, {spec.site(1, 1), Spin::Down}, +1},
      {TermKind::ChemPot, -0.9, {spec.site(1, 0), Spin::Up}, {spec.site(1, 0), Spin::Up}, +1},
      {TermKind::StaggeredZ, 0.5, {spec.site(0, 1), Spin::Down}, {spec.site(0, 1), Spin::Down},
       -1},
      {TermKind::PairingReal, 0.8, {spec.site(0, 0), Spin::Up}, {spec.site(1, 0), Spin::Down},
       +1},
      {TermKind::PairingReal, -0.8, {spec.site(1, 1), Spin::Down}, {spec.site(0, 1), Spin::Up},
       +1},
      {TermKind::PairingImag, 0.6, {spec.site(0, 0), Spin::Up}, {spec.site(1, 1), Spin::Down},
       +1},
      {TermKind::PairingImag, -0.3, {spec.site(1, 0), Spin::Down}, {spec.site(0, 0), Spin::Up},
       +1},
  };
  for (const auto& t : cases) {
    HamiltonianTerms h{spec, {t}};
    Matrix fermionic = terms_to_dense(h, order);
    Matrix pauli = paulis_to_dense(jw_pauli_terms(t, order));
    EXPECT_LT((fermionic - pauli).cwiseAbs().maxCoeff(), 1e-12)
        << "kind " << static_cast<int>(t.kind);
    // Hermiticity of the image
    EXPECT_LT((pauli - pauli.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
  (void)n;
}

TEST(JW, FullHamiltonianMatchesOracle) {
  LatticeSpec spec(2, 2);
  auto order = snake_order(spec);
  auto c = CouplingSet::uniform(spec, 1.0, 4.0);
  c.eps[1] = -0.3;
  auto h = build_hubbard_terms(spec, c);
  Matrix fermionic = terms_to_dense(h, order);
  Matrix pauli = paulis_to_dense(jw_pauli_terms(h, order));
  EXPECT_LT((fermionic - pauli).cwiseAbs().maxCoeff(), 1e-12);

  auto cd = CouplingSet::uniform(spec, 1.0, 0.0);
  cd.set_dwave(spec, 0.7);
  cd.set_dxy(spec, 0.1, 0.7);
  auto hd = build_meanfield_terms(spec, MeanFieldKind::DSC, cd);
  EXPECT_LT((terms_to_dense(hd, order) - paulis_to_dense(jw_pauli_terms(hd, order)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Majorana, StringStructure) {
  LatticeSpec chain(4, 1);
  auto order = snake_order(chain);
  auto p0 = majorana_string({0, Spin::Up}, order);
  EXPECT_EQ(p0.weight(), 1);
  EXPECT_EQ(p0.letters[0], PauliLetter::X);

  auto p3 = majorana_string({3, Spin::Up}, order);
  EXPECT_EQ(p3.letters[0], PauliLetter::Z);
  EXPECT_EQ(p3.letters[1], PauliLetter::Z);
  EXPECT_EQ(p3.letters[2], PauliLetter::Z);
  EXPECT_EQ(p3.letters[3], PauliLetter::X);
}

TEST(Majorana, SquaresToIdentity) {
  LatticeSpec chain(3, 1);
  auto order = snake_order(chain);
  auto p = majorana_string({2, Spin::Down}, order);
  Matrix a = pauli_to_dense(p);
  Matrix id = Matrix::Identity(a.rows(), a.cols());
  EXPECT_LT((a * a - id).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a - a.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pauli, TextFormat) {
  PauliString p(4, cplx{0.5, 0.0});
  p.set(0, PauliLetter::X).set(1, PauliLetter::Z).set(2, PauliLetter::X);
  EXPECT_EQ(p.to_string(), "0.5 X0 Z1 X2");
}
