#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "hubsim/common.hpp"
#include "hubsim/model.hpp"

namespace hubsim {

// ---------------------------------------------------------------------------
// Snake ordering
// ---------------------------------------------------------------------------

// Bijection (site, spin) <-> qubit. Spin-up occupies qubits 0..N-1 along the
// serpentine path (row order alternating direction), spin-down follows the
// same path on qubits N..2N-1.
struct OrderingMap {
  LatticeSpec spec;
  std::vector<int> site_to_pos;  // site -> position along the snake
  std::vector<int> pos_to_site;

  int qubits() const { return spec.qubits(); }

  int qubit(int site, Spin spin) const {
    return static_cast<int>(spin) * spec.sites() + site_to_pos[site];
  }
  int qubit(const SpinOrbital& so) const { return qubit(so.site, so.spin); }

  SpinOrbital orbital(int q) const {
    const int n = spec.sites();
    return {pos_to_site[q % n], q < n ? Spin::Up : Spin::Down};
  }
};

inline OrderingMap snake_order(const LatticeSpec& spec) {
  OrderingMap m;
  m.spec = spec;
  m.site_to_pos.assign(spec.sites(), 0);
  m.pos_to_site.assign(spec.sites(), 0);
  int pos = 0;
  for (int y = 0; y < spec.ny; ++y) {
    if (y % 2 == 0) {
      for (int x = 0; x < spec.nx; ++x, ++pos) {
        m.site_to_pos[spec.site(x, y)] = pos;
        m.pos_to_site[pos] = spec.site(x, y);
      }
    } else {
      for (int x = spec.nx - 1; x >= 0; --x, ++pos) {
        m.site_to_pos[spec.site(x, y)] = pos;
        m.pos_to_site[pos] = spec.site(x, y);
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Pauli strings
// ---------------------------------------------------------------------------

enum class PauliLetter : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

struct PauliString {
  cplx coeff{1.0, 0.0};
  std::vector<PauliLetter> letters;  // one per qubit, defaulting to I

  explicit PauliString(int nqubits = 0, cplx c = {1.0, 0.0})
      : coeff(c), letters(nqubits, PauliLetter::I) {}

  int qubits() const { return static_cast<int>(letters.size()); }

  PauliString& set(int q, PauliLetter l) {
    letters[q] = l;
    return *this;
  }

  int weight() const {
    int w = 0;
    for (auto l : letters) w += (l != PauliLetter::I);
    return w;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << coeff.real();
    if (coeff.imag() != 0.0) os << (coeff.imag() > 0 ? "+" : "") << coeff.imag() << "i";
    for (int q = 0; q < qubits(); ++q)
      if (letters[q] != PauliLetter::I) os << ' ' << static_cast<char>(letters[q]) << q;
    return os.str();
  }
};

// Two Pauli strings commute iff they anticommute on an even number of qubits.
inline bool pauli_commute(const PauliString& a, const PauliString& b) {
  require(a.qubits() == b.qubits(), "pauli_commute: size mismatch");
  int anti = 0;
  for (int q = 0; q < a.qubits(); ++q) {
    const auto la = a.letters[q], lb = b.letters[q];
    if (la != PauliLetter::I && lb != PauliLetter::I && la != lb) ++anti;
  }
  return anti % 2 == 0;
}

namespace detail {

inline PauliString with_z_string(int n, int q_lo, int q_hi, PauliLetter lo, PauliLetter hi,
                                 cplx coeff) {
  PauliString p(n, coeff);
  p.set(q_lo, lo).set(q_hi, hi);
  for (int q = q_lo + 1; q < q_hi; ++q) p.set(q, PauliLetter::Z);
  return p;
}

}  // namespace detail

// Jordan-Wigner images of second-quantized terms. Convention: |1> = occupied,
// c_p = (prod_{q<p} Z_q) (X_p + i Y_p)/2, which yields
//   hopping      coeff/2 (X..Z..X + Y..Z..Y)
//   repulsion    coeff/4 (I - Z_p - Z_q + Z_p Z_q)
//   chem pot     coeff/2 (I - Z_p)
//   pairing re   coeff/2 (X..Z..X - Y..Z..Y)
//   pairing im   coeff/2 (X..Z..Y + Y..Z..X)
// with identity pieces carried as weight-0 strings.
inline std::vector<PauliString> jw_pauli_terms(const Term& term, const OrderingMap& order) {
  const int n = order.qubits();
  int qp = order.qubit(term.p);
  int qq = term.two_body_sites() ? order.qubit(term.q) : qp;
  require(qp >= 0 && qp < n && qq >= 0 && qq < n, "term indices out of range");

  std::vector<PauliString> out;
  switch (term.kind) {
    case TermKind::Hopping: {
      require(qp != qq, "hopping term on coincident orbitals");
      // Mode order flips contribute no sign for the Hermitian pair.
      const int lo = std::min(qp, qq), hi = std::max(qp, qq);
      out.push_back(detail::with_z_string(n, lo, hi, PauliLetter::X, PauliLetter::X,
                                          term.coeff / 2.0));
      out.push_back(detail::with_z_string(n, lo, hi, PauliLetter::Y, PauliLetter::Y,
                                          term.coeff / 2.0));
      break;
    }
    case TermKind::Repulsion: {
      require(term.p.site == term.q.site && term.p.spin != term.q.spin,
              "repulsion must pair up/down of one site");
      const double u4 = term.coeff / 4.0;
      out.emplace_back(n, cplx{u4, 0.0});
      out.push_back(PauliString(n, cplx{-u4, 0.0}).set(qp, PauliLetter::Z));
      out.push_back(PauliString(n, cplx{-u4, 0.0}).set(qq, PauliLetter::Z));
      out.push_back(
          PauliString(n, cplx{u4, 0.0}).set(qp, PauliLetter::Z).set(qq, PauliLetter::Z));
      break;
    }
    case TermKind::ChemPot:
    case TermKind::StaggeredZ: {
      const double c = term.coeff * (term.kind == TermKind::StaggeredZ ? term.sign : 1);
      out.emplace_back(n, cplx{c / 2.0, 0.0});
      out.push_back(PauliString(n, cplx{-c / 2.0, 0.0}).set(qp, PauliLetter::Z));
      break;
    }
    case TermKind::PairingReal:
    case TermKind::PairingImag: {
      require(qp != qq, "pairing term on coincident orbitals");
      // c+_p c+_q + h.c. with p before q in JW order maps to (XX - YY)/2 Z_jw;
      // swapping the orbital order flips the fermionic sign.
      const int lo = std::min(qp, qq), hi = std::max(qp, qq);
      const double sgn = (qp < qq) ? 1.0 : -1.0;
      if (term.kind == TermKind::PairingReal) {
        out.push_back(detail::with_z_string(n, lo, hi, PauliLetter::X, PauliLetter::X,
                                            sgn * term.coeff / 2.0));
        out.push_back(detail::with_z_string(n, lo, hi, PauliLetter::Y, PauliLetter::Y,
                                            -sgn * term.coeff / 2.0));
      } else {
        // i(c+_p c+_q - c_q c_p) -> (XY + YX)/2 Z_jw for p before q.
        out.push_back(detail::with_z_string(n, lo, hi, PauliLetter::X, PauliLetter::Y,
                                            sgn * term.coeff / 2.0));
        out.push_back(detail::with_z_string(n, lo, hi, PauliLetter::Y, PauliLetter::X,
                                            sgn * term.coeff / 2.0));
      }
      break;
    }
  }
  return out;
}

inline std::vector<PauliString> jw_pauli_terms(const HamiltonianTerms& h,
                                               const OrderingMap& order) {
  std::vector<PauliString> out;
  for (const auto& t : h.terms) {
    auto ps = jw_pauli_terms(t, order);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

// Majorana operator c+_p + c_p = (prod_{q<p} Z_q) X_p. Hermitian, squares to
// the identity.
inline PauliString majorana_string(const SpinOrbital& so, const OrderingMap& order) {
  const int n = order.qubits();
  const int q = order.qubit(so);
  PauliString p(n);
  for (int k = 0; k < q; ++k) p.set(k, PauliLetter::Z);
  p.set(q, PauliLetter::X);
  return p;
}

}  // namespace hubsim
