#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "hubsim/circuits.hpp"
#include "hubsim/common.hpp"
#include "hubsim/encoding.hpp"
#include "hubsim/model.hpp"

namespace hubsim {

// ---------------------------------------------------------------------------
// Orbital matrices and Givens sequences
// ---------------------------------------------------------------------------

// Columns are occupied single-particle orbitals over JW-ordered modes.
struct OrbitalMatrix {
  Matrix p;  // n x Ne

  int modes() const { return static_cast<int>(p.rows()); }
  int electrons() const { return static_cast<int>(p.cols()); }

  void check_orthonormal(double tol = 1e-10) const {
    Matrix g = p.adjoint() * p;
    require((g - Matrix::Identity(p.cols(), p.cols())).cwiseAbs().maxCoeff() < tol,
            "orbital matrix columns are not orthonormal");
  }

  Matrix density() const { return p * p.adjoint(); }
};

// exp(z c+_i c_j - h.c.) with z = theta e^{i phase}. Single-particle image on
// the (i, j) block: [[cos th, e^{i phase} sin th], [-e^{-i phase} sin th, cos th]].
struct GivensRotation {
  int i = 0, j = 0;
  double theta = 0.0;
  double phase = 0.0;
};

struct GivensSequence {
  int modes = 0;
  std::uint64_t initial_occupation = 0;
  std::vector<GivensRotation> rotations;

  // Product of the rotations' single-particle images, in application order.
  Matrix single_particle_matrix() const {
    Matrix r = Matrix::Identity(modes, modes);
    for (const auto& g : rotations) {
      Matrix rot = Matrix::Identity(modes, modes);
      const cplx e = std::exp(kI * g.phase);
      rot(g.i, g.i) = std::cos(g.theta);
      rot(g.j, g.j) = std::cos(g.theta);
      rot(g.i, g.j) = e * std::sin(g.theta);
      rot(g.j, g.i) = -std::conj(e) * std::sin(g.theta);
      r = rot * r;
    }
    return r;
  }

  Matrix reference_density() const {
    Matrix rho = Matrix::Zero(modes, modes);
    for (int q = 0; q < modes; ++q)
      if (initial_occupation & (std::uint64_t{1} << q)) rho(q, q) = 1.0;
    return rho;
  }
};

namespace detail {

// Complex Givens pair (c, s) with [[c, s], [-conj(s), c]] (a, b)^T = (r, 0)^T.
inline std::pair<double, cplx> zrotg(cplx a, cplx b) {
  const double h = std::sqrt(std::norm(a) + std::norm(b));
  if (std::abs(b) < 1e-300) return {1.0, cplx{0.0, 0.0}};
  if (std::abs(a) < 1e-300) return {0.0, std::conj(b) / std::abs(b)};
  const double c = std::abs(a) / h;
  const cplx s = (a / std::abs(a)) * std::conj(b) / h;
  return {c, s};
}

// Applies [[c, s], [-conj(s), c]] to rows (i, j) of m.
inline void rotate_rows(Matrix& m, int i, int j, double c, cplx s) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const cplx a = m(i, k), b = m(j, k);
    m(i, k) = c * a + s * b;
    m(j, k) = -std::conj(s) * a + c * b;
  }
}

inline GivensRotation rotation_from_cs(int i, int j, double c, cplx s) {
  GivensRotation g;
  g.i = i;
  g.j = j;
  g.theta = std::atan2(std::abs(s), c);
  g.phase = (std::abs(s) > 0) ? std::arg(s) : 0.0;
  return g;
}

constexpr double kGivensTol = 1e-11;

// Zero column entries of m (rows restricted to `rows`) below the leading
// staircase, recording the rotations. After the sweep the matrix is supported
// on the first m.cols() rows of `rows`.
inline void staircase_eliminate(Matrix& m, const std::vector<int>& rows,
                                std::vector<GivensRotation>& seq) {
  const int ncols = static_cast<int>(m.cols());
  const int nrows = static_cast<int>(rows.size());
  for (int col = 0; col < ncols; ++col) {
    for (int k = nrows - 1; k > col; --k) {
      const int rj = rows[k], ri = rows[k - 1];
      if (std::abs(m(rj, col)) < kGivensTol) continue;
      auto [c, s] = zrotg(m(ri, col), m(rj, col));
      rotate_rows(m, ri, rj, c, s);
      seq.push_back(rotation_from_cs(ri, rj, c, s));
    }
  }
}

}  // namespace detail

namespace detail {

// Collapses proportional row pairs within the support with one rotation each,
// then eliminates the rest via a staircase, using the hole complement when
// electrons outnumber holes. Returns the final occupied rows.
inline std::vector<int> decompose_component(Matrix& p, std::vector<int> support,
                                            const std::vector<int>& cols,
                                            std::vector<GivensRotation>& elim) {
  const int ne = static_cast<int>(cols.size());

  bool changed = true;
  while (changed) {
    changed = false;
    for (int jj = static_cast<int>(support.size()) - 1; jj > 0 && !changed; --jj) {
      for (int ii = 0; ii < jj && !changed; ++ii) {
        const int ri = support[ii], rj = support[jj];
        cplx lambda{0.0, 0.0};
        bool prop = true;
        int ref_col = -1;
        for (int c : cols) {
          if (std::abs(p(ri, c)) > kGivensTol) {
            ref_col = c;
            lambda = p(rj, c) / p(ri, c);
            break;
          }
          if (std::abs(p(rj, c)) > kGivensTol) {
            prop = false;
            break;
          }
        }
        if (ref_col < 0 || !prop) continue;
        for (int c : cols)
          prop &= std::abs(p(rj, c) - lambda * p(ri, c)) < 1e-9 * (1.0 + std::abs(p(ri, c)));
        if (!prop) continue;
        auto [cc, ss] = zrotg(p(ri, ref_col), p(rj, ref_col));
        rotate_rows(p, ri, rj, cc, ss);
        elim.push_back(rotation_from_cs(ri, rj, cc, ss));
        support.erase(support.begin() + jj);
        changed = true;
      }
    }
  }

  const int ns = static_cast<int>(support.size());
  require(ne <= ns, "support smaller than electron count");
  const int nholes = ns - ne;
  const int nrows = static_cast<int>(p.rows());

  if (nholes > 0 && ne > ns / 2) {
    // hole route: eliminate the complement orbitals toward the last support
    // rows, leaving electrons on the first ne support rows
    Matrix psup(ns, ne);
    for (int k = 0; k < ns; ++k)
      for (int c = 0; c < ne; ++c) psup(k, c) = p(support[k], cols[c]);
    Eigen::HouseholderQR<Matrix> qr(psup);
    Matrix full = qr.householderQ();
    Matrix hfull = Matrix::Zero(nrows, nholes);
    for (int k = 0; k < ns; ++k) hfull.row(support[k]) = full.row(k).tail(nholes);
    std::vector<int> flipped(support.rbegin(), support.rend());
    staircase_eliminate(hfull, flipped, elim);
    // the hole rotations must be replayed on p so callers can inspect it,
    // but p's occupied block is no longer needed beyond the support split
  } else if (nholes > 0) {
    // staircase on the occupied columns only
    Matrix psub(nrows, ne);
    for (int c = 0; c < ne; ++c) psub.col(c) = p.col(cols[c]);
    staircase_eliminate(psub, support, elim);
    for (int c = 0; c < ne; ++c) p.col(cols[c]) = psub.col(c);
  }
  return {support.begin(), support.begin() + ne};
}

}  // namespace detail

// Decomposes a Slater determinant into a reference occupation plus a sequence
// of Givens rotations. Independent row/column components (spin blocks of a
// spin-diagonal state) are decomposed separately; within each component,
// proportional rows (as arise from reflection-symmetric free-fermion states)
// are collapsed with one rotation each and the remainder is eliminated by a
// Givens staircase, on the hole orbitals when electrons outnumber holes.
// Zero-angle rotations are dropped.
inline GivensSequence givens_decompose(const OrbitalMatrix& orbitals) {
  orbitals.check_orthonormal();
  Matrix p = orbitals.p;
  const int n = orbitals.modes();
  const int ne = orbitals.electrons();
  require(ne <= n, "more electrons than modes");

  // connected components of rows linked through shared column support
  std::vector<int> parent(n);
  for (int r = 0; r < n; ++r) parent[r] = r;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int c = 0; c < ne; ++c) {
    int first = -1;
    for (int r = 0; r < n; ++r) {
      if (std::abs(p(r, c)) < detail::kGivensTol) continue;
      if (first < 0)
        first = r;
      else
        parent[find(r)] = find(first);
    }
  }
  // group columns by the component of their support
  std::map<int, std::vector<int>> comp_cols;
  std::map<int, std::vector<int>> comp_rows;
  for (int c = 0; c < ne; ++c) {
    for (int r = 0; r < n; ++r) {
      if (std::abs(p(r, c)) > detail::kGivensTol) {
        comp_cols[find(r)].push_back(c);
        break;
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    bool nonzero = false;
    for (int c = 0; c < ne; ++c) nonzero |= std::abs(p(r, c)) > detail::kGivensTol;
    if (nonzero) comp_rows[find(r)].push_back(r);
  }

  std::vector<GivensRotation> elim;
  GivensSequence seq;
  seq.modes = n;
  for (auto& [root, cols] : comp_cols) {
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    auto occ = detail::decompose_component(p, comp_rows[root], cols, elim);
    for (int r : occ) seq.initial_occupation |= std::uint64_t{1} << r;
  }

  for (auto it = elim.rbegin(); it != elim.rend(); ++it) {
    GivensRotation g = *it;  // inverse rotation: negate the angle
    g.theta = -g.theta;
    if (std::abs(g.theta) < detail::kGivensTol) continue;
    seq.rotations.push_back(g);
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Circuit compilation
// ---------------------------------------------------------------------------

namespace detail {

// Two-qubit block exp(z c+_a c_b - h.c.) on adjacent modes a < b = a + 1,
// z = theta e^{i phase}. The phase is gauged onto mode b with phase gates;
// the real rotation is two conjugated Rz cores.
inline void adjacent_givens_block(Circuit& c, int a, double theta, double phase) {
  const int b = a + 1;
  if (phase != 0.0) c.phase(b, -phase);
  // exp(theta (c+_a c_b - c+_b c_a)) = exp(+i th/2 X_a Y_b) exp(-i th/2 Y_a X_b)
  detail::rotation_core(c, a, b, -theta, detail::CoreBasis::XBasis, detail::CoreBasis::YBasis);
  detail::rotation_core(c, a, b, theta, detail::CoreBasis::YBasis, detail::CoreBasis::XBasis);
  if (phase != 0.0) c.phase(b, phase);
}

}  // namespace detail

// Compiles a Givens sequence into gates: X gates set the reference
// occupation, each rotation becomes a two-qubit block after FSWAP routing to
// adjacent positions.
inline Circuit slater_circuit(const GivensSequence& seq, const OrderingMap& order) {
  require(seq.modes == order.qubits(), "sequence/register size mismatch");
  Circuit c(seq.modes);
  for (int q = 0; q < seq.modes; ++q)
    if (seq.initial_occupation & (std::uint64_t{1} << q)) c.x(q);

  for (const auto& g : seq.rotations) {
    int a = g.i, b = g.j;
    double theta = g.theta, phase = g.phase;
    if (a > b) {
      // canonical order: rotation on (min, max) with conjugated parameters
      std::swap(a, b);
      theta = -theta;
      phase = -phase;
    }
    if (b == a + 1) {
      detail::adjacent_givens_block(c, a, theta, phase);
      continue;
    }
    // route mode b down next to a, apply, route back
    auto route = adjacent_route(b, a);
    for (auto [x, y] : route) c.fswap(std::min(x, y), std::max(x, y));
    detail::adjacent_givens_block(c, a, theta, phase);
    for (auto it = route.rbegin(); it != route.rend(); ++it)
      c.fswap(std::min(it->first, it->second), std::max(it->first, it->second));
  }
  return c;
}

// ---------------------------------------------------------------------------
// Mean-field orbital builders
// ---------------------------------------------------------------------------

// Lowest-Ne eigenvectors of a quadratic (number-conserving) Hamiltonian given
// as its single-particle matrix over JW modes.
inline OrbitalMatrix orbitals_from_quadratic(const Matrix& h_single, int ne) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h_single);
  OrbitalMatrix m;
  m.p = es.eigenvectors().leftCols(ne);
  return m;
}

// Single-particle matrix of spin-resolved hopping + on-site terms over JW
// modes (2N x 2N, spin blocks decoupled).
inline Matrix single_particle_matrix(const LatticeSpec& spec, const CouplingSet& c,
                                     const OrderingMap& order) {
  const int n = order.qubits();
  Matrix h = Matrix::Zero(n, n);
  const auto bonds = spec.bonds();
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      const int qa = order.qubit(bonds[b].a, s), qb = order.qubit(bonds[b].b, s);
      h(qa, qb) -= c.t[b];
      h(qb, qa) -= c.t[b];
    }
    for (int i = 0; i < spec.sites(); ++i) {
      const int q = order.qubit(i, s);
      h(q, q) += c.eps[i];
    }
  }
  return h;
}

// Slater orbitals of the particle-hole-transformed d-wave mean-field
// Hamiltonian: one orbital u_k |k,up> + v_k |k+Q,dn> per momentum, with
//   eps_k = -2t (cos kx + cos ky),  Delta_k = Delta (cos kx - cos ky),
// combined into real form using the k <-> -k symmetry.
inline OrbitalMatrix bcs_projector(const LatticeSpec& spec, double t, double delta,
                                   const OrderingMap& order) {
  require(spec.boundary == Boundary::Periodic, "bcs_projector needs a periodic lattice");
  require(spec.nx % 2 == 0 && spec.ny % 2 == 0, "bcs_projector needs even lattice dimensions");
  const int N = spec.sites();
  const int n = order.qubits();

  Matrix p = Matrix::Zero(n, N);
  int col = 0;
  for (int jy = 0; jy < spec.ny; ++jy) {
    for (int jx = 0; jx < spec.nx; ++jx, ++col) {
      const double kx = 2.0 * kPi * jx / spec.nx;
      const double ky = 2.0 * kPi * jy / spec.ny;
      const double eps = -2.0 * t * (std::cos(kx) + std::cos(ky));
      const double dk = delta * (std::cos(kx) - std::cos(ky));
      double u, v;
      const double e = std::sqrt(eps * eps + dk * dk);
      if (e < 1e-12) {
        throw Error("bcs_projector: gapless nodal momentum; add a nodal field or change "
                    "the lattice");
      }
      // eigenvector of [[eps, g], [g, -eps]] with eigenvalue -e, where the
      // momentum coupling is g = -Delta_k in this sublattice-sign gauge
      if (std::abs(dk) < 1e-14) {
        u = eps < 0 ? 1.0 : 0.0;
        v = eps < 0 ? 0.0 : 1.0;
      } else {
        v = -(eps + e);
        u = -dk;
        const double nrm = std::sqrt(u * u + v * v);
        u /= nrm;
        v /= nrm;
      }
      for (int y = 0; y < spec.ny; ++y) {
        for (int x = 0; x < spec.nx; ++x) {
          const int site = spec.site(x, y);
          const cplx bloch = std::exp(kI * (kx * x + ky * y)) / std::sqrt(double(N));
          const cplx blochQ =
              std::exp(kI * ((kx + kPi) * x + (ky + kPi) * y)) / std::sqrt(double(N));
          p(order.qubit(site, Spin::Up), col) += u * bloch;
          p(order.qubit(site, Spin::Down), col) += v * blochQ;
        }
      }
    }
  }

  // real combination of k and -k partners
  auto kindex = [&](int jx, int jy) {
    return ((spec.ny - jy) % spec.ny) * spec.nx + ((spec.nx - jx) % spec.nx);
  };
  Matrix preal = Matrix::Zero(n, N);
  std::vector<bool> used(N, false);
  col = 0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int jy = 0; jy < spec.ny; ++jy) {
    for (int jx = 0; jx < spec.nx; ++jx) {
      const int me = jy * spec.nx + jx;
      if (used[me]) continue;
      const int partner = kindex(jx, jy);
      if (partner == me) {
        preal.col(col++) = p.col(me);  // already real up to phase
        used[me] = true;
      } else {
        preal.col(col++) = (p.col(me) + p.col(partner)) * inv_sqrt2;
        preal.col(col++) = (p.col(me) - p.col(partner)) * (inv_sqrt2 / kI);
        used[me] = used[partner] = true;
      }
    }
  }
  OrbitalMatrix m;
  m.p = preal;
  m.check_orthonormal(1e-8);
  return m;
}

// Terms of the particle-hole-transformed DSC Hamiltonian (number conserving),
// for checking prepared states against sector ED.
inline HamiltonianTerms transformed_dsc_terms(const LatticeSpec& spec, double t, double delta) {
  CouplingSet c = CouplingSet::uniform(spec, t, 0.0);
  c.set_dwave(spec, delta);
  HamiltonianTerms h{spec, {}};
  const auto bonds = spec.bonds();
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      if (c.t[b] == 0.0) continue;
      h.terms.push_back({TermKind::Hopping, -c.t[b], {bonds[b].a, s}, {bonds[b].b, s}, +1});
    }
  }
  // -(-1)^j Delta_ij (c+_{i,up} c_{j,dn} - c+_{j,up} c_{i,dn}) + h.c.
  for (std::size_t b = 0; b < bonds.size(); ++b) {
    const double d = c.delta_x2y2[b];
    if (d == 0.0) continue;
    const int i = bonds[b].a, j = bonds[b].b;
    const double sgn_j = spec.sublattice_sign(j);
    h.terms.push_back({TermKind::Hopping, -sgn_j * d, {i, Spin::Up}, {j, Spin::Down}, +1});
    h.terms.push_back({TermKind::Hopping, +sgn_j * d, {j, Spin::Up}, {i, Spin::Down}, +1});
  }
  return h;
}

}  // namespace hubsim
