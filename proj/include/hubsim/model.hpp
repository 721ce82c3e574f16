#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hubsim/common.hpp"

namespace hubsim {

// ---------------------------------------------------------------------------
// Lattice
// ---------------------------------------------------------------------------

enum class Boundary { Open, Periodic };
enum class Spin : int { Up = 0, Down = 1 };

enum class BondDir { X, Y, DiagNE, DiagSE };

struct Bond {
  int a = 0, b = 0;   // site indices, tail and head
  BondDir dir = BondDir::X;
  int parity = 0;     // parity class within its direction family (0 = even)
};

// Square lattice, nx columns by ny rows, sites indexed row-major.
struct LatticeSpec {
  int nx = 1, ny = 1;
  Boundary boundary = Boundary::Open;

  LatticeSpec() = default;
  LatticeSpec(int nx_, int ny_, Boundary b = Boundary::Open) : nx(nx_), ny(ny_), boundary(b) {
    require(nx >= 1 && ny >= 1, "lattice dimensions must be positive");
  }

  int sites() const { return nx * ny; }
  int qubits() const { return 2 * nx * ny; }
  int site(int x, int y) const { return y * nx + x; }
  int x_of(int s) const { return s % nx; }
  int y_of(int s) const { return s / nx; }
  int sublattice_sign(int s) const { return ((x_of(s) + y_of(s)) % 2 == 0) ? +1 : -1; }

  // Nearest-neighbor bonds, row-major tail site, +x bond before +y bond.
  // On a periodic 2-wide lattice the wrap bond is kept: a 2-torus genuinely
  // has two bonds between adjacent columns, which is what the standard
  // dispersion -2t(cos kx + cos ky) presumes.
  std::vector<Bond> bonds() const {
    std::vector<Bond> out;
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const int s = site(x, y);
        if (x + 1 < nx) {
          out.push_back({s, site(x + 1, y), BondDir::X, x % 2});
        } else if (boundary == Boundary::Periodic && nx > 1) {
          out.push_back({s, site(0, y), BondDir::X, x % 2});
        }
        if (y + 1 < ny) {
          out.push_back({s, site(x, y + 1), BondDir::Y, y % 2});
        } else if (boundary == Boundary::Periodic && ny > 1) {
          out.push_back({s, site(x, 0), BondDir::Y, y % 2});
        }
      }
    }
    return out;
  }

  // Second-neighbor (diagonal) bonds, used by the imaginary d_xy pair field.
  std::vector<Bond> diagonal_bonds() const {
    std::vector<Bond> out;
    if (nx < 2 || ny < 2) return out;
    const bool per = boundary == Boundary::Periodic;
    auto wrap = [](int v, int n) { return (v % n + n) % n; };
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const int s = site(x, y);
        // +x+y
        if ((x + 1 < nx && y + 1 < ny) || (per && nx > 2 && ny > 2)) {
          out.push_back({s, site(wrap(x + 1, nx), wrap(y + 1, ny)), BondDir::DiagNE, x % 2});
        }
        // +x-y
        if ((x + 1 < nx && y - 1 >= 0) || (per && nx > 2 && ny > 2)) {
          out.push_back({s, site(wrap(x + 1, nx), wrap(y - 1, ny)), BondDir::DiagSE, x % 2});
        }
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Couplings
// ---------------------------------------------------------------------------

// One full set of couplings for a lattice. Vectors are indexed by the
// enumeration order of LatticeSpec::bonds() / diagonal_bonds() / sites.
// w and u_nodal are the pinning-field channels of the adiabatic path; they are
// bookkeeping scalars carried alongside the explicit per-bond pair fields.
struct CouplingSet {
  std::vector<double> t;           // hopping per NN bond
  std::vector<double> U;           // on-site repulsion per site
  std::vector<double> eps;         // on-site energy per site
  std::vector<double> delta_x2y2;  // d-wave pair field per NN bond (signed)
  std::vector<double> delta_xy;    // imaginary d_xy pair field per diagonal bond
  double stag_field = 0.0;
  double w = 0.0;
  double u_nodal = 0.0;

  static CouplingSet zero(const LatticeSpec& spec) {
    CouplingSet c;
    c.t.assign(spec.bonds().size(), 0.0);
    c.U.assign(spec.sites(), 0.0);
    c.eps.assign(spec.sites(), 0.0);
    c.delta_x2y2.assign(spec.bonds().size(), 0.0);
    c.delta_xy.assign(spec.diagonal_bonds().size(), 0.0);
    return c;
  }

  static CouplingSet uniform(const LatticeSpec& spec, double t_val, double U_val,
                             double eps_val = 0.0) {
    CouplingSet c = zero(spec);
    std::fill(c.t.begin(), c.t.end(), t_val);
    std::fill(c.U.begin(), c.U.end(), U_val);
    std::fill(c.eps.begin(), c.eps.end(), eps_val);
    return c;
  }

  // d-wave sign structure: +delta/2 on x bonds, -delta/2 on y bonds.
  void set_dwave(const LatticeSpec& spec, double delta) {
    const auto bonds = spec.bonds();
    delta_x2y2.assign(bonds.size(), 0.0);
    for (std::size_t i = 0; i < bonds.size(); ++i)
      delta_x2y2[i] = (bonds[i].dir == BondDir::X) ? delta / 2.0 : -delta / 2.0;
  }

  // Imaginary second-neighbor field, +u*delta/2 on both diagonal directions.
  void set_dxy(const LatticeSpec& spec, double u, double delta) {
    delta_xy.assign(spec.diagonal_bonds().size(), u * delta / 2.0);
  }

  void check_finite() const {
    auto chk = [](const std::vector<double>& v) {
      for (double x : v) require(std::isfinite(x), "coupling not finite");
    };
    chk(t);
    chk(U);
    chk(eps);
    chk(delta_x2y2);
    chk(delta_xy);
    require(std::isfinite(stag_field) && std::isfinite(w) && std::isfinite(u_nodal),
            "coupling not finite");
  }
};

// ---------------------------------------------------------------------------
// Second-quantized terms
// ---------------------------------------------------------------------------

enum class TermKind { Hopping, Repulsion, ChemPot, PairingReal, PairingImag, StaggeredZ };

struct SpinOrbital {
  int site = 0;
  Spin spin = Spin::Up;
  bool operator==(const SpinOrbital& o) const { return site == o.site && spin == o.spin; }
};

// Hamiltonian contribution per kind, with p/q the spin-orbitals involved:
//   Hopping      coeff * (c+_p c_q + c+_q c_p)
//   Repulsion    coeff * n_p n_q          (p = (i,up), q = (i,down))
//   ChemPot      coeff * n_p
//   PairingReal  coeff * (c+_p c+_q + c_q c_p)
//   PairingImag  coeff * i (c+_p c+_q - c_q c_p)
//   StaggeredZ   coeff * sign * n_p
struct Term {
  TermKind kind = TermKind::Hopping;
  double coeff = 0.0;
  SpinOrbital p, q;
  int sign = +1;  // StaggeredZ sublattice sign

  bool two_body_sites() const {
    return kind == TermKind::Hopping || kind == TermKind::PairingReal ||
           kind == TermKind::PairingImag || kind == TermKind::Repulsion;
  }
};

struct HamiltonianTerms {
  LatticeSpec spec;
  std::vector<Term> terms;

  int qubits() const { return spec.qubits(); }
};

namespace detail {

inline void check_bond_range(const LatticeSpec& spec, const Bond& b) {
  require(b.a >= 0 && b.a < spec.sites() && b.b >= 0 && b.b < spec.sites() && b.a != b.b,
          "bond references out-of-range or coincident sites");
}

}  // namespace detail

// Hubbard Hamiltonian: -t_ij hopping per bond per spin, U_i repulsion per
// site, eps_i chemical potential per occupied spin-orbital. Deterministic
// ordering: bonds row-major with the up block first, then repulsions, then
// chemical potentials.
inline HamiltonianTerms build_hubbard_terms(const LatticeSpec& spec, const CouplingSet& c) {
  const auto bonds = spec.bonds();
  require(c.t.size() == bonds.size(), "coupling set t entries do not match bond count");
  require(c.U.size() == static_cast<std::size_t>(spec.sites()), "U entries do not match sites");
  require(c.eps.size() == static_cast<std::size_t>(spec.sites()), "eps entries do not match sites");
  c.check_finite();

  HamiltonianTerms h{spec, {}};
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      detail::check_bond_range(spec, bonds[i]);
      if (c.t[i] == 0.0) continue;
      h.terms.push_back({TermKind::Hopping, -c.t[i], {bonds[i].a, s}, {bonds[i].b, s}, +1});
    }
  }
  for (int i = 0; i < spec.sites(); ++i) {
    if (c.U[i] == 0.0) continue;
    h.terms.push_back({TermKind::Repulsion, c.U[i], {i, Spin::Up}, {i, Spin::Down}, +1});
  }
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (int i = 0; i < spec.sites(); ++i) {
      if (c.eps[i] == 0.0) continue;
      h.terms.push_back({TermKind::ChemPot, c.eps[i], {i, s}, {i, s}, +1});
    }
  }
  return h;
}

enum class MeanFieldKind { DSC, AF };

// Mean-field relatives of the Hubbard model. DSC adds the d-wave pair field
// with its sign structure; AF adds a staggered Z field with sign (-1)^i.
inline HamiltonianTerms build_meanfield_terms(const LatticeSpec& spec, MeanFieldKind kind,
                                              const CouplingSet& c) {
  const auto bonds = spec.bonds();
  require(c.t.size() == bonds.size(), "coupling set t entries do not match bond count");
  c.check_finite();

  HamiltonianTerms h{spec, {}};
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      if (c.t[i] == 0.0) continue;
      h.terms.push_back({TermKind::Hopping, -c.t[i], {bonds[i].a, s}, {bonds[i].b, s}, +1});
    }
  }

  if (kind == MeanFieldKind::DSC) {
    bool any = false;
    for (double d : c.delta_x2y2) any |= (d != 0.0);
    require(any, "DSC mean field requested with no pair field");
    // -sum_ij Delta_ij (c+_{i,up} c+_{j,dn} - c+_{i,dn} c+_{j,up}) + h.c.
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      const double d = c.delta_x2y2[i];
      if (d == 0.0) continue;
      h.terms.push_back(
          {TermKind::PairingReal, -d, {bonds[i].a, Spin::Up}, {bonds[i].b, Spin::Down}, +1});
      h.terms.push_back(
          {TermKind::PairingReal, +d, {bonds[i].a, Spin::Down}, {bonds[i].b, Spin::Up}, +1});
    }
    // -sum_jk i Delta^xy_jk (c+_{j,up} c+_{k,dn} - c+_{j,dn} c+_{k,up}) + h.c.
    const auto diag = spec.diagonal_bonds();
    require(c.delta_xy.size() == diag.size() || c.delta_xy.empty(),
            "delta_xy entries do not match diagonal bond count");
    for (std::size_t i = 0; i < c.delta_xy.size(); ++i) {
      const double d = c.delta_xy[i];
      if (d == 0.0) continue;
      h.terms.push_back(
          {TermKind::PairingImag, -d, {diag[i].a, Spin::Up}, {diag[i].b, Spin::Down}, +1});
      h.terms.push_back(
          {TermKind::PairingImag, +d, {diag[i].a, Spin::Down}, {diag[i].b, Spin::Up}, +1});
    }
  } else {
    if (c.stag_field != 0.0) {
      // -N sum_i (-1)^i (n_{i,up} - n_{i,dn})
      for (Spin s : {Spin::Up, Spin::Down}) {
        const double sgn_spin = (s == Spin::Up) ? 1.0 : -1.0;
        for (int i = 0; i < spec.sites(); ++i) {
          h.terms.push_back(
              {TermKind::StaggeredZ, -c.stag_field * sgn_spin, {i, s}, {i, s},
               spec.sublattice_sign(i)});
        }
      }
    }
  }
  // On-site pieces retained so schedules can interpolate between model kinds.
  for (int i = 0; i < spec.sites(); ++i) {
    if (!c.U.empty() && c.U[i] != 0.0)
      h.terms.push_back({TermKind::Repulsion, c.U[i], {i, Spin::Up}, {i, Spin::Down}, +1});
  }
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (int i = 0; i < spec.sites(); ++i) {
      if (!c.eps.empty() && c.eps[i] != 0.0)
        h.terms.push_back({TermKind::ChemPot, c.eps[i], {i, s}, {i, s}, +1});
    }
  }
  return h;
}

// Builds the full term list for an arbitrary coupling set (hopping, on-site,
// and any pair fields present). This is the Hamiltonian used along annealing
// paths, where mean-field and Hubbard pieces coexist.
inline HamiltonianTerms build_path_terms(const LatticeSpec& spec, const CouplingSet& c) {
  bool any_pair = false;
  for (double d : c.delta_x2y2) any_pair |= (d != 0.0);
  for (double d : c.delta_xy) any_pair |= (d != 0.0);
  if (!any_pair && c.stag_field == 0.0) return build_hubbard_terms(spec, c);
  if (any_pair) return build_meanfield_terms(spec, MeanFieldKind::DSC, c);
  return build_meanfield_terms(spec, MeanFieldKind::AF, c);
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

enum class Interp { Linear, Reparameterized };

struct ScheduleSegment {
  double duration = 0.0;  // units 1/t
  CouplingSet start, end;
  Interp interp = Interp::Linear;
  int reparam_m = 0;  // boundary-cancellation order when reparameterized
};

struct Schedule {
  std::vector<ScheduleSegment> segments;

  double total_duration() const {
    double d = 0.0;
    for (const auto& s : segments) d += s.duration;
    return d;
  }
};

// Normalized incomplete-beta reparameterization
//   f(s) = int_0^s y^m (1-y)^m dy / int_0^1 y^m (1-y)^m dy,
// whose first m derivatives vanish at both endpoints. Evaluated by Gauss-
// Legendre quadrature of the polynomial integrand (exact at this order).
inline double boundary_f(double s, int m) {
  require(s >= -1e-12 && s <= 1.0 + 1e-12, "boundary_f: s out of [0,1]");
  require(m >= 0, "boundary_f: m must be nonnegative");
  s = std::min(1.0, std::max(0.0, s));
  if (m == 0) return s;
  // Integrate y^m (1-y)^m on [0,s] with an exact-degree Gauss-Legendre rule.
  const int npts = m + 2;
  // Nodes/weights via Newton iteration on Legendre polynomials.
  std::vector<double> xg(npts), wg(npts);
  for (int i = 0; i < npts; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (npts + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = npts * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    xg[i] = x;
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= npts; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = npts * (x * p1 - p0) / (x * x - 1.0);
    wg[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  auto integral = [&](double hi) {
    double acc = 0.0;
    for (int i = 0; i < npts; ++i) {
      const double y = 0.5 * hi * (xg[i] + 1.0);
      acc += wg[i] * std::pow(y * (1.0 - y), m);
    }
    return acc * 0.5 * hi;
  };
  return integral(s) / integral(1.0);
}

namespace detail {

inline std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b,
                                double f) {
  require(a.size() == b.size(), "schedule endpoints have mismatched coupling shapes");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - f) * a[i] + f * b[i];
  return out;
}

}  // namespace detail

// Coupling set at a given absolute time along the schedule. Linear segments
// interpolate couplings elementwise; reparameterized segments first map the
// segment-local s through boundary_f.
inline CouplingSet interpolate(const Schedule& sched, double time) {
  const double total = sched.total_duration();
  require(time >= -1e-12 && time <= total + 1e-12, "interpolate: time out of schedule range");
  time = std::min(total, std::max(0.0, time));
  double t0 = 0.0;
  for (const auto& seg : sched.segments) {
    if (time <= t0 + seg.duration + 1e-15 || &seg == &sched.segments.back()) {
      double s = (seg.duration > 0.0) ? (time - t0) / seg.duration : 1.0;
      s = std::min(1.0, std::max(0.0, s));
      const double f = (seg.interp == Interp::Linear) ? s : boundary_f(s, seg.reparam_m);
      CouplingSet out;
      out.t = detail::lerp(seg.start.t, seg.end.t, f);
      out.U = detail::lerp(seg.start.U, seg.end.U, f);
      out.eps = detail::lerp(seg.start.eps, seg.end.eps, f);
      out.delta_x2y2 = detail::lerp(seg.start.delta_x2y2, seg.end.delta_x2y2, f);
      out.delta_xy = detail::lerp(seg.start.delta_xy, seg.end.delta_xy, f);
      out.stag_field = (1.0 - f) * seg.start.stag_field + f * seg.end.stag_field;
      out.w = (1.0 - f) * seg.start.w + f * seg.end.w;
      out.u_nodal = (1.0 - f) * seg.start.u_nodal + f * seg.end.u_nodal;
      return out;
    }
    t0 += seg.duration;
  }
  throw Error("interpolate: unreachable");
}

// The paper's DSC annealing path: (1-s) H^MF_DSC + s H_Hub with the pinning
// pair fields w*Delta (d-wave) and u*Delta/2 (imaginary d_xy) held outside the
// convex combination. Realized as coupling endpoints: the pair channel starts
// at (1+w)*Delta and ends at w*Delta; the d_xy channel is constant.
inline Schedule build_dsc_path(const LatticeSpec& spec, double t, double U, double delta, double w,
                               double u, double T) {
  CouplingSet start = CouplingSet::uniform(spec, t, 0.0);
  start.set_dwave(spec, (1.0 + w) * delta);
  start.set_dxy(spec, u, delta);
  start.w = w;
  start.u_nodal = u;

  CouplingSet end = CouplingSet::uniform(spec, t, U);
  end.set_dwave(spec, w * delta);
  end.set_dxy(spec, u, delta);
  end.w = w;
  end.u_nodal = u;

  Schedule sched;
  sched.segments.push_back({T, start, end, Interp::Linear, 0});
  return sched;
}

// ---------------------------------------------------------------------------
// Commuting-set grouping
// ---------------------------------------------------------------------------

// Canonical five-family grouping for the square-lattice Hubbard model:
// even-column horizontal hops, odd-column horizontal hops, even-row vertical
// hops, odd-row vertical hops, and all on-site terms. Empty families are
// dropped, so degenerate lattices return fewer sets.
inline std::vector<std::vector<Term>> group_commuting_sets(const HamiltonianTerms& h) {
  std::vector<std::vector<Term>> sets(5);
  const auto bonds = h.spec.bonds();
  auto classify_bond = [&](const Term& t) -> int {
    for (const auto& b : bonds) {
      if ((b.a == t.p.site && b.b == t.q.site) || (b.a == t.q.site && b.b == t.p.site)) {
        const int base = (b.dir == BondDir::X) ? 0 : 2;
        return base + b.parity;
      }
    }
    return -1;
  };
  for (const auto& t : h.terms) {
    switch (t.kind) {
      case TermKind::Hopping: {
        require(t.p.spin == t.q.spin, "hopping term mixes spins");
        const int fam = classify_bond(t);
        require(fam >= 0, "hopping term not on a lattice bond; not classifiable");
        sets[fam].push_back(t);
        break;
      }
      case TermKind::Repulsion:
      case TermKind::ChemPot:
      case TermKind::StaggeredZ:
        sets[4].push_back(t);
        break;
      default:
        throw Error("group_commuting_sets: pairing terms are not part of the five-set "
                    "Hubbard grouping");
    }
  }
  // Odd-width periodic lattices would put bonds sharing a site into one
  // family; reject rather than return a non-commuting set.
  if (h.spec.boundary == Boundary::Periodic) {
    require(h.spec.nx % 2 == 0 || h.spec.nx <= 2, "odd periodic width is not classifiable");
    require(h.spec.ny % 2 == 0 || h.spec.ny <= 2, "odd periodic height is not classifiable");
  }
  std::vector<std::vector<Term>> out;
  for (auto& s : sets)
    if (!s.empty()) out.push_back(std::move(s));
  return out;
}

// Extended partition including pair-field families, used to Trotterize
// annealing-path Hamiltonians. Hopping and pairing on the same bond commute,
// but on bonds sharing one site they do not, so pairing gets its own
// direction/parity families; the four-set bond structure carries over.
inline std::vector<std::vector<Term>> commuting_partition(const HamiltonianTerms& h) {
  bool any_pairing = false;
  for (const auto& t : h.terms)
    any_pairing |= (t.kind == TermKind::PairingReal || t.kind == TermKind::PairingImag);
  if (!any_pairing) return group_commuting_sets(h);

  const auto bonds = h.spec.bonds();
  const auto diag = h.spec.diagonal_bonds();
  auto family_of = [&](const Term& t, const std::vector<Bond>& list) -> int {
    for (const auto& b : list) {
      if ((b.a == t.p.site && b.b == t.q.site) || (b.a == t.q.site && b.b == t.p.site)) {
        const int base = (b.dir == BondDir::X)        ? 0
                         : (b.dir == BondDir::Y)      ? 2
                         : (b.dir == BondDir::DiagNE) ? 4
                                                      : 6;
        return base + b.parity;
      }
    }
    return -1;
  };

  std::vector<std::vector<Term>> hop(4), pair(8);
  std::vector<Term> onsite;
  for (const auto& t : h.terms) {
    switch (t.kind) {
      case TermKind::Hopping: {
        const int fam = family_of(t, bonds);
        require(fam >= 0 && fam < 4, "hopping term not on a NN bond");
        hop[fam].push_back(t);
        break;
      }
      case TermKind::PairingReal: {
        const int fam = family_of(t, bonds);
        require(fam >= 0 && fam < 4, "real pairing term not on a NN bond");
        pair[fam].push_back(t);
        break;
      }
      case TermKind::PairingImag: {
        const int fam = family_of(t, diag);
        require(fam >= 4, "imaginary pairing term not on a diagonal bond");
        pair[fam - 4 + 4].push_back(t);
        break;
      }
      default:
        onsite.push_back(t);
        break;
    }
  }
  std::vector<std::vector<Term>> out;
  for (auto& s : hop)
    if (!s.empty()) out.push_back(std::move(s));
  for (auto& s : pair)
    if (!s.empty()) out.push_back(std::move(s));
  if (!onsite.empty()) out.push_back(std::move(onsite));
  return out;
}

}  // namespace hubsim
