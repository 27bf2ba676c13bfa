#pragma once

// Closed-form best separable approximation for Bell-diagonal states:
// rho = lambda rho_s + (1 - lambda)|psi><psi| with lambda maximal. For a state
// in the singlet tetrahedron, rho_s is the radial projection of t onto the
// octahedron face x1 + x2 + x3 + 1 = 0 (projected from the vertex (-1,-1,-1)),
// lambda = (3 + t1 + t2 + t3)/2, and the pure part is the singlet.

#include <cmath>
#include <optional>
#include <vector>

#include "bsalab/bdstate.hpp"
#include "bsalab/errors.hpp"
#include "bsalab/matcore.hpp"

namespace bsalab {

struct EnsembleEntry {
  double weight;  // Lambda_alpha
  Ket2 e, f;      // product ket |e,f>

  Ket4 ket() const { return tensor(e, f); }
};

struct LSDecomposition {
  double lambda = 1;
  BDState rho_s;                        // the best separable approximation
  Ket4 pure_part;                       // Bell state of the owning tetrahedron
  std::vector<EnsembleEntry> ensemble;  // product decomposition of lambda*rho_s
  std::optional<int> tetra;             // dominant Bell index, 1..4
  int canonical_pauli = 0;              // conjugation used internally
};

inline bool on_singlet_face(const TVec& t, double tol = 1e-10) {
  return t_physical(t, 1e-9) && std::abs(1 + t[0] + t[1] + t[2]) <= tol;
}

// Radial projection onto the singlet octahedron face.
inline TVec project_to_face(const TVec& t) {
  double s = 3 + t[0] + t[1] + t[2];
  if (1 + t[0] + t[1] + t[2] >= 0)
    fail(errc::not_in_singlet_tetra, "state is not in the singlet entangled tetrahedron");
  if (s < 1e-12) fail(errc::degenerate_vertex, "projection from the singlet vertex is undefined");
  return {(-1 + t[0] - t[1] - t[2]) / s, (-1 - t[0] + t[1] - t[2]) / s,
          (-1 - t[0] - t[1] + t[2]) / s};
}

inline TVec face_centroid() { return {-1.0 / 3, -1.0 / 3, -1.0 / 3}; }

namespace detail {

inline void push_vertex_pair(std::vector<EnsembleEntry>& out, int axis, int sign, double vertex_weight) {
  // A +/- octahedron vertex on an axis is the even mixture of two product
  // states built from that axis' eigenkets: correlated for +, anti for -.
  // Zero-weight vertices are dropped so the support stays minimal.
  if (vertex_weight <= 0) return;
  Ket2 up = pauli_eigenket(axis, +1), dn = pauli_eigenket(axis, -1);
  if (sign > 0) {
    out.push_back({vertex_weight / 2, up, up});
    out.push_back({vertex_weight / 2, dn, dn});
  } else {
    out.push_back({vertex_weight / 2, up, dn});
    out.push_back({vertex_weight / 2, dn, up});
  }
}

}  // namespace detail

// Product-state ensemble of a separable BD state, unit total weight.
// Face states yield the canonical six kets
//   (x+,x-) (x-,x+) (y+,y-) (y-,y+) (z+,z-) (z-,z+)
// with pair weights -t_i/2. Other separable states decompose over octahedron
// vertices with minimal support: w1 = |t1|, w2 = |t2| sit on the signed x and
// y vertices, the z axis carries the slack 1 - |t1| - |t2| split so the net
// z correlation is t3 (8 kets).
inline std::vector<EnsembleEntry> product_ensemble(const BDState& s) {
  const TVec& t = s.t;
  std::vector<EnsembleEntry> out;
  if (on_singlet_face(t)) {
    for (int ax = 1; ax <= 3; ++ax) detail::push_vertex_pair(out, ax, -1, -t[ax - 1]);
    return out;
  }
  if (!is_separable(s)) fail(errc::not_on_face, "entangled state is not on the singlet face");
  double w1 = std::abs(t[0]), w2 = std::abs(t[1]);
  double w3 = 1 - w1 - w2;  // >= |t3| inside the octahedron
  detail::push_vertex_pair(out, 1, t[0] >= 0 ? +1 : -1, w1);
  detail::push_vertex_pair(out, 2, t[1] >= 0 ? +1 : -1, w2);
  detail::push_vertex_pair(out, 3, -1, (w3 - t[2]) / 2);
  detail::push_vertex_pair(out, 3, +1, (w3 + t[2]) / 2);
  return out;
}

// The optimal decomposition, reported in the frame of the input state.
inline LSDecomposition bsa_bd(const BDState& s) {
  LSDecomposition d;
  if (is_separable(s)) {
    d.lambda = 1;
    d.rho_s = s;
    d.pure_part = bell_ket(argmax_p(s.p) + 1);  // unused placeholder vertex
    d.ensemble = product_ensemble(s);
    d.tetra = std::nullopt;
    return d;
  }

  CanonicalForm c = canonicalize(s);
  const TVec& t = c.state.t;
  double sum = t[0] + t[1] + t[2];
  d.lambda = (3 + sum) / 2;
  TVec tf = (d.lambda < 1e-12) ? face_centroid() : project_to_face(t);
  BDState face = BDState::from_t(tf);
  d.ensemble = product_ensemble(face);
  for (auto& e : d.ensemble) e.weight *= d.lambda;

  // Map back to the input frame: conjugate the separable part and the kets by
  // sigma_k (x) I; the pure part becomes the Bell state of the owning
  // tetrahedron.
  d.rho_s = apply_pauli_frame(face, c.pauli);
  for (auto& e : d.ensemble) e.e = apply_pauli_ket2(e.e, c.pauli);
  d.tetra = tetra_id(s);
  d.pure_part = bell_ket(*d.tetra);
  d.canonical_pauli = c.pauli;
  return d;
}

inline Mat4 reconstruct(const LSDecomposition& d) {
  Mat4 m;
  for (const auto& e : d.ensemble) m = m + cplx(e.weight) * projector(e.ket());
  m = m + cplx(1 - d.lambda) * projector(d.pure_part);
  return m;
}

}  // namespace bsalab
