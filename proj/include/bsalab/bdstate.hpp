#pragma once

// Bell-diagonal two-qubit states in their dual parameterizations: the Bell
// probability 4-vector p and the correlation 3-vector t with
// rho = 1/4 (I + sum_i t_i sigma_i (x) sigma_i).
//
// Conventions, fixed repo-wide: computational basis |00>,|01>,|10>,|11> with
// sigma_z|0> = +|0>; Bell order phi+, phi-, psi+, psi- (indices 1..4).

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "bsalab/errors.hpp"
#include "bsalab/matcore.hpp"

namespace bsalab {

using PVec = std::array<double, 4>;
using TVec = std::array<double, 3>;

inline Ket4 bell_ket(int i) {  // 1-based
  const double r = 1.0 / std::sqrt(2.0);
  Ket4 k;
  switch (i) {
    case 1: k.a = {r, 0.0, 0.0, r}; break;
    case 2: k.a = {r, 0.0, 0.0, -r}; break;
    case 3: k.a = {0.0, r, r, 0.0}; break;
    case 4: k.a = {0.0, r, -r, 0.0}; break;
    default: fail(errc::invalid_input, "bell index out of range");
  }
  return k;
}

// Margins of the positivity tetrahedron; entry i-1 equals 4 p_i.
inline std::array<double, 4> t1_margins(const TVec& t) {
  return {1 + t[0] - t[1] + t[2], 1 - t[0] + t[1] + t[2],
          1 + t[0] + t[1] - t[2], 1 - t[0] - t[1] - t[2]};
}

// Margins of the PPT octahedron (positivity of the partial transpose,
// i.e. the tetrahedron margins with t2 negated).
inline std::array<double, 4> t2_margins(const TVec& t) {
  return {1 + t[0] + t[1] + t[2], 1 - t[0] - t[1] + t[2],
          1 + t[0] - t[1] - t[2], 1 - t[0] + t[1] - t[2]};
}

inline bool t_physical(const TVec& t, double tol = 1e-12) {
  for (double m : t1_margins(t))
    if (m < -tol) return false;
  return true;
}

// States on the octahedron surface count as separable.
inline bool t_separable(const TVec& t, double tol = 1e-12) {
  for (double m : t2_margins(t))
    if (m < -tol) return false;
  return true;
}

inline TVec t_from_p(const PVec& p) {
  return {p[0] - p[1] + p[2] - p[3], -p[0] + p[1] + p[2] - p[3],
          p[0] + p[1] - p[2] - p[3]};
}

inline PVec p_from_t(const TVec& t) {
  auto m = t1_margins(t);
  PVec p;
  for (int i = 0; i < 4; ++i) {
    if (m[i] < -4e-12) {
      fail(errc::unphysical_correlation,
           "t outside the physical tetrahedron (inequality " + std::to_string(i + 1) +
               " violated by " + std::to_string(-m[i] / 4) + ")");
    }
    p[i] = std::max(0.0, m[i] / 4);
  }
  return p;
}

struct BDState {
  PVec p{};
  TVec t{};

  static BDState from_p(const PVec& pin) {
    double sum = 0;
    PVec p = pin;
    for (double& v : p) {
      if (v < -1e-12) fail(errc::invalid_prob_vec, "negative Bell weight");
      if (v < 0) v = 0;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10) fail(errc::invalid_prob_vec, "Bell weights do not sum to 1");
    for (double v : p)
      if (!std::isfinite(v)) fail(errc::invalid_prob_vec, "non-finite Bell weight");
    return BDState{p, t_from_p(p)};
  }

  static BDState from_t(const TVec& tin) {
    for (double v : tin)
      if (!std::isfinite(v)) fail(errc::unphysical_correlation, "non-finite correlation");
    PVec p = p_from_t(tin);
    return BDState{p, tin};
  }
};

inline bool is_separable(const BDState& s, double tol = 1e-12) { return t_separable(s.t, tol); }

inline int argmax_p(const PVec& p) {  // lowest index wins ties
  int k = 0;
  for (int i = 1; i < 4; ++i)
    if (p[i] > p[k]) k = i;
  return k;
}

// Bell index (1..4) of the entangled tetrahedron owning the state, or nullopt
// for separable states. The violated PPT inequality of Eq-octahedron type has
// row index 5 - tetra_id.
inline std::optional<int> tetra_id(const BDState& s) {
  if (is_separable(s)) return std::nullopt;
  return argmax_p(s.p) + 1;
}

inline Mat4 to_density_matrix(const BDState& s) {
  Mat4 rho;
  for (int i = 1; i <= 4; ++i) rho = rho + cplx(s.p[i - 1]) * projector(bell_ket(i));
  return rho;
}

// Reads a Bell-diagonal density matrix back into (p, t) form. Rejects
// matrices that are not density matrices or carry off-diagonal Bell terms.
inline BDState bd_from_density(const Mat4& m, double tol = 1e-10) {
  double scale = std::max(1.0, m.fro_norm());
  if (m.herm_defect() > tol * scale) fail(errc::not_density_matrix, "matrix is not Hermitian");
  if (std::abs(m.trace() - cplx(1.0)) > 1e-8) fail(errc::not_density_matrix, "trace is not 1");
  if (min_eigenvalue(m) < -1e-10) fail(errc::not_density_matrix, "matrix is not PSD");
  PVec p;
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      cplx v = expval(bell_ket(i), m, bell_ket(j));
      if (i == j) {
        p[i - 1] = std::max(0.0, v.real());
      } else if (std::abs(v) > tol) {
        fail(errc::not_bell_diagonal, "matrix has off-diagonal Bell components");
      }
    }
  }
  return BDState::from_p(p);
}

// ------------------------------------------------- local Pauli relabeling ----
//
// Conjugation by sigma_k (x) I permutes Bell labels in double transpositions:
//   x: (1 3)(2 4)   y: (1 4)(2 3)   z: (1 2)(3 4)
// and each maps one entangled tetrahedron onto the singlet one.

inline std::array<int, 4> bell_perm(int pauli) {  // value: new 0-based slot of old label
  switch (pauli) {
    case 0: return {0, 1, 2, 3};
    case 1: return {2, 3, 0, 1};
    case 2: return {3, 2, 1, 0};
    case 3: return {1, 0, 3, 2};
    default: fail(errc::invalid_input, "pauli index out of range");
  }
}

inline BDState apply_pauli_frame(const BDState& s, int pauli) {
  auto perm = bell_perm(pauli);
  PVec p;
  for (int i = 0; i < 4; ++i) p[perm[i]] = s.p[i];
  return BDState::from_p(p);
}

inline Ket2 apply_pauli_ket2(const Ket2& k, int idx) { return pauli(idx) * k; }

inline Ket4 apply_pauli_a(const Ket4& v, int idx) { return tensor(pauli(idx), Mat2::identity()) * v; }

struct CanonicalForm {
  BDState state;  // dominant weight at p4 (or the input, when separable)
  int pauli;      // 0..3; conjugation by sigma_pauli (x) I maps input <-> canonical
};

// Sends the dominant Bell weight of an entangled state to the singlet slot.
// Separable states pass through unchanged. The record is involutive: applying
// the same conjugation again restores the original frame.
inline CanonicalForm canonicalize(const BDState& s) {
  if (is_separable(s)) return {s, 0};
  static constexpr int kPauliFor[4] = {2, 1, 3, 0};  // dominant label 1,2,3,4
  int k = argmax_p(s.p);
  int pauli = kPauliFor[k];
  return {apply_pauli_frame(s, pauli), pauli};
}

}  // namespace bsalab
