#pragma once

// Wootters concurrence, relative entropy (nats), and the closest separable
// Bell-diagonal state. The closest separable state in relative entropy
// coincides with the face projection used by the separable approximation.

#include <cmath>
#include <limits>

#include "bsalab/bdstate.hpp"
#include "bsalab/errors.hpp"
#include "bsalab/lsd.hpp"
#include "bsalab/matcore.hpp"

namespace bsalab {

inline void require_density(const Mat4& rho) {
  double scale = std::max(1.0, rho.fro_norm());
  if (rho.herm_defect() > 1e-10 * scale) fail(errc::not_density_matrix, "not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-10) fail(errc::not_density_matrix, "trace is not 1");
  if (min_eigenvalue(rho) < -1e-10) fail(errc::not_density_matrix, "not positive semidefinite");
}

inline Mat4 spin_flip(const Mat4& rho) {
  Mat4 yy = tensor(pauli(2), pauli(2));
  return yy * rho.conjugate() * yy;
}

// Concurrence via the Hermitian route: the eigenvalues of rho rho~ equal
// those of sqrt(rho) rho~ sqrt(rho), which is PSD, so one Jacobi solve on a
// Hermitian matrix does the job.
inline double wootters_concurrence(const Mat4& rho) {
  require_density(rho);
  Mat4 r = mat_sqrt_psd(rho);
  Mat4 h = r * spin_flip(rho) * r;
  EigenSys<4> es = herm_eigen(h);
  double s[4];
  for (int i = 0; i < 4; ++i) {
    double v = es.val[3 - i];
    if (v < -1e-10) fail(errc::negative_eigenvalue, "spin-flipped product not PSD");
    s[i] = std::sqrt(std::max(0.0, v));
  }
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

inline double concurrence_bd(const BDState& s) {
  return std::max(0.0, 2 * s.p[argmax_p(s.p)] - 1);
}

struct RelEntropyResult {
  double nats;      // +inf when supports mismatch
  bool support_ok;  // false iff rho has weight outside supp(sigma)
};

namespace detail {

inline bool bell_diagonal(const Mat4& m, double tol = 1e-10) {
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j)
      if (std::abs(expval(bell_ket(i), m, bell_ket(j))) > tol) return false;
  return true;
}

}  // namespace detail

// S(rho || sigma) = tr rho ln rho - tr rho ln sigma, in nats. Support of
// sigma is cut at kRankTol relative; rho mass beyond 1e-10 outside it yields
// the +inf sentinel.
inline RelEntropyResult relative_entropy(const Mat4& rho, const Mat4& sigma) {
  require_density(rho);
  require_density(sigma);

  if (detail::bell_diagonal(rho) && detail::bell_diagonal(sigma)) {
    double s = 0, kernel_mass = 0;
    for (int i = 1; i <= 4; ++i) {
      double p = std::max(0.0, expval(bell_ket(i), rho, bell_ket(i)).real());
      double q = std::max(0.0, expval(bell_ket(i), sigma, bell_ket(i)).real());
      if (p <= 0) continue;
      if (q <= kRankTol) {
        kernel_mass += p;
        continue;
      }
      s += p * std::log(p / q);
    }
    if (kernel_mass > 1e-10) return {std::numeric_limits<double>::infinity(), false};
    return {s, true};
  }

  EigenSys<4> ea = herm_eigen(rho);
  EigenSys<4> eb = herm_eigen(sigma);
  double tr_rho_ln_rho = 0;
  for (int i = 0; i < 4; ++i)
    if (ea.val[i] > kRankTol) tr_rho_ln_rho += ea.val[i] * std::log(ea.val[i]);

  double tr_rho_ln_sigma = 0, kernel_mass = 0;
  for (int j = 0; j < 4; ++j) {
    double mass = std::max(0.0, expval(eb.vector(j), rho, eb.vector(j)).real());
    if (eb.val[j] > kRankTol) {
      tr_rho_ln_sigma += mass * std::log(eb.val[j]);
    } else {
      kernel_mass += mass;
    }
  }
  if (kernel_mass > 1e-10) return {std::numeric_limits<double>::infinity(), false};
  return {tr_rho_ln_rho - tr_rho_ln_sigma, true};
}

inline double relative_entropy_bd(const BDState& a, const BDState& b) {
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    if (a.p[i] <= 0) continue;
    if (b.p[i] <= kRankTol) return std::numeric_limits<double>::infinity();
    s += a.p[i] * std::log(a.p[i] / b.p[i]);
  }
  return s;
}

// Closest separable BD state in relative entropy: the same face projection
// as the separable approximation, p'_i = p_i / (2(1-p_max)), p'_max = 1/2.
inline BDState closest_separable_bd(const BDState& s) {
  if (is_separable(s)) return s;
  CanonicalForm c = canonicalize(s);
  double p4 = c.state.p[3];
  if (p4 > 1 - 1e-12) fail(errc::degenerate_vertex, "pure Bell state has no face projection");
  PVec q{c.state.p[0] / (2 * (1 - p4)), c.state.p[1] / (2 * (1 - p4)),
         c.state.p[2] / (2 * (1 - p4)), 0.5};
  return apply_pauli_frame(BDState::from_p(q), c.pauli);
}

}  // namespace bsalab
