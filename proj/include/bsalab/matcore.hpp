#pragma once

// Fixed-size complex linear algebra for two-qubit work: kets and square
// matrices of dimension 2 and 4, a cyclic Jacobi Hermitian eigensolver, and
// the spectral functions built on it. No external solver.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>

#include "bsalab/errors.hpp"

namespace bsalab {

using cplx = std::complex<double>;

// Repo-wide relative rank threshold for pseudo-inverses and support tests.
inline constexpr double kRankTol = 1e-9;

// ---------------------------------------------------------------- kets ----

template <int N>
struct Ket {
  std::array<cplx, N> a{};

  cplx& operator[](int i) { return a[i]; }
  const cplx& operator[](int i) const { return a[i]; }

  double norm2() const {
    double s = 0;
    for (const auto& c : a) s += std::norm(c);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  Ket normalized() const {
    double n = norm();
    if (n < 1e-14) fail(errc::vanishing_norm, "ket has vanishing norm");
    Ket out;
    for (int i = 0; i < N; ++i) out.a[i] = a[i] / n;
    return out;
  }
};

using Ket2 = Ket<2>;
using Ket4 = Ket<4>;

// Inner product, conjugate-linear in the first argument.
template <int N>
inline cplx inner(const Ket<N>& x, const Ket<N>& y) {
  cplx s = 0;
  for (int i = 0; i < N; ++i) s += std::conj(x.a[i]) * y.a[i];
  return s;
}

template <int N>
inline Ket<N> operator*(cplx c, const Ket<N>& k) {
  Ket<N> out;
  for (int i = 0; i < N; ++i) out.a[i] = c * k.a[i];
  return out;
}

template <int N>
inline Ket<N> operator-(const Ket<N>& x, const Ket<N>& y) {
  Ket<N> out;
  for (int i = 0; i < N; ++i) out.a[i] = x.a[i] - y.a[i];
  return out;
}

template <int N>
inline Ket<N> operator+(const Ket<N>& x, const Ket<N>& y) {
  Ket<N> out;
  for (int i = 0; i < N; ++i) out.a[i] = x.a[i] + y.a[i];
  return out;
}

// ------------------------------------------------------------ matrices ----

template <int N>
struct Mat {
  std::array<cplx, static_cast<std::size_t>(N) * N> a{};

  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * N + j]; }
  const cplx& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * N + j]; }

  static Mat zero() { return Mat{}; }
  static Mat identity() {
    Mat m;
    for (int i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat adjoint() const {
    Mat m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = std::conj((*this)(j, i));
    return m;
  }

  Mat conjugate() const {
    Mat m;
    for (std::size_t i = 0; i < a.size(); ++i) m.a[i] = std::conj(a[i]);
    return m;
  }

  cplx trace() const {
    cplx s = 0;
    for (int i = 0; i < N; ++i) s += (*this)(i, i);
    return s;
  }

  double fro_norm() const {
    double s = 0;
    for (const auto& c : a) s += std::norm(c);
    return std::sqrt(s);
  }

  double herm_defect() const {
    double d = 0;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
  }
};

using Mat2 = Mat<2>;
using Mat4 = Mat<4>;

template <int N>
inline Mat<N> operator+(const Mat<N>& x, const Mat<N>& y) {
  Mat<N> m;
  for (std::size_t i = 0; i < x.a.size(); ++i) m.a[i] = x.a[i] + y.a[i];
  return m;
}

template <int N>
inline Mat<N> operator-(const Mat<N>& x, const Mat<N>& y) {
  Mat<N> m;
  for (std::size_t i = 0; i < x.a.size(); ++i) m.a[i] = x.a[i] - y.a[i];
  return m;
}

template <int N>
inline Mat<N> operator*(cplx c, const Mat<N>& x) {
  Mat<N> m;
  for (std::size_t i = 0; i < x.a.size(); ++i) m.a[i] = c * x.a[i];
  return m;
}

template <int N>
inline Mat<N> operator*(const Mat<N>& x, const Mat<N>& y) {
  Mat<N> m;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      cplx xik = x(i, k);
      if (xik == cplx{}) continue;
      for (int j = 0; j < N; ++j) m(i, j) += xik * y(k, j);
    }
  return m;
}

template <int N>
inline Ket<N> operator*(const Mat<N>& m, const Ket<N>& v) {
  Ket<N> out;
  for (int i = 0; i < N; ++i) {
    cplx s = 0;
    for (int j = 0; j < N; ++j) s += m(i, j) * v.a[j];
    out.a[i] = s;
  }
  return out;
}

template <int N>
inline Mat<N> outer(const Ket<N>& x, const Ket<N>& y) {
  Mat<N> m;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m(i, j) = x.a[i] * std::conj(y.a[j]);
  return m;
}

template <int N>
inline Mat<N> projector(const Ket<N>& x) {
  return outer(x, x);
}

template <int N>
inline cplx expval(const Ket<N>& x, const Mat<N>& m, const Ket<N>& y) {
  return inner(x, m * y);
}

// -------------------------------------------------------- Pauli algebra ----

inline Mat2 pauli(int k) {  // 0..3 = I, x, y, z
  Mat2 m;
  switch (k) {
    case 0: m(0, 0) = 1; m(1, 1) = 1; break;
    case 1: m(0, 1) = 1; m(1, 0) = 1; break;
    case 2: m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 3: m(0, 0) = 1; m(1, 1) = -1; break;
    default: fail(errc::invalid_input, "pauli index out of range");
  }
  return m;
}

// Eigenkets of sigma_axis (axis 1..3), sign +1 or -1.
inline Ket2 pauli_eigenket(int axis, int sign) {
  const double r = 1.0 / std::sqrt(2.0);
  Ket2 k;
  switch (axis) {
    case 1: k.a = {cplx(r), cplx(sign > 0 ? r : -r)}; break;
    case 2: k.a = {cplx(r), sign > 0 ? cplx(0, r) : cplx(0, -r)}; break;
    case 3:
      if (sign > 0) k.a = {1.0, 0.0};
      else k.a = {0.0, 1.0};
      break;
    default: fail(errc::invalid_input, "axis out of range");
  }
  return k;
}

// ------------------------------------------------------- tensor products ----

inline Mat4 tensor(const Mat2& x, const Mat2& y) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m(2 * i + k, 2 * j + l) = x(i, j) * y(k, l);
  return m;
}

inline Ket4 tensor(const Ket2& x, const Ket2& y) {
  Ket4 v;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) v.a[2 * i + k] = x.a[i] * y.a[k];
  return v;
}

// Partial transpose on the second qubit: M[(i,j),(k,l)] -> M[(i,l),(k,j)].
inline Mat4 partial_transpose_b(const Mat4& m) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + j, 2 * k + l) = m(2 * i + l, 2 * k + j);
  return out;
}

// ------------------------------------------------ Jacobi eigendecomposition ----

template <int N>
struct EigenSys {
  std::array<double, N> val{};  // ascending
  Mat<N> vec;                   // columns are the matching orthonormal eigenvectors

  Ket<N> vector(int j) const {
    Ket<N> k;
    for (int i = 0; i < N; ++i) k.a[i] = vec(i, j);
    return k;
  }
};

// Cyclic Jacobi for Hermitian matrices. Each sweep visits all off-diagonal
// pivots; a pivot (p,q) is annihilated by the unitary that diagonalizes the
// 2x2 block [[app, apq],[conj(apq), aqq]].
template <int N>
inline EigenSys<N> herm_eigen(const Mat<N>& m, double herm_tol = 1e-10) {
  double scale = std::max(1.0, m.fro_norm());
  if (m.herm_defect() > herm_tol * scale)
    fail(errc::not_hermitian, "matrix is not Hermitian within tolerance");

  Mat<N> A = m;
  // Symmetrize to kill representation noise; the defect is below herm_tol.
  for (int i = 0; i < N; ++i) {
    A(i, i) = cplx(A(i, i).real(), 0.0);
    for (int j = i + 1; j < N; ++j) {
      cplx v = 0.5 * (A(i, j) + std::conj(A(j, i)));
      A(i, j) = v;
      A(j, i) = std::conj(v);
    }
  }
  Mat<N> V = Mat<N>::identity();

  auto offnorm = [&]() {
    double s = 0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        if (i != j) s += std::norm(A(i, j));
    return std::sqrt(s);
  };

  const double stop = 1e-15 * std::max(1.0, A.fro_norm()) * N;
  for (int sweep = 0; sweep < 60 && offnorm() > stop; ++sweep) {
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        double r = std::abs(A(p, q));
        if (r < 1e-300) continue;
        cplx u = A(p, q) / r;  // phase of the pivot
        double app = A(p, p).real();
        double aqq = A(q, q).real();
        double tau = (aqq - app) / (2.0 * r);
        double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        cplx su = s * u;
        cplx suc = std::conj(su);
        // Columns: col_p <- c col_p - conj(su) col_q ; col_q <- su col_p + c col_q
        for (int i = 0; i < N; ++i) {
          cplx aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - suc * aiq;
          A(i, q) = su * aip + c * aiq;
          cplx vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - suc * viq;
          V(i, q) = su * vip + c * viq;
        }
        // Rows (left multiplication by the adjoint rotation).
        for (int j = 0; j < N; ++j) {
          cplx apj = A(p, j), aqj = A(q, j);
          A(p, j) = c * apj - su * aqj;
          A(q, j) = suc * apj + c * aqj;
        }
        A(p, q) = std::conj(A(q, p));  // keep the pair exactly Hermitian
      }
    }
  }

  EigenSys<N> out;
  std::array<int, N> idx;
  for (int i = 0; i < N; ++i) idx[i] = i;
  std::array<double, N> d;
  for (int i = 0; i < N; ++i) d[i] = A(i, i).real();
  std::sort(idx.begin(), idx.end(), [&](int x, int y) { return d[x] < d[y]; });
  for (int j = 0; j < N; ++j) {
    out.val[j] = d[idx[j]];
    for (int i = 0; i < N; ++i) out.vec(i, j) = V(i, idx[j]);
  }
  return out;
}

template <int N>
inline double min_eigenvalue(const Mat<N>& m) {
  return herm_eigen(m).val[0];
}

// ------------------------------------------------------ spectral functions ----

// PSD square root. Eigenvalues in [-1e-10, 0) are rounding debris and are
// clamped to zero; anything more negative is a real violation.
template <int N>
inline Mat<N> mat_sqrt_psd(const Mat<N>& m) {
  EigenSys<N> es = herm_eigen(m);
  Mat<N> out;
  for (int k = 0; k < N; ++k) {
    double v = es.val[k];
    if (v < -1e-10) fail(errc::negative_eigenvalue, "matrix is not PSD");
    if (v < 0) v = 0;
    double r = std::sqrt(v);
    if (r == 0) continue;
    Ket<N> e = es.vector(k);
    Mat<N> p = projector(e);
    out = out + cplx(r) * p;
  }
  return out;
}

// Logarithm on the support only. Eigenvalues at or below rank_tol * max are
// treated as kernel and skipped; the caller owns support bookkeeping.
template <int N>
inline Mat<N> mat_log_psd(const Mat<N>& m, double rank_tol = kRankTol) {
  EigenSys<N> es = herm_eigen(m);
  double top = es.val[N - 1];
  if (top <= 0) fail(errc::negative_eigenvalue, "log of a non-positive matrix");
  double thr = rank_tol * top;
  Mat<N> out;
  for (int k = 0; k < N; ++k) {
    if (es.val[k] <= thr) continue;
    out = out + cplx(std::log(es.val[k])) * projector(es.vector(k));
  }
  return out;
}

// Moore-Penrose inverse via the spectral decomposition; eigenvalues with
// |v| <= rank_tol * max|v| count as zero. Returns the inverse and the rank.
template <int N>
inline std::pair<Mat<N>, int> pinv_on_range(const Mat<N>& m, double rank_tol = kRankTol) {
  EigenSys<N> es = herm_eigen(m);
  double top = 0;
  for (double v : es.val) top = std::max(top, std::abs(v));
  double thr = rank_tol * top;
  Mat<N> out;
  int rank = 0;
  for (int k = 0; k < N; ++k) {
    if (std::abs(es.val[k]) <= thr) continue;
    ++rank;
    out = out + cplx(1.0 / es.val[k]) * projector(es.vector(k));
  }
  return {out, rank};
}

}  // namespace bsalab
