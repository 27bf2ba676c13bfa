#pragma once

// Independent numerical cross-checks for the closed forms. bsa_numeric knows
// nothing about Bell geometry: it maximizes the separable weight over all
// pure parts psi by bisecting a PSD+PPT feasibility predicate along the ray
// sigma(lambda) = (rho - (1-lambda)|psi><psi|)/lambda and climbing psi with
// seeded random-restart coordinate descent; pure parts with an empty feasible
// interval score by their violation margin instead, so the climb has a slope
// toward the feasible cone from anywhere. rel_entropy_min_numeric minimizes
// the relative entropy over the whole separable octahedron by grid search
// plus Nelder-Mead and a pattern-search polish.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bsalab/bdstate.hpp"
#include "bsalab/errors.hpp"
#include "bsalab/matcore.hpp"
#include "bsalab/measures.hpp"
#include "bsalab/optimality.hpp"
#include "bsalab/rng.hpp"

namespace bsalab {

struct BsaConfig {
  std::uint64_t seed = 0x5eedULL;
  int restarts = 32;
  int bisect_iters = 40;
  double feas_tol = 1e-9;   // PSD / PPT slack
  double step_init = 0.3;   // coordinate-descent schedule
  double step_min = 1e-6;
  double step_shrink = 0.5;
  int max_rounds = 400;
};

struct OracleResult {
  double lambda = 0;
  Ket4 psi;
  std::vector<double> objective_history;  // best-so-far after each restart
  int best_restart = -1;
  long evals = 0;
  bool converged = false;
};

namespace detail {

// The pure part lives on 8 reals; global phase and norm are quotiented out by
// canonicalizing: unit norm, first significant component real positive.
inline Ket4 params_to_ket(std::array<double, 8>& x) {
  Ket4 v;
  for (int i = 0; i < 4; ++i) v.a[i] = cplx(x[2 * i], x[2 * i + 1]);
  double n = v.norm();
  if (n < 1e-12) {
    x = {1, 0, 0, 0, 0, 0, 0, 0};
    v.a = {1.0, 0.0, 0.0, 0.0};
    return v;
  }
  cplx phase(1, 0);
  for (int i = 0; i < 4; ++i) {
    if (std::abs(v.a[i]) > 1e-8 * n) {
      phase = std::conj(v.a[i]) / std::abs(v.a[i]);
      break;
    }
  }
  for (int i = 0; i < 4; ++i) {
    v.a[i] = v.a[i] * phase / n;
    x[2 * i] = v.a[i].real();
    x[2 * i + 1] = v.a[i].imag();
  }
  return v;
}

struct FeasProblem {
  const Mat4& rho;
  Mat4 pt_rho;
  Mat4 pinv;
  double feas_tol;
  long evals = 0;

  double margin(const Mat4& proj, const Mat4& pt_proj, double lambda) {
    ++evals;
    Mat4 m = rho - cplx(1 - lambda) * proj;
    Mat4 w = pt_rho - cplx(1 - lambda) * pt_proj;
    return std::min(min_eigenvalue(m), min_eigenvalue(w));
  }

  bool feasible(const Mat4& proj, const Mat4& pt_proj, double lambda) {
    return margin(proj, pt_proj, lambda) >= -feas_tol;
  }

  // Least PSD+PPT violation over a lambda sweep; <= feas_tol-ish iff some
  // lambda is (nearly) feasible. Used as a climbing surrogate off the cone.
  double best_margin(const Ket4& psi) {
    Mat4 proj = projector(psi);
    Mat4 pt_proj = partial_transpose_b(proj);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 20; ++j) best = std::max(best, margin(proj, pt_proj, (2 * j + 1) / 40.0));
    return best;
  }

  // Max feasible lambda for this pure part; -1 when nothing is feasible.
  // The feasible set along the ray is an interval, so one feasible seed plus
  // an infeasible top bracket makes the bisection exact.
  double top_lambda(const Ket4& psi, double& warm, int bisect_iters) {
    Mat4 proj = projector(psi);
    Mat4 pt_proj = partial_transpose_b(proj);
    if (feasible(proj, pt_proj, 1.0)) return 1.0;

    double lo = -1;
    if (warm >= 0 && warm < 1 && feasible(proj, pt_proj, warm)) lo = warm;
    if (lo < 0) {
      if (bsalab::detail::out_of_range_norm(rho, pinv, psi) > kRangeTol) return -1;
      double d = expval(psi, pinv, psi).real();
      double lpsd = std::max(0.0, 1.0 - 1.0 / d);
      if (feasible(proj, pt_proj, lpsd)) {
        lo = lpsd;
      } else {
        for (int j = 1; j <= 48 && lo < 0; ++j) {
          double lam = lpsd + (1 - lpsd) * j / 48.0;
          if (lam < 1 && feasible(proj, pt_proj, lam)) lo = lam;
        }
        for (int j = 1; j <= 30 && lo < 0; ++j) {
          double lam = lpsd + (1 - lpsd) * std::pow(0.5, j);
          if (feasible(proj, pt_proj, lam)) lo = lam;
        }
      }
      if (lo < 0) return -1;
    }
    double hi = 1.0;
    for (int it = 0; it < bisect_iters; ++it) {
      double mid = 0.5 * (lo + hi);
      if (feasible(proj, pt_proj, mid)) lo = mid;
      else hi = mid;
    }
    warm = lo;
    return lo;
  }
};

// Seed pure part from the partial-transpose witness: if w is the most
// negative eigenvector of PT(rho), the most negative eigenvector v of
// PT(|w><w|) satisfies <w|PT(|v><v|)|w> < 0, which is exactly the overlap a
// pure part must supply before any lambda < 1 can be feasible. Random starts
// almost surely miss that cone and score -1 with no gradient to climb.
inline Ket4 witness_seed(const Mat4& pt_rho) {
  auto es = herm_eigen(pt_rho);
  Ket4 w = es.vector(0);
  auto inner_es = herm_eigen(partial_transpose_b(projector(w)));
  return inner_es.vector(0);
}

}  // namespace detail

inline OracleResult bsa_numeric(const Mat4& rho, const BsaConfig& cfg = {}) {
  require_density(rho);
  detail::FeasProblem prob{rho, partial_transpose_b(rho), pinv_on_range(rho).first,
                           cfg.feas_tol};
  Ket4 seed = detail::witness_seed(prob.pt_rho);
  constexpr std::array<double, 8> kNoise{0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};

  OracleResult best;
  best.lambda = -1;

  for (int r = 0; r < cfg.restarts; ++r) {
    SplitMix64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1));
    double eta = kNoise[static_cast<std::size_t>(r) % kNoise.size()];
    std::array<double, 8> x;
    for (int i = 0; i < 4; ++i) {
      x[2 * i] = seed.a[i].real() + eta * rng.uniform(-1, 1);
      x[2 * i + 1] = seed.a[i].imag() + eta * rng.uniform(-1, 1);
    }
    Ket4 psi = detail::params_to_ket(x);
    double warm = -1;
    // Infeasible pure parts score -2 + violation margin: always below any
    // feasible lambda, monotone toward the cone.
    auto score_of = [&](const Ket4& k) {
      double v = prob.top_lambda(k, warm, cfg.bisect_iters);
      return v >= 0 ? v : -2.0 + prob.best_margin(k);
    };
    double score = score_of(psi);
    bool settled = false;

    double step = cfg.step_init;
    for (int round = 0; round < cfg.max_rounds; ++round) {
      bool improved = false;
      for (int k = 0; k < 8; ++k) {
        for (double dir : {+1.0, -1.0}) {
          std::array<double, 8> y = x;
          y[k] += dir * step;
          Ket4 cand = detail::params_to_ket(y);
          double s = score_of(cand);
          if (s > score + 1e-14) {
            x = y;
            psi = cand;
            score = s;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        step *= cfg.step_shrink;
        if (step < cfg.step_min) {
          settled = true;
          break;
        }
      }
    }

    if (score > best.lambda) {
      best.lambda = score;
      best.psi = psi;
      best.best_restart = r;
      best.converged = settled;
    }
    best.objective_history.push_back(best.lambda);
  }

  best.evals = prob.evals;
  if (best.lambda < 0) fail(errc::non_convergence, "no feasible decomposition found");
  return best;
}

// ------------------------------------------------ relative entropy oracle ----

struct EntropyMinResult {
  BDState argmin;
  double value = 0;
  long evals = 0;
  bool converged = true;
};

namespace detail {

inline double rel_entropy_objective(const PVec& p, const TVec& t, long& evals) {
  ++evals;
  if (std::abs(t[0]) + std::abs(t[1]) + std::abs(t[2]) > 1 + 1e-12)
    return std::numeric_limits<double>::infinity();
  auto m = t1_margins(t);
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    if (p[i] <= 0) continue;
    double q = m[i] / 4;
    if (q < 1e-300) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log(p[i] / q);
  }
  return s;
}

}  // namespace detail

inline EntropyMinResult rel_entropy_min_numeric(const BDState& s, int grid_n = 24) {
  EntropyMinResult out{s, 0, 0, true};
  if (is_separable(s)) return out;
  if (grid_n < 2) fail(errc::invalid_input, "grid resolution must be at least 2");

  const PVec& p = s.p;
  auto f = [&](const TVec& t) { return detail::rel_entropy_objective(p, t, out.evals); };

  TVec best{0, 0, 0};
  double fbest = f(best);
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j)
      for (int k = 0; k < grid_n; ++k) {
        TVec t{-1 + (2.0 * i + 1) / grid_n, -1 + (2.0 * j + 1) / grid_n,
               -1 + (2.0 * k + 1) / grid_n};
        double v = f(t);
        if (v < fbest) {
          fbest = v;
          best = t;
        }
      }

  // Nelder-Mead on t with an infinite wall outside the octahedron.
  std::array<TVec, 4> sx;
  std::array<double, 4> sf;
  sx[0] = best;
  sf[0] = fbest;
  double h = 1.0 / grid_n;
  for (int k = 0; k < 3; ++k) {
    TVec t = best;
    t[k] += h;
    if (!std::isfinite(f(t))) t[k] -= 2 * h;
    sx[k + 1] = t;
    sf[k + 1] = f(t);
  }
  auto order = [&]() {
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (sf[b] < sf[a]) {
          std::swap(sf[a], sf[b]);
          std::swap(sx[a], sx[b]);
        }
  };
  for (int it = 0; it < 600; ++it) {
    order();
    double spread = std::abs(sf[3] - sf[0]);
    if (spread < 1e-16 && it > 50) break;
    TVec c{0, 0, 0};
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < 3; ++k) c[k] += sx[a][k] / 3;
    auto blend = [&](double w) {
      TVec t;
      for (int k = 0; k < 3; ++k) t[k] = c[k] + w * (c[k] - sx[3][k]);
      return t;
    };
    TVec xr = blend(1.0);
    double fr = f(xr);
    if (fr < sf[0]) {
      TVec xe = blend(2.0);
      double fe = f(xe);
      if (fe < fr) { sx[3] = xe; sf[3] = fe; }
      else { sx[3] = xr; sf[3] = fr; }
    } else if (fr < sf[2]) {
      sx[3] = xr;
      sf[3] = fr;
    } else {
      TVec xc = blend(-0.5);
      double fc = f(xc);
      if (fc < sf[3]) { sx[3] = xc; sf[3] = fc; }
      else {
        for (int a = 1; a < 4; ++a) {
          for (int k = 0; k < 3; ++k) sx[a][k] = sx[0][k] + 0.5 * (sx[a][k] - sx[0][k]);
          sf[a] = f(sx[a]);
        }
      }
    }
  }
  order();
  best = sx[0];
  fbest = sf[0];

  // Pattern-search polish; diagonal moves track the octahedron face.
  std::vector<TVec> dirs;
  for (int k = 0; k < 3; ++k)
    for (double d : {+1.0, -1.0}) {
      TVec t{0, 0, 0};
      t[k] = d;
      dirs.push_back(t);
    }
  for (int k1 = 0; k1 < 3; ++k1)
    for (int k2 = k1 + 1; k2 < 3; ++k2)
      for (double d1 : {+1.0, -1.0})
        for (double d2 : {+1.0, -1.0}) {
          TVec t{0, 0, 0};
          t[k1] = d1 / std::sqrt(2.0);
          t[k2] = d2 / std::sqrt(2.0);
          dirs.push_back(t);
        }
  double step = 1e-2;
  while (step > 1e-9) {
    bool improved = false;
    for (const auto& d : dirs) {
      TVec t{best[0] + step * d[0], best[1] + step * d[1], best[2] + step * d[2]};
      double v = f(t);
      if (v < fbest - 1e-16) {
        best = t;
        fbest = v;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }

  out.argmin = BDState::from_t(best);
  out.value = fbest;
  return out;
}

}  // namespace bsalab
