#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "bsalab/bdstate.hpp"
#include "bsalab/rng.hpp"

using namespace bsalab;

namespace {

PVec random_prob(SplitMix64& rng) {
  double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
  std::sort(u, u + 3);
  return {u[0], u[1] - u[0], u[2] - u[1], 1 - u[2]};
}

}  // namespace

TEST_CASE("probability and correlation coordinates invert each other", "[bdstate]") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    PVec p = random_prob(rng);
    TVec t = t_from_p(p);
    PVec back = p_from_t(t);
    for (int i = 0; i < 4; ++i) CHECK(back[i] == Catch::Approx(p[i]).margin(1e-14));
    auto m = t1_margins(t);
    for (int i = 0; i < 4; ++i) CHECK(m[i] == Catch::Approx(4 * p[i]).margin(1e-14));
  }
}

TEST_CASE("bell vertices sit at the documented corners", "[bdstate]") {
  const TVec expect[4] = {{1, -1, 1}, {-1, 1, 1}, {1, 1, -1}, {-1, -1, -1}};
  for (int i = 0; i < 4; ++i) {
    PVec p{0, 0, 0, 0};
    p[i] = 1;
    TVec t = t_from_p(p);
    for (int k = 0; k < 3; ++k) CHECK(t[k] == Catch::Approx(expect[i][k]).margin(1e-15));
  }
}

TEST_CASE("state construction validates its input", "[bdstate]") {
  CHECK_THROWS_AS(BDState::from_p({0.5, 0.5, 0.5, -0.5}), error);
  CHECK_THROWS_AS(BDState::from_p({0.5, 0.5, 0.5, 0.5}), error);
  CHECK_THROWS_AS(BDState::from_t({0.9, 0.9, 0.9}), error);
  try {
    BDState::from_t({0.9, 0.9, 0.9});
  } catch (const error& e) {
    CHECK(e.code() == errc::unphysical_correlation);
    CHECK(std::string(e.what()).find("inequality") != std::string::npos);
  }
  // boundary of the tetrahedron is fine
  CHECK_NOTHROW(BDState::from_t({1, -1, 1}));
  CHECK_NOTHROW(BDState::from_p({0.25, 0.25, 0.25, 0.25}));
}

TEST_CASE("separability is octahedron membership", "[bdstate]") {
  CHECK(is_separable(BDState::from_t({0, 0, 0})));
  CHECK(is_separable(BDState::from_t({0.3, -0.3, 0.4})));
  CHECK(is_separable(BDState::from_t({0.5, -0.25, -0.25})));  // on the surface
  CHECK_FALSE(is_separable(BDState::from_t({-0.8, -0.8, -0.8})));

  auto s = BDState::from_p({0.1, 0.1, 0.1, 0.7});
  CHECK_FALSE(is_separable(s));
  REQUIRE(tetra_id(s));
  CHECK(*tetra_id(s) == 4);
  CHECK_FALSE(tetra_id(BDState::from_t({0, 0, 0})).has_value());

  auto s2 = BDState::from_p({0.7, 0.1, 0.1, 0.1});
  REQUIRE(tetra_id(s2));
  CHECK(*tetra_id(s2) == 1);
}

TEST_CASE("density matrix round trip", "[bdstate]") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = BDState::from_p(random_prob(rng));
    Mat4 rho = to_density_matrix(s);
    CHECK(std::abs(rho.trace() - cplx(1)) < 1e-14);
    CHECK(rho.herm_defect() < 1e-14);
    auto back = bd_from_density(rho);
    for (int i = 0; i < 4; ++i) CHECK(back.p[i] == Catch::Approx(s.p[i]).margin(1e-12));
  }
  // |00><00| has single-qubit terms, so it is not Bell diagonal
  Ket4 e00{{cplx(1), cplx(0), cplx(0), cplx(0)}};
  CHECK_THROWS_AS(bd_from_density(projector(e00)), error);
  // not a density matrix at all
  CHECK_THROWS_AS(bd_from_density(cplx(2) * Mat4::identity()), error);
}

TEST_CASE("pauli frames permute bell labels consistently", "[bdstate]") {
  SplitMix64 rng(41);
  for (int idx = 0; idx <= 3; ++idx) {
    auto perm = bell_perm(idx);
    // matrix-level check: (sigma_k x I) rho (sigma_k x I) re-labels the kets
    auto s = BDState::from_p(random_prob(rng));
    Mat4 u = tensor(pauli(idx), Mat2::identity());
    Mat4 lhs = u * to_density_matrix(s) * u.adjoint();
    Mat4 rhs = to_density_matrix(apply_pauli_frame(s, idx));
    CHECK((lhs - rhs).fro_norm() < 1e-14);
    for (int lbl = 0; lbl < 4; ++lbl) {
      Ket4 mapped = apply_pauli_a(bell_ket(lbl + 1), idx);
      // mapped must equal bell_ket(perm[lbl]+1) up to phase
      double overlap = std::abs(inner(bell_ket(perm[lbl] + 1), mapped));
      CHECK(overlap == Catch::Approx(1.0).margin(1e-14));
    }
  }
}

TEST_CASE("canonicalization sends the dominant weight to the singlet", "[bdstate]") {
  SplitMix64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    PVec p = random_prob(rng);
    auto s = BDState::from_p(p);
    auto c = canonicalize(s);
    if (is_separable(s)) {
      CHECK(c.pauli == 0);
      continue;
    }
    double pmax = *std::max_element(p.begin(), p.end());
    CHECK(c.state.p[3] == Catch::Approx(pmax).margin(1e-13));
    // involutive: the same pauli maps back
    auto back = apply_pauli_frame(c.state, c.pauli);
    for (int i = 0; i < 4; ++i) CHECK(back.p[i] == Catch::Approx(p[i]).margin(1e-13));
  }
}
