#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "bsalab/bdstate.hpp"
#include "bsalab/lsd.hpp"
#include "bsalab/rng.hpp"

using namespace bsalab;

namespace {

// uniform over the singlet sub-tetrahedron: p = q/2 + (0,0,0,1/2)
BDState sample_singlet(SplitMix64& rng) {
  double u[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
  std::sort(u, u + 3);
  PVec q{u[0], u[1] - u[0], u[2] - u[1], 1 - u[2]};
  return BDState::from_p({q[0] / 2, q[1] / 2, q[2] / 2, 0.5 + q[3] / 2});
}

double ensemble_weight(const LSDecomposition& d) {
  double w = 0;
  for (const auto& e : d.ensemble) w += e.weight;
  return w;
}

Mat4 ensemble_matrix(const LSDecomposition& d) {
  Mat4 m = Mat4::zero();
  for (const auto& e : d.ensemble) m = m + cplx(e.weight) * projector(e.ket());
  return m;
}

}  // namespace

TEST_CASE("face projection is the exact affine ray", "[lsd]") {
  TVec t{-0.6, -0.6, -0.6};
  TVec f = project_to_face(t);
  for (int k = 0; k < 3; ++k) CHECK(f[k] == Catch::Approx(-1.0 / 3).margin(1e-15));
  CHECK(on_singlet_face(f));
  // separable points have no projection
  CHECK_THROWS_AS(project_to_face(TVec{0, 0, 0}), error);

  SplitMix64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = sample_singlet(rng);
    if (is_separable(s)) continue;
    TVec fp = project_to_face(s.t);
    CHECK(std::abs(1 + fp[0] + fp[1] + fp[2]) < 1e-12);
    // the projected point is the face intersection of the vertex ray
    double lam = (3 + s.t[0] + s.t[1] + s.t[2]) / 2;
    for (int k = 0; k < 3; ++k) {
      double ray = -1 + (s.t[k] + 1) / lam;
      CHECK(fp[k] == Catch::Approx(ray).margin(1e-12));
    }
  }
}

TEST_CASE("worked decomposition pins every closed-form piece", "[lsd]") {
  auto s = BDState::from_p({0.1, 0.1, 0.1, 0.7});
  auto d = bsa_bd(s);

  CHECK(d.lambda == Catch::Approx(0.6).margin(1e-15));
  REQUIRE(d.tetra);
  CHECK(*d.tetra == 4);
  CHECK(d.canonical_pauli == 0);

  const PVec expect_p{1.0 / 6, 1.0 / 6, 1.0 / 6, 0.5};
  for (int i = 0; i < 4; ++i) CHECK(d.rho_s.p[i] == Catch::Approx(expect_p[i]).margin(1e-14));

  // pure part is the singlet
  CHECK(std::abs(inner(bell_ket(4), d.pure_part)) == Catch::Approx(1.0).margin(1e-15));

  // six product kets, one pair per axis, each pair carrying 0.2
  REQUIRE(d.ensemble.size() == 6);
  double per_axis[3] = {0, 0, 0};
  for (std::size_t i = 0; i < 6; ++i) per_axis[i / 2] += d.ensemble[i].weight;
  for (double w : per_axis) CHECK(w == Catch::Approx(0.2).margin(1e-15));
  CHECK(ensemble_weight(d) == Catch::Approx(d.lambda).margin(1e-14));

  Mat4 rho = to_density_matrix(s);
  CHECK((reconstruct(d) - rho).fro_norm() < 1e-14);
  // ensemble alone averages to lambda * rho_s
  Mat4 sep = cplx(d.lambda) * to_density_matrix(d.rho_s);
  CHECK((ensemble_matrix(d) - sep).fro_norm() < 1e-14);
}

TEST_CASE("decomposition of random singlet-tetra states", "[lsd]") {
  SplitMix64 rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = sample_singlet(rng);
    auto d = bsa_bd(s);
    Mat4 rho = to_density_matrix(s);
    CHECK((reconstruct(d) - rho).fro_norm() < 1e-13);
    if (is_separable(s)) {
      CHECK(d.lambda == 1.0);
      continue;
    }
    double pmax = *std::max_element(s.p.begin(), s.p.end());
    CHECK(d.lambda == Catch::Approx(2 * (1 - pmax)).margin(1e-13));
    CHECK(on_singlet_face(d.rho_s.t, 1e-10));
    CHECK(d.rho_s.p[3] == Catch::Approx(0.5).margin(1e-13));
    CHECK(ensemble_weight(d) == Catch::Approx(d.lambda).margin(1e-12));
  }
}

TEST_CASE("states from other sub-tetrahedra map through their frame", "[lsd]") {
  SplitMix64 rng(81);
  for (int frame = 0; frame <= 3; ++frame) {
    for (int trial = 0; trial < 30; ++trial) {
      auto s0 = sample_singlet(rng);
      if (is_separable(s0)) continue;
      auto s = apply_pauli_frame(s0, frame);
      auto d = bsa_bd(s);
      Mat4 rho = to_density_matrix(s);
      CHECK((reconstruct(d) - rho).fro_norm() < 1e-13);
      double pmax = *std::max_element(s.p.begin(), s.p.end());
      CHECK(d.lambda == Catch::Approx(2 * (1 - pmax)).margin(1e-13));
      // pure part is the dominant bell ket of the original frame
      REQUIRE(d.tetra);
      CHECK(std::abs(inner(bell_ket(*d.tetra), d.pure_part)) ==
            Catch::Approx(1.0).margin(1e-13));
      // ensemble kets are still product kets: weight sums match
      CHECK(ensemble_weight(d) == Catch::Approx(d.lambda).margin(1e-12));
      Mat4 sep = cplx(d.lambda) * to_density_matrix(d.rho_s);
      CHECK((ensemble_matrix(d) - sep).fro_norm() < 1e-12);
    }
  }
}

TEST_CASE("separable states decompose with lambda one and minimal support", "[lsd]") {
  auto s = BDState::from_t({0.3, 0, 0.4});
  auto d = bsa_bd(s);
  CHECK(d.lambda == 1.0);
  CHECK(d.ensemble.size() <= 8);
  Mat4 rho = to_density_matrix(s);
  CHECK((ensemble_matrix(d) - rho).fro_norm() < 1e-14);

  // octahedron surface reduces to three anticorrelated pairs
  auto sf = BDState::from_t({-0.2, -0.3, -0.5});
  auto df = bsa_bd(sf);
  CHECK(df.ensemble.size() == 6);
  CHECK((ensemble_matrix(df) - to_density_matrix(sf)).fro_norm() < 1e-14);

  // maximally mixed: z pairs only
  auto dm = bsa_bd(BDState::from_t({0, 0, 0}));
  CHECK(dm.ensemble.size() == 4);
  CHECK((ensemble_matrix(dm) - to_density_matrix(BDState::from_t({0, 0, 0}))).fro_norm() <
        1e-14);
}

TEST_CASE("bell vertex falls back to the face centroid", "[lsd]") {
  auto s = BDState::from_p({0, 0, 0, 1});
  auto d = bsa_bd(s);
  CHECK(d.lambda == Catch::Approx(0.0).margin(1e-15));
  for (int k = 0; k < 3; ++k)
    CHECK(d.rho_s.t[k] == Catch::Approx(-1.0 / 3).margin(1e-14));
  CHECK((reconstruct(d) - projector(bell_ket(4))).fro_norm() < 1e-14);
}
