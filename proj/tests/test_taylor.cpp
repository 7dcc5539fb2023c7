#include <doctest.h>

#include "screwkin/taylor.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace screwkin;
using namespace testutil;

TEST_SUITE("taylor") {

TEST_CASE("screw differentials are line derivatives of the instantaneous screws") {
  Rng rng(401);
  const Chain c = random_chain(rng, 5);
  const VecX q = rng.vec(5, 0.8);
  const VecX x = rng.vec(5, 1.0);
  for (int i : {2, 4, 5}) {
    for (int k = 1; k <= 3; ++k) {
      const ScrewVec ref = fd_derivative(
          [&](double t) {
            return ScrewVec(joint_screws_spatial(c, q + t * x)[static_cast<size_t>(i) - 1]);
          },
          k, 1e-2);
      CHECK((screw_differential(c, q, i, k, x) - ref).norm() <
            1e-5 * std::max(1.0, ref.norm()));
    }
  }
  const auto table = detail::screw_differential_table(c, q, 3, x);
  for (int i = 1; i <= 5; ++i) {
    for (int k = 0; k <= 3; ++k) {
      CHECK((table[static_cast<size_t>(i) - 1][static_cast<size_t>(k)] -
             screw_differential(c, q, i, k, x))
                .norm() < 1e-13);
    }
  }
}

TEST_CASE("kinematic map differentials match line finite differences through order 4") {
  Rng rng(402);
  for (int rep = 0; rep < 3; ++rep) {
    const Chain c = random_chain(rng, 5);
    const VecX q = rng.vec(5, 0.7);
    const VecX x = rng.vec(5, 1.0);
    const KinematicMapDifferentials d = km_differentials(c, q, 4, x);

    CHECK((d.f0 - kinematic_map(c, q, 5).matrix()).norm() < 1e-14);
    for (int k = 1; k <= 4; ++k) {
      const Mat4 ref = fd_derivative(
          [&](double t) { return kinematic_map(c, q + t * x, 5).matrix(); }, k, 1e-2);
      CHECK((d.df[static_cast<size_t>(k) - 1] - ref).norm() <
            2e-5 * std::max(1.0, ref.norm()));
      const Mat4 refinv = fd_derivative(
          [&](double t) { return Mat4(kinematic_map(c, q + t * x, 5).inverse().matrix()); },
          k, 1e-2);
      CHECK((d.dfinv[static_cast<size_t>(k) - 1] - refinv).norm() <
            2e-5 * std::max(1.0, refinv.norm()));
    }
  }
}

TEST_CASE("logarithmic coefficients compose into the map differentials") {
  // Word expansions of d^k f in the h operators. The fourth order needs the
  // word h1 h1 h2 with weight 1; dropping it breaks the identity, which is
  // why that variant is rejected (see the repository discrepancy notes).
  Rng rng(403);
  const Chain c = random_chain(rng, 6);
  const VecX q = rng.vec(6, 0.8);
  const VecX x = rng.vec(6, 1.0);
  const KinematicMapDifferentials d = km_differentials(c, q, 4, x);
  const Mat4& F = d.f0;
  const auto& h = d.h;
  auto w = [&](std::initializer_list<int> word) {
    Mat4 m = Mat4::Identity();
    for (int i : word) m = (m * h[static_cast<size_t>(i) - 1]).eval();
    return m;
  };

  CHECK((d.df[0] - w({1}) * F).norm() < 1e-12);
  CHECK((d.df[1] - (w({2}) + w({1, 1})) * F).norm() < 1e-11);
  CHECK((d.df[2] - (w({3}) + w({1, 2}) + 2.0 * w({2, 1}) + w({1, 1, 1})) * F).norm() <
        1e-10);

  const Mat4 d4 = (w({4}) + w({1, 3}) + 3.0 * w({3, 1}) + 3.0 * w({2, 2}) +
                   3.0 * w({2, 1, 1}) + 2.0 * w({1, 2, 1}) + w({1, 1, 2}) +
                   w({1, 1, 1, 1})) *
                  F;
  CHECK((d.df[3] - d4).norm() < 1e-10);
  // Without the h1 h1 h2 word the expansion is wrong by a visible margin.
  CHECK((d.df[3] - (d4 - w({1, 1, 2}) * F)).norm() > 1e-3);
}

TEST_CASE("taylor evaluation converges at fifth order and projection is rigid") {
  Rng rng(404);
  const Chain c = random_chain(rng, 5);
  const VecX q = rng.vec(5, 0.7);
  const VecX x = rng.vec(5, 1.0);

  double prev = -1.0;
  for (double s : {0.2, 0.1, 0.05}) {
    const Mat4 exact = kinematic_map(c, q + s * x, 5).matrix();
    const double errn = (km_taylor_eval(c, q, 4, s * x) - exact).norm();
    if (prev > 0.0) {
      const double rate = std::log2(prev / errn);
      CHECK(rate > 4.5);
    }
    prev = errn;
  }

  const Mat4 approx = km_taylor_eval(c, q, 2, 0.3 * x);
  const Pose P = project_to_rigid(approx);
  CHECK(orthonormality_defect(P.R) < 1e-12);
  CHECK(P.R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((P.matrix() - approx).norm() < 0.1);

  const Pose rigid = kinematic_map(c, q, 5);
  CHECK((project_to_rigid(rigid.matrix()).matrix() - rigid.matrix()).norm() < 1e-13);
}

TEST_CASE("c-space polynomials vanish exactly on the finite-motion modes") {
  // Closed 4C chain at its reference configuration.
  const Chain c = linkage_4c_chain();
  const VecX q0 = VecX::Zero(8);
  const PolySystem ps = cspace_poly_system(c, q0, 2);
  CHECK(ps.nvars == 8);
  CHECK(!ps.polys.empty());

  auto mode = [](double a, double b, int which) {
    VecX x = VecX::Zero(8);
    if (which == 0) {
      x[2] = a; x[3] = b; x[6] = -a; x[7] = -b;
    } else if (which == 1) {
      x[1] = a; x[3] = b; x[5] = -a; x[7] = -b;
    } else {
      x[0] = a; x[1] = b; x[4] = -a; x[5] = -b;
    }
    return x;
  };

  Rng rng(405);
  for (int which = 0; which < 3; ++which) {
    for (int rep = 0; rep < 4; ++rep) {
      const VecX x = mode(rng.uniform(-1, 1), rng.uniform(-1, 1), which);
      for (size_t p = 0; p < ps.polys.size(); ++p) {
        CHECK(std::abs(ps.eval(static_cast<int>(p), x)) < 1e-10);
      }
    }
  }

  // A generic first-order tangent that is not a finite motion violates at
  // least one quadratic equation.
  VecX bad = VecX::Zero(8);
  bad[0] = 1; bad[2] = 1; bad[4] = -1; bad[6] = -1;
  double worst = 0.0;
  for (size_t p = 0; p < ps.polys.size(); ++p) {
    worst = std::max(worst, std::abs(ps.eval(static_cast<int>(p), bad)));
  }
  CHECK(worst > 0.1);

  // Serialization mentions every variable index at most once per term and
  // parses back numerically: spot-check a value via the text round trip.
  CHECK(ps.to_text().find("x3") != std::string::npos);
}

TEST_CASE("taylor evaluation validates its order range") {
  Rng rng(406);
  const Chain c = random_chain(rng, 3);
  const VecX q = rng.vec(3, 0.5);
  const VecX x = rng.vec(3, 1.0);
  CHECK_THROWS_AS(km_differentials(c, q, 0, x), std::invalid_argument);
  CHECK_THROWS_AS(km_differentials(c, q, kMaxDerivativeOrder + 1, x), std::invalid_argument);
  CHECK_THROWS_AS(km_differentials(c, rng.vec(2, 1.0), 2, x), std::invalid_argument);
}

}  // TEST_SUITE
