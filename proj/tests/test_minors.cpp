#include <doctest.h>

#include "screwkin/minors.hpp"

#include "oracles.hpp"

using namespace screwkin;
using namespace testutil;

TEST_SUITE("minors") {

TEST_CASE("det_small agrees with cofactor expansion") {
  Rng rng(501);
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      MatX m(n, n);
      for (int r = 0; r < n; ++r)
        for (int cc = 0; cc < n; ++cc) m(r, cc) = rng.uniform(-2, 2);
      CHECK(det_small(m) == doctest::Approx(det_cofactor(m)).epsilon(1e-11));
    }
  }
}

TEST_CASE("minor index enumeration and validation") {
  CHECK(MinorIndex::all(4, 2).size() == 15u * 6u);
  CHECK(MinorIndex::all(8, 6).size() == 1u * 28u);
  for (const MinorIndex& idx : MinorIndex::all(5, 3)) {
    CHECK(idx.order() == 3);
    CHECK(std::is_sorted(idx.rows.begin(), idx.rows.end()));
    CHECK(std::is_sorted(idx.cols.begin(), idx.cols.end()));
  }
  CHECK_THROWS_AS((MinorIndex{{2, 1}, {1, 2}}.validate(4)), std::invalid_argument);
  CHECK_THROWS_AS((MinorIndex{{1, 7}, {1, 2}}.validate(4)), std::invalid_argument);
  CHECK_THROWS_AS((MinorIndex{{1, 2}, {1, 5}}.validate(4)), std::invalid_argument);
  CHECK_THROWS_AS((MinorIndex{{1, 2, 3}, {1, 2}}.validate(4)), std::invalid_argument);
}

TEST_CASE("minor value selects from the spatial Jacobian") {
  Rng rng(502);
  const Chain c = random_chain(rng, 5);
  const VecX q = rng.vec(5, 0.9);
  const MatX J = jacobian_spatial(c, q, 5);
  for (const MinorIndex& idx : {MinorIndex{{1, 3, 5}, {1, 2, 4}},
                                MinorIndex{{2, 4}, {3, 5}},
                                MinorIndex{{6}, {2}}}) {
    const int k = idx.order();
    MatX sub(k, k);
    for (int r = 0; r < k; ++r)
      for (int cc = 0; cc < k; ++cc) sub(r, cc) = J(idx.rows[r] - 1, idx.cols[cc] - 1);
    CHECK(minor_value(c, q, idx) == doctest::Approx(det_cofactor(sub)).epsilon(1e-12));
  }
}

TEST_CASE("minor time derivatives match finite differences along a trajectory") {
  // The product-rule expansion weights every split of the derivative order
  // over the columns by the plain multinomial count. Splits that give two
  // columns the same derivative order keep their full weight: for a 2x2 minor
  // at nu = 2 the (1,1) split enters twice, not once, and the finite
  // difference oracle below is sensitive to exactly that factor.
  Rng rng(503);
  for (int rep = 0; rep < 4; ++rep) {
    const Chain c = random_chain(rng, 5);
    const PolyTraj traj = random_traj(rng, 5, 5);
    const auto idxs = {MinorIndex{{1, 2, 3}, {1, 3, 5}}, MinorIndex{{2, 5}, {2, 4}},
                       MinorIndex{{1, 2, 3, 4}, {1, 2, 3, 4}}};
    for (const MinorIndex& idx : idxs) {
      for (int nu = 1; nu <= 4; ++nu) {
        const double ref = fd_derivative_scalar(
            [&](double t) { return minor_value(c, traj.value(t), idx); }, nu, 1e-2);
        const double got = minor_time_derivative(c, traj.stack_at(0.0, nu), idx, nu);
        CHECK(std::abs(got - ref) < 4e-5 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("precomputed screw derivatives give the same minor derivatives") {
  Rng rng(504);
  const Chain c = random_chain(rng, 6);
  const PolyTraj traj = random_traj(rng, 6, 5);
  const DerivativeStack st = traj.stack_at(0.0, 5);
  const TwistDerivs td = twist_derivatives_recursive(c, st, 4);
  for (const MinorIndex& idx : MinorIndex::all(6, 3)) {
    if ((idx.rows[0] + idx.cols[0]) % 7 != 0) continue;  // thin the 300-item sweep
    for (int nu = 0; nu <= 4; ++nu) {
      CHECK(minor_time_derivative(td, idx, nu) ==
            doctest::Approx(minor_time_derivative(c, st, idx, nu)).epsilon(1e-12));
    }
  }
}

TEST_CASE("minor differentials match finite differences along a direction") {
  Rng rng(505);
  const Chain c = random_chain(rng, 5);
  const VecX q = rng.vec(5, 0.8);
  const VecX x = rng.vec(5, 1.0);
  const MinorIndex idx{{1, 2, 6}, {2, 3, 5}};
  for (int k = 1; k <= 4; ++k) {
    const double ref = fd_derivative_scalar(
        [&](double t) { return minor_value(c, q + t * x, idx); }, k, 1e-2);
    const double got = minor_differential(c, q, idx, k, x);
    CHECK(std::abs(got - ref) < 4e-5 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("minor derivative validates the stack order") {
  Rng rng(506);
  const Chain c = random_chain(rng, 4);
  const PolyTraj traj = random_traj(rng, 4, 3);
  const MinorIndex idx{{1, 2}, {1, 2}};
  CHECK_THROWS_AS(minor_time_derivative(c, traj.stack_at(0.0, 1), idx, 3),
                  std::invalid_argument);
}

}  // TEST_SUITE
