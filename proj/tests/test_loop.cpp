#include <doctest.h>

#include "screwkin/loop.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace screwkin;
using namespace testutil;

namespace {

std::vector<VecX> one_joint_inputs(double u1, double u2, double u3, double u4) {
  std::vector<VecX> u(4, VecX(1));
  u[0][0] = u1; u[1][0] = u2; u[2][0] = u3; u[3][0] = u4;
  return u;
}

}  // namespace

TEST_SUITE("loop") {

TEST_CASE("4-bar driven at joint 4 reproduces the hand-derived derivatives") {
  const Chain c = fourbar_chain();
  const CoordinateSplit split{{1, 2, 3}, {4}};
  Rng rng(801);
  for (int rep = 0; rep < 6; ++rep) {
    const double u1 = rng.uniform(-2, 2), u2 = rng.uniform(-2, 2),
                 u3 = rng.uniform(-2, 2), u4 = rng.uniform(-2, 2);
    const LoopDerivatives ld =
        loop_derivatives(c, VecX::Zero(4), split, one_joint_inputs(u1, u2, u3, u4), 4);
    const auto golden = fourbar_golden_a(u1, u2, u3, u4);
    for (int l = 1; l <= 4; ++l) {
      CHECK((ld.stack.derivs[static_cast<size_t>(l) - 1] -
             VecX(golden[static_cast<size_t>(l) - 1]))
                .norm() < 1e-10);
    }
    CHECK(!ld.used_pseudoinverse);
  }
}

TEST_CASE("4-bar driven at joint 1 reproduces the hand-derived derivatives") {
  const Chain c = fourbar_chain();
  const CoordinateSplit split{{2, 3, 4}, {1}};
  Rng rng(802);
  for (int rep = 0; rep < 6; ++rep) {
    const double w1 = rng.uniform(-2, 2), w2 = rng.uniform(-2, 2),
                 w3 = rng.uniform(-2, 2), w4 = rng.uniform(-2, 2);
    const LoopDerivatives ld =
        loop_derivatives(c, VecX::Zero(4), split, one_joint_inputs(w1, w2, w3, w4), 4);
    const auto golden = fourbar_golden_b(w1, w2, w3, w4);
    for (int l = 1; l <= 4; ++l) {
      CHECK((ld.stack.derivs[static_cast<size_t>(l) - 1] -
             VecX(golden[static_cast<size_t>(l) - 1]))
                .norm() < 1e-10);
    }
  }
}

TEST_CASE("resolved derivative stacks annihilate the loop constraint map") {
  const Chain c = fourbar_chain();
  const LoopDerivatives ld = loop_derivatives(c, VecX::Zero(4), CoordinateSplit{{1, 2, 3}, {4}},
                                              one_joint_inputs(1.0, -0.5, 0.25, 2.0), 4);
  DerivativeStack st = ld.stack;
  for (const ScrewVec& h : loop_constraint_map(c, st, 3)) {
    CHECK(h.norm() < 1e-11);
  }
}

TEST_CASE("taylor motion matches the displayed polynomials and closes at fifth order") {
  const Chain c = fourbar_chain();

  // Input q4 = sin t: derivative seeds (1, 0, -1, 0).
  const LoopDerivatives ld = loop_derivatives(c, VecX::Zero(4), CoordinateSplit{{1, 2, 3}, {4}},
                                              one_joint_inputs(1, 0, -1, 0), 4);
  for (double t : {0.1, 0.2}) {
    const VecX qt = loop_taylor_motion(ld.stack, t);
    const Eigen::Vector4d ref = fourbar_taylor_a(t);
    for (int j = 0; j < 3; ++j) CHECK(qt[j] == doctest::Approx(ref[j]).epsilon(1e-12));
    // The driving coordinate is polynomial in the Taylor value but exact in
    // the reference; they agree to the sine remainder t^5/120.
    CHECK(std::abs(qt[3] - ref[3]) < std::pow(t, 5) / 100.0);
  }

  double prev = -1.0;
  for (double dt : {0.2, 0.1, 0.05}) {
    const double res = closure_residual(c, loop_taylor_motion(ld.stack, dt));
    if (prev > 0.0) CHECK(std::log2(prev / res) > 4.5);
    prev = res;
  }

  // Same for the joint-1 driven case.
  const LoopDerivatives lb = loop_derivatives(c, VecX::Zero(4), CoordinateSplit{{2, 3, 4}, {1}},
                                              one_joint_inputs(1, 0, -1, 0), 4);
  for (double t : {0.1, 0.2}) {
    const VecX qt = loop_taylor_motion(lb.stack, t);
    const Eigen::Vector4d ref = fourbar_taylor_b(t);
    for (int j = 1; j < 4; ++j) CHECK(qt[j] == doctest::Approx(ref[j]).epsilon(1e-12));
  }
}

TEST_CASE("automatic split selection picks an invertible dependent block") {
  const Chain c = fourbar_chain();
  const CoordinateSplit split = select_split(c, VecX::Zero(4));
  CHECK(split.dependent.size() == 3u);
  CHECK(split.independent.size() == 1u);
  std::vector<int> all = split.dependent;
  all.insert(all.end(), split.independent.begin(), split.independent.end());
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<int>{1, 2, 3, 4});

  std::vector<VecX> u(2, VecX::Constant(1, 0.7));
  const LoopDerivatives ld = loop_derivatives(c, VecX::Zero(4), split, u, 2);
  CHECK(ld.cond_dependent < 1e3);
}

TEST_CASE("the 4C loop resolves around a mode-III configuration") {
  const Chain c = linkage_4c_chain();
  // Mode III moves joints (1,2,5,6); away from the origin the bifurcation
  // disappears and the loop behaves regularly.
  VecX q = VecX::Zero(8);
  q[0] = 0.4; q[1] = 0.3; q[4] = -0.4; q[5] = -0.3;
  CHECK(closure_residual(c, q) < 1e-12);

  const CoordinateSplit split = select_split(c, q);
  const int nu = static_cast<int>(split.independent.size());
  Rng rng(803);
  std::vector<VecX> u;
  for (int l = 0; l < 3; ++l) u.push_back(rng.vec(nu, 1.0));
  const LoopDerivatives ld = loop_derivatives(c, q, split, u, 3);

  DerivativeStack st = ld.stack;
  for (const ScrewVec& h : loop_constraint_map(c, st, 2)) {
    CHECK(h.norm() < 1e-10);
  }
  // The resolved motion keeps the loop closed to fourth order in t.
  for (double dt : {0.05, 0.025}) {
    CHECK(closure_residual(c, loop_taylor_motion(ld.stack, dt)) <
          40.0 * std::pow(dt, 4));
  }
}

TEST_CASE("validation and failure paths") {
  const Chain c = fourbar_chain();
  // Open configuration: the loop does not close, so the resolution refuses.
  VecX q = VecX::Zero(4);
  q[0] = 0.5;
  CHECK_THROWS_AS(loop_derivatives(c, q, CoordinateSplit{{1, 2, 3}, {4}},
                                   one_joint_inputs(1, 0, 0, 0), 1),
                  NumericError);

  // Bad partitions.
  CHECK_THROWS_AS(loop_derivatives(c, VecX::Zero(4), CoordinateSplit{{1, 2}, {4}},
                                   one_joint_inputs(1, 0, 0, 0), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(loop_derivatives(c, VecX::Zero(4), CoordinateSplit{{1, 2, 3}, {3}},
                                   one_joint_inputs(1, 0, 0, 0), 1),
                  std::invalid_argument);

  // Too few input derivative levels for the requested order.
  std::vector<VecX> u(1, VecX::Constant(1, 1.0));
  CHECK_THROWS_AS(loop_derivatives(c, VecX::Zero(4), CoordinateSplit{{1, 2, 3}, {4}}, u, 3),
                  std::invalid_argument);
}

TEST_CASE("singular dependent block works only with the pseudoinverse enabled") {
  // Driving the 4C at the origin with a mode tangent: the reduced dependent
  // block is rank deficient at the bifurcation, yet the system stays
  // consistent along mode III.
  const Chain c = linkage_4c_chain();
  const VecX q0 = VecX::Zero(8);
  const CoordinateSplit split{{2, 3, 4, 5, 6, 7}, {1, 8}};

  std::vector<VecX> u(1, VecX::Zero(2));
  u[0][0] = 1.0;  // drive joint 1, keep joint 8 still
  CHECK_THROWS_AS(loop_derivatives(c, q0, split, u, 1, false), NumericError);

  const LoopDerivatives ld = loop_derivatives(c, q0, split, u, 1, true);
  CHECK(ld.used_pseudoinverse);
  // First-order resolution must be a kernel vector of the full Jacobian.
  const MatX J = jacobian_spatial(c, q0, 8);
  CHECK((J * ld.stack.derivs[0]).norm() < 1e-9);
}

}  // TEST_SUITE
