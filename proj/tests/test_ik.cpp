#include <doctest.h>

#include "screwkin/ik.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace screwkin;
using namespace testutil;

namespace {

// Spatial 6R arm that stays well conditioned near the test configuration.
Chain arm6r() {
  Chain c;
  auto rev = [&](const Vec3& ax, const Vec3& p) {
    c.joints.push_back(UnitScrew{ax, p, PitchClass::Revolute, 0.0});
  };
  rev(Vec3::UnitZ(), {0, 0, 0});
  rev(Vec3::UnitY(), {0, 0, 0.3});
  rev(Vec3::UnitY(), {0.5, 0, 0.3});
  rev(Vec3::UnitX(), {0.5, 0, 0.3});
  rev(Vec3::UnitY(), {0.9, 0, 0.3});
  rev(Vec3::UnitX(), {0.9, 0, 0.3});
  return c;
}

std::vector<ScrewVec> task_from_traj(const Chain& c, const PolyTraj& traj, int k) {
  const TwistDerivs td = twist_derivatives_recursive(c, traj.stack_at(0.0, k + 1), k);
  std::vector<ScrewVec> task;
  for (int l = 0; l < k; ++l) {
    task.push_back(td.V[static_cast<size_t>(c.n()) - 1][static_cast<size_t>(l)]);
  }
  return task;
}

}  // namespace

TEST_SUITE("ik") {

TEST_CASE("joint derivatives are recovered from the task twist derivatives") {
  const Chain c = arm6r();
  Rng rng(701);
  for (int rep = 0; rep < 5; ++rep) {
    PolyTraj traj = random_traj(rng, 6, 6);
    // Stay near the dextrous posture; reject nearly singular draws, where the
    // joint-space roundtrip error grows like the task residual over sigma_min.
    do {
      traj.coef[0] = 0.25 * rng.vec(6, 1.0);
    } while (Eigen::JacobiSVD<MatX>(jacobian_spatial(c, traj.value(0.0), 6))
                 .singularValues()(5) < 0.05);
    const VecX q = traj.value(0.0);
    for (int k : {1, 2, 3, 4}) {
      const IkResult res = ik_joint_derivatives(c, q, task_from_traj(c, traj, k), k);
      CHECK(res.condition_number < 1e4);
      REQUIRE(static_cast<int>(res.stack.derivs.size()) == k);
      for (int l = 1; l <= k; ++l) {
        const VecX want = traj.deriv(l, 0.0);
        const VecX got = res.stack.derivs[static_cast<size_t>(l) - 1];
        CAPTURE(rep);
        CAPTURE(k);
        CAPTURE(l);
        CAPTURE(res.condition_number);
        CAPTURE(res.sigma_min);
        CHECK((got - want).norm() < 1e-9 * std::max(1.0, want.norm()));
      }
    }
  }
}

TEST_CASE("redundant chains get the minimum-norm solution consistent with the task") {
  Rng rng(702);
  const Chain c = random_chain(rng, 8);
  const PolyTraj traj = random_traj(rng, 8, 6);
  const VecX q = traj.value(0.0);
  const int k = 3;
  const auto task = task_from_traj(c, traj, k);
  const IkResult res = ik_joint_derivatives(c, q, task, k);

  // Forward recursion on the result reproduces the requested task exactly.
  DerivativeStack st = res.stack;
  while (st.order() < k + 1) st.derivs.push_back(VecX::Zero(c.n()));
  const TwistDerivs td = twist_derivatives_recursive(c, st, k);
  for (int l = 0; l < k; ++l) {
    const ScrewVec err = td.V[7][static_cast<size_t>(l)] - task[static_cast<size_t>(l)];
    CHECK(err.norm() < 1e-9 * std::max(1.0, task[static_cast<size_t>(l)].norm()));
  }

  // Minimum-norm property, level by level: each derivative lies in the row
  // space of the Jacobian.
  const MatX J = jacobian_spatial(c, q, 8);
  const MatX P = J.completeOrthogonalDecomposition().pseudoInverse() * J;
  for (const VecX& d : res.stack.derivs) {
    CHECK((d - P.transpose() * d).norm() < 1e-9 * std::max(1.0, d.norm()));
  }
}

TEST_CASE("the condition gate refuses singular and near-singular poses") {
  Chain c;
  c.joints.push_back(UnitScrew{Vec3::UnitZ(), Vec3::Zero(), PitchClass::Revolute, 0.0});
  c.joints.push_back(UnitScrew{Vec3::UnitZ(), Vec3::Zero(), PitchClass::Revolute, 0.0});
  std::vector<ScrewVec> task{ScrewVec::Zero()};
  CHECK_THROWS_AS(ik_joint_derivatives(c, VecX::Zero(2), task, 1), NumericError);
}

TEST_CASE("per-joint inverse kinematics from body twist sets") {
  Rng rng(703);
  for (int rep = 0; rep < 4; ++rep) {
    const Chain c = random_chain(rng, 6);
    const PolyTraj traj = random_traj(rng, 6, 6);
    const int k = 3;
    const TwistDerivs td = twist_derivatives_recursive(c, traj.stack_at(0.0, k + 1), k);
    std::vector<std::vector<ScrewVec>> body_twists;
    for (int i = 0; i < 6; ++i) {
      body_twists.push_back(td.V[static_cast<size_t>(i)]);
    }
    const VecX q = traj.value(0.0);
    const DerivativeStack st = ik_per_joint(c, q, body_twists, k);
    REQUIRE(st.order() == k + 1);
    for (int l = 1; l <= k + 1; ++l) {
      const VecX want = traj.deriv(l, 0.0);
      CHECK((st.derivs[static_cast<size_t>(l) - 1] - want).norm() <
            1e-9 * std::max(1.0, want.norm()));
    }

    const VecX acc = ik_per_joint_accel_geometric(c, q, body_twists);
    CHECK((acc - st.derivs[1]).norm() < 1e-10 * std::max(1.0, acc.norm()));
  }
}

TEST_CASE("input validation") {
  const Chain c = arm6r();
  const VecX q = VecX::Zero(6);
  CHECK_THROWS_AS(ik_joint_derivatives(c, q, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(ik_joint_derivatives(c, q, {ScrewVec::Zero()}, 2), std::invalid_argument);
  CHECK_THROWS_AS(ik_per_joint(c, q, {}, 2), std::invalid_argument);
}

}  // TEST_SUITE
