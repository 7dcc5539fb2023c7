#pragma once

#include <vector>

#include "screwkin/derivatives.hpp"

namespace screwkin {

struct IkResult {
  DerivativeStack stack;          // q with derivatives through the asked order
  double condition_number = 0.0;  // of the end-link Jacobian at q
  double sigma_min = 0.0;
};

// Joint derivatives through order k from the end-link twist and its time
// derivatives (task[l] is the l-th derivative, task[0] the twist itself).
// Order r reduces to a linear solve against the same Jacobian once the lower
// joint derivatives are known: the right side is the (r-1)-th twist
// derivative minus the already-determined screw-derivative terms. The
// Jacobian is factored once and reused. Square chains use the exact inverse
// sense; redundant chains (n > 6) get the minimum-norm solution. Refuses to
// solve past the condition gate.
IkResult ik_joint_derivatives(const Chain& c, const VecX& q,
                              const std::vector<ScrewVec>& task, int k,
                              const Tolerances& tol = Tolerances::from_env());

// Joint derivatives through order k+1 (k <= 3) from per-body twist
// derivative sets: body_twists[i-1][l] is the l-th derivative of the twist
// of body i, l = 0..k. Works joint by joint with the scaled-transpose
// pseudoinverse of a single screw, so it needs every body twist but no
// matrix factorization and no square/rank assumption on the chain.
DerivativeStack ik_per_joint(const Chain& c, const VecX& q,
                             const std::vector<std::vector<ScrewVec>>& body_twists,
                             int k);

// Acceleration row of ik_per_joint written geometrically: the bracket
// correction collapses to a moment term (axis x moment)^T linear-velocity.
// Exposed for cross-checking the algebraic route.
VecX ik_per_joint_accel_geometric(const Chain& c, const VecX& q,
                                  const std::vector<std::vector<ScrewVec>>& body_twists);

}  // namespace screwkin
