#pragma once

#include <vector>

#include "screwkin/ik.hpp"
#include "screwkin/mobility.hpp"

namespace screwkin {

// Partition of the joint indices (1-based) of a closed chain into dependent
// and independent coordinates. The dependent block must make the reduced
// Jacobian square and regular at the working configuration.
struct CoordinateSplit {
  std::vector<int> dependent;
  std::vector<int> independent;
};

// Choose a split by column-pivoted QR of the reduced Jacobian: the leading
// pivot columns become the dependent coordinates.
CoordinateSplit select_split(const Chain& c, const VecX& q,
                             const Tolerances& tol = Tolerances::from_env());

struct LoopDerivatives {
  DerivativeStack stack;        // all n joints, derivatives through order k
  CoordinateSplit split;
  MatX reduced_jacobian;        // g x n at q
  double cond_dependent = 0.0;  // condition number of the dependent block
  bool used_pseudoinverse = false;
};

// Resolve the loop closure constraint to derivative order k: given values of
// the independent joint derivatives (u_derivs[l-1] over split.independent,
// l = 1..k), produce the full joint derivative stack that keeps the loop
// closed. Works order by order: the current dependent derivative comes from
// a linear solve against the dependent block, then the screw and Jacobian
// derivatives of that order feed the next one. q must close the loop. If the
// dependent block is singular but the system remains consistent (locally
// constant rank), set allow_pseudoinverse to substitute the pseudoinverse
// throughout the recursion.
LoopDerivatives loop_derivatives(const Chain& c, const VecX& q,
                                 const CoordinateSplit& split,
                                 const std::vector<VecX>& u_derivs, int k,
                                 bool allow_pseudoinverse = false,
                                 const Tolerances& tol = Tolerances::from_env());

// Taylor evaluation of the resolved joint motion at time t:
// q + sum_l q^(l) t^l / l!.
VecX loop_taylor_motion(const DerivativeStack& stack, double t);

// Frobenius distance of the loop closure map from the identity at q.
double closure_residual(const Chain& c, const VecX& q);

}  // namespace screwkin
