#pragma once

#include <vector>

#include "screwkin/chain.hpp"

namespace screwkin {

// Multi-index over n joint variables; a[j] counts derivatives in q_{j+1}.
struct MultiIndex {
  std::vector<int> a;

  explicit MultiIndex(int n = 0) : a(static_cast<size_t>(n), 0) {}
  int size() const { return static_cast<int>(a.size()); }
  int norm() const;
  double factorial() const;  // product of component factorials

  // All multi-indices over n variables with |a| = k, lexicographic order.
  static std::vector<MultiIndex> all_of_norm(int n, int k);
};

// Partial derivative of the instantaneous screw of joint i with respect to
// the joint variables selected by the multi-index. Screws of joints at or
// beyond any differentiation index are constant along that variable, so the
// result is exactly zero whenever a[j] > 0 for some j >= i. Otherwise it is
// the nested bracket of the instantaneous screws, applied in descending
// joint order.
ScrewVec partial_screw(const Chain& c, const VecX& q, int i, const MultiIndex& a);

// Convenience overload for a single differentiation variable.
ScrewVec partial_screw(const Chain& c, const VecX& q, int i, int j);

// Time derivatives of the instantaneous joint screws and of the link twists
// along a joint trajectory germ.
//   S[j-1][l] = l-th time derivative of screw j   (l = 0..order)
//   V[i-1][l] = l-th time derivative of the twist of link i
struct TwistDerivs {
  int order = 0;
  std::vector<std::vector<ScrewVec>> S;
  std::vector<std::vector<ScrewVec>> V;
};

// Two-term bracket recursion, valid to arbitrary order k. Needs joint
// derivatives through order k+1 in the stack.
TwistDerivs twist_derivatives_recursive(const Chain& c, const DerivativeStack& st, int k);

// Explicit closed forms through order 3 (velocity, acceleration, jerk at the
// twist level). Same output layout as the recursion; k <= 3.
TwistDerivs twist_derivatives_closed(const Chain& c, const DerivativeStack& st, int k);

// Single-link closed forms written as explicit sums over joint index tuples
// rather than recursions; useful as independent cross-checks and for spelling
// out the structure of the coefficients.
ScrewVec acceleration_explicit(const Chain& c, const DerivativeStack& st, int i);
ScrewVec jerk_explicit(const Chain& c, const DerivativeStack& st, int i);

}  // namespace screwkin
