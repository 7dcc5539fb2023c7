#pragma once

#include <vector>

#include "screwkin/derivatives.hpp"

namespace screwkin {

// Row/column selection for a minor of the full spatial Jacobian. Rows index
// screw components 1..6, columns index joints 1..n; both strictly increasing
// and equal length.
struct MinorIndex {
  std::vector<int> rows;
  std::vector<int> cols;

  int order() const { return static_cast<int>(rows.size()); }
  void validate(int n) const;  // throws std::invalid_argument on bad input

  // All k x k selections over 6 rows and n columns.
  static std::vector<MinorIndex> all(int n, int k);
};

// Determinant with a closed form for sizes 1..3 and pivoted LU beyond.
double det_small(const MatX& m);

// Value of the selected minor of the spatial Jacobian at q.
double minor_value(const Chain& c, const VecX& q, const MinorIndex& idx);

// nu-th time derivative of the minor along a joint trajectory germ. Expands
// by the product rule over column derivative splits: each term is the minor
// with column j replaced by the a_j-th derivative of screw beta_j, weighted
// by the multinomial count of that split. Needs stack order >= nu.
double minor_time_derivative(const Chain& c, const DerivativeStack& st,
                             const MinorIndex& idx, int nu);

// Same expansion on precomputed screw derivatives (td.order >= nu); avoids
// recomputing the derivative tables when many minors share one stack.
double minor_time_derivative(const TwistDerivs& td, const MinorIndex& idx, int nu);

// k-th differential of the minor at q in direction x (homogeneous degree k),
// using screw differentials in place of time derivatives.
double minor_differential(const Chain& c, const VecX& q, const MinorIndex& idx,
                          int k, const VecX& x);

}  // namespace screwkin
