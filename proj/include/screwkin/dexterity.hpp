#pragma once

#include "screwkin/chain.hpp"

namespace screwkin {

// Scalar dexterity fields of the end-link Jacobian J (6 x n, or its leading
// rows for planar work when the caller slices). Both are built from the Gram
// matrix A = J J^T.

// sqrt(det A); the usual manipulability volume.
double manipulability(const MatX& J);

// 1 / (||A|| ||A^{-1}||) with entrywise (Frobenius) norms; in [0, 1], zero at
// singularities. Returns 0 when A is numerically singular.
double inverse_condition(const MatX& J);

// Gradient of manipulability over the joint variables, by expanding the
// derivative of det A column by column. Valid at any rank-regular point,
// redundant chains included.
VecX manipulability_gradient(const Chain& c, const VecX& q);

// Same gradient through the trace identity, valid for square nonsingular J.
VecX manipulability_gradient_trace(const Chain& c, const VecX& q);

// Hessian of manipulability by second-order column expansion of det A.
MatX manipulability_hessian(const Chain& c, const VecX& q);

// Hessian through trace identities, square nonsingular J only.
MatX manipulability_hessian_trace(const Chain& c, const VecX& q);

// Gradient of the inverse condition number field.
VecX inverse_condition_gradient(const Chain& c, const VecX& q);

}  // namespace screwkin
