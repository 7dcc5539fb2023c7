#pragma once

#include <vector>

#include "screwkin/derivatives.hpp"

namespace screwkin {

// Twist representations: Spatial measures everything in the ground frame,
// Body in the moving link frame, Hybrid mixes ground orientation with the
// link origin (angular part spatial, linear part the origin velocity).
enum class Rep { Spatial, Body, Hybrid };

// ---- body-fixed quantities ---------------------------------------------------

// Joint screws of joints 1..i seen from the frame of body i.
std::vector<ScrewVec> joint_screws_body(const Chain& c, const VecX& q, int i);

// Body Jacobian of link i: columns 1..i are the body-frame screws, the rest 0.
MatX jacobian_body(const Chain& c, const VecX& q, int i);

ScrewVec body_twist(const Chain& c, const VecX& q, const VecX& qdot, int i);

// Partial derivative of the body-frame screw of joint j <= i with respect to
// the variables in the multi-index. Nonzero only when every differentiation
// index lies strictly above j and at most i; the value is a sign-alternating
// nested bracket of body-frame screws, applied in ascending joint order.
ScrewVec partial_screw_body(const Chain& c, const VecX& q, int i, int j,
                            const MultiIndex& a);

// Time derivatives of the body twist of link i through order k via the
// bracket recursion on body-frame screws. Entry l is the l-th derivative
// (entry 0 the twist). Needs stack order k+1.
std::vector<ScrewVec> body_twist_derivatives(const Chain& c, const DerivativeStack& st,
                                             int i, int k);

// ---- hybrid quantities ---------------------------------------------------------

std::vector<ScrewVec> joint_screws_hybrid(const Chain& c, const VecX& q, int i);

MatX jacobian_hybrid(const Chain& c, const VecX& q, int i);

ScrewVec hybrid_twist(const Chain& c, const VecX& q, const VecX& qdot, int i);

// Hybrid twist derivatives of link i through order k <= 2 from the explicit
// screw-derivative sums (the hybrid screws are transported spatial screws, so
// their rates split into an origin-velocity shift and a spatial rotation
// rate). Needs stack order k + 1.
std::vector<ScrewVec> hybrid_twist_derivatives(const Chain& c, const DerivativeStack& st,
                                               int i, int k);

// ---- conversions ----------------------------------------------------------------

// Time derivatives of the link origin position through order k, from the
// spatial twist derivative stack (entry l of the result is r^(l+1)).
std::vector<Vec3> position_derivatives(const std::vector<ScrewVec>& spatial, const Vec3& r,
                                       int k);

// Convert a twist derivative stack (in[l] = l-th derivative, l = 0..k)
// between representations, given the pose C of the link at the evaluation
// instant. All conversion factors and their time derivatives are rebuilt
// internally from the stack itself, so the conversion is exact at every
// order: frame-change operators obey first-order rules (the spatial adjoint
// differentiates through the spatial twist, the translation part through the
// origin velocity), and higher orders follow by the product rule.
std::vector<ScrewVec> convert_twist_derivatives(const std::vector<ScrewVec>& in,
                                                Rep from, Rep to, const Pose& C, int k);

}  // namespace screwkin
