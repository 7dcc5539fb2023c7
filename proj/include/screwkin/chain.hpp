#pragma once

#include <string>
#include <vector>

#include "screwkin/screw.hpp"

namespace screwkin {

// Serial chain of 1-dof lower-pair joints described by their unit screws in
// the reference configuration q = 0. Joint and link indices are 1-based
// throughout the public interface to match the usual convention of numbering
// bodies outward from the ground.
struct Chain {
  std::vector<UnitScrew> joints;
  std::vector<Pose> body_frames;  // optional reference frames A_i, one per link
  std::string name;

  int n() const { return static_cast<int>(joints.size()); }
  ScrewVec reference_screw(int j) const;  // Y_j
  Pose body_frame(int i) const;           // A_i, identity when not provided

  // Largest distance of a joint-axis point from the origin, floored at 1.
  // Used to scale residual tolerances to the mechanism's size.
  double characteristic_length() const;
};

// Joint trajectory germ: configuration plus time derivatives.
// derivs[0] is qdot, derivs[k-1] is the k-th derivative.
struct DerivativeStack {
  VecX q;
  std::vector<VecX> derivs;

  int order() const { return static_cast<int>(derivs.size()); }
  const VecX& deriv(int k) const { return derivs.at(static_cast<size_t>(k) - 1); }
};

// Product of joint exponentials up to link i (i = 0 gives identity).
Pose kinematic_map(const Chain& c, const VecX& q, int i);

// Absolute pose of body i: kinematic map composed with the body frame.
Pose link_pose(const Chain& c, const VecX& q, int i);

// Instantaneous joint screws at configuration q: screw j transported by the
// kinematic map of the preceding joints. Entry 0 holds joint 1.
std::vector<ScrewVec> joint_screws_spatial(const Chain& c, const VecX& q);

// Spatial Jacobian of link i: columns 1..i are the instantaneous screws,
// columns i+1..n are zero.
MatX jacobian_spatial(const Chain& c, const VecX& q, int i);

// Spatial twist of link i for the given joint rates.
ScrewVec spatial_twist(const Chain& c, const VecX& q, const VecX& qdot, int i);

}  // namespace screwkin
