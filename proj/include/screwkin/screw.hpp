#pragma once

#include "screwkin/types.hpp"

namespace screwkin {

// ---- so(3) / se(3) coordinate maps ----------------------------------------

Mat3 skew(const Vec3& v);
Vec3 unskew(const Mat3& m);  // assumes m is skew; takes the mean of the pair

// 4x4 matrix form of a screw vector: [[skew(xi), eta], [0, 0]].
Mat4 hat(const ScrewVec& x);

// Inverse of hat. Throws std::invalid_argument if m deviates from the
// [[skew, v], [0, 0]] shape by more than tol.
ScrewVec vee(const Mat4& m, double tol = 1e-9);
ScrewVec vee_unchecked(const Mat4& m);

// ---- exponentials ----------------------------------------------------------

// Rotation about axis*angle encoded in x. Three algebraically equal forms;
// exp_so3 is the numerically careful one (series expansion of the sinc-type
// coefficients below the small-angle threshold).
Mat3 exp_so3(const Vec3& x);
Mat3 exp_so3_unit(const Vec3& e, double angle);    // Rodrigues, unit axis
Mat3 exp_so3_quadratic(const Vec3& x);             // I + a*skew + b*skew^2 form

// ---- rigid displacements ---------------------------------------------------

struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  Mat4 matrix() const;
  Pose operator*(const Pose& other) const;
  Pose inverse() const;
  Vec3 apply(const Vec3& p) const { return R * p + r; }

  static Pose identity() { return Pose{}; }
  static Pose from_matrix(const Mat4& m, double tol = 1e-9);
};

// ||R^T R - I||_F, used by validators; the library never renormalizes input
// rotations silently.
double orthonormality_defect(const Mat3& R);

// ---- joint screws ----------------------------------------------------------

enum class PitchClass { Revolute, Helical, Prismatic };

// Unit screw through point p with axis e. Pitch h is meaningful for the
// helical class only; revolute means h = 0 and prismatic is the infinite
// pitch limit (pure translation along e).
struct UnitScrew {
  Vec3 e = Vec3::UnitZ();
  Vec3 p = Vec3::Zero();
  PitchClass kind = PitchClass::Revolute;
  double h = 0.0;

  ScrewVec to_screwvec() const;
};

// Closed-form exponential of a unit screw scaled by the joint variable.
Pose exp_screw(const UnitScrew& s, double phi);

// Closed-form exponential of an arbitrary screw vector (no unit normalization
// required); handles the pure-translation case.
Pose exp_twist(const ScrewVec& x);

// ---- adjoint action and the Lie bracket ------------------------------------

// 6x6 matrix of the frame-change action of C on screw vectors:
// [[R, 0], [skew(r) R, R]].
Mat6 adjoint(const Pose& C);
Mat6 adjoint_translation(const Vec3& r);  // [[I, 0], [skew(r), I]]
Mat6 adjoint_rotation(const Mat3& R);     // [[R, 0], [0, R]]

ScrewVec adjoint_apply(const Pose& C, const ScrewVec& x);

// Bracket of two screw vectors: (xi1 x xi2, eta1 x xi2 + xi1 x eta2).
ScrewVec screw_bracket(const ScrewVec& a, const ScrewVec& b);

// Matrix of the bracket's left action: ad(a) b = screw_bracket(a, b).
Mat6 ad_matrix(const ScrewVec& a);

// ad of a pure translation rate: [[0, 0], [skew(r), 0]]. This is the
// derivative of adjoint_translation along r(t).
Mat6 ad_translation(const Vec3& r);

}  // namespace screwkin
