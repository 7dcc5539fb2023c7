#include "screwkin/screw.hpp"

#include <cmath>
#include <stdexcept>

namespace screwkin {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Vec3 unskew(const Mat3& m) {
  return Vec3(0.5 * (m(2, 1) - m(1, 2)),
              0.5 * (m(0, 2) - m(2, 0)),
              0.5 * (m(1, 0) - m(0, 1)));
}

Mat4 hat(const ScrewVec& x) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = skew(angular(x));
  m.topRightCorner<3, 1>() = linear(x);
  return m;
}

ScrewVec vee(const Mat4& m, double tol) {
  const Mat3 w = m.topLeftCorner<3, 3>();
  double defect = (w + w.transpose()).norm();
  defect = std::max(defect, m.row(3).norm());
  if (defect > tol) {
    throw std::invalid_argument("vee: matrix is not a screw matrix (defect " +
                                std::to_string(defect) + ")");
  }
  return vee_unchecked(m);
}

ScrewVec vee_unchecked(const Mat4& m) {
  return screw_vec(unskew(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>());
}

namespace {

// sin(t)/t and (1-cos(t))/t^2 with series fallbacks near zero. The series
// keep four terms, enough for full double precision below the threshold.
double sinc(double t) {
  const Tolerances tol;
  if (std::abs(t) < tol.small_angle) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0));
  }
  return std::sin(t) / t;
}

double cosc(double t) {
  const Tolerances tol;
  if (std::abs(t) < tol.small_angle) {
    const double t2 = t * t;
    return 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0 * (1.0 - t2 / 56.0)));
  }
  return (1.0 - std::cos(t)) / (t * t);
}

// (t - sin(t))/t^3, used by the translation block of the twist exponential.
double tminussinc(double t) {
  const Tolerances tol;
  if (std::abs(t) < tol.small_angle) {
    const double t2 = t * t;
    return (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0))) / 6.0;
  }
  return (t - std::sin(t)) / (t * t * t);
}

}  // namespace

Mat3 exp_so3(const Vec3& x) {
  const double t = x.norm();
  const Mat3 xh = skew(x);
  return Mat3::Identity() + sinc(t) * xh + cosc(t) * xh * xh;
}

Mat3 exp_so3_unit(const Vec3& e, double angle) {
  const Mat3 eh = skew(e);
  return Mat3::Identity() + std::sin(angle) * eh + (1.0 - std::cos(angle)) * eh * eh;
}

Mat3 exp_so3_quadratic(const Vec3& x) {
  const double t = x.norm();
  if (t == 0.0) return Mat3::Identity();
  const Mat3 xh = skew(x);
  return Mat3::Identity() + (std::sin(t) / t) * xh +
         ((1.0 - std::cos(t)) / (t * t)) * xh * xh;
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = r;
  return m;
}

Pose Pose::operator*(const Pose& other) const {
  return Pose{R * other.R, R * other.r + r};
}

Pose Pose::inverse() const {
  return Pose{R.transpose(), -(R.transpose() * r)};
}

Pose Pose::from_matrix(const Mat4& m, double tol) {
  Pose p{m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  const double defect = orthonormality_defect(p.R);
  if (defect > tol) {
    throw std::invalid_argument("from_matrix: rotation block defect " +
                                std::to_string(defect));
  }
  if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm() > tol) {
    throw std::invalid_argument("from_matrix: last row is not (0 0 0 1)");
  }
  return p;
}

double orthonormality_defect(const Mat3& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

ScrewVec UnitScrew::to_screwvec() const {
  switch (kind) {
    case PitchClass::Prismatic:
      return screw_vec(Vec3::Zero(), e);
    case PitchClass::Revolute:
      return screw_vec(e, p.cross(e));
    case PitchClass::Helical:
      return screw_vec(e, p.cross(e) + h * e);
  }
  return ScrewVec::Zero();
}

Pose exp_screw(const UnitScrew& s, double phi) {
  if (s.kind == PitchClass::Prismatic) {
    return Pose{Mat3::Identity(), phi * s.e};
  }
  const Mat3 R = exp_so3(phi * s.e);
  Vec3 r = (Mat3::Identity() - R) * s.p;
  if (s.kind == PitchClass::Helical) r += phi * s.h * s.e;
  return Pose{R, r};
}

Pose exp_twist(const ScrewVec& x) {
  const Vec3 xi = angular(x);
  const Vec3 eta = linear(x);
  const double t = xi.norm();
  const Mat3 xh = skew(xi);
  // Translation factor: integral of the rotation along the screw motion.
  const Mat3 G = Mat3::Identity() + cosc(t) * xh + tminussinc(t) * xh * xh;
  return Pose{exp_so3(xi), G * eta};
}

Mat6 adjoint(const Pose& C) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = C.R;
  m.bottomRightCorner<3, 3>() = C.R;
  m.bottomLeftCorner<3, 3>() = skew(C.r) * C.R;
  return m;
}

Mat6 adjoint_translation(const Vec3& r) {
  Mat6 m = Mat6::Identity();
  m.bottomLeftCorner<3, 3>() = skew(r);
  return m;
}

Mat6 adjoint_rotation(const Mat3& R) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = R;
  m.bottomRightCorner<3, 3>() = R;
  return m;
}

ScrewVec adjoint_apply(const Pose& C, const ScrewVec& x) {
  const Vec3 xi = C.R * angular(x);
  return screw_vec(xi, C.R * linear(x) + C.r.cross(xi));
}

ScrewVec screw_bracket(const ScrewVec& a, const ScrewVec& b) {
  const Vec3 xa = angular(a), xb = angular(b);
  return screw_vec(xa.cross(xb), linear(a).cross(xb) + xa.cross(linear(b)));
}

Mat6 ad_matrix(const ScrewVec& a) {
  Mat6 m = Mat6::Zero();
  const Mat3 xh = skew(angular(a));
  m.topLeftCorner<3, 3>() = xh;
  m.bottomRightCorner<3, 3>() = xh;
  m.bottomLeftCorner<3, 3>() = skew(linear(a));
  return m;
}

Mat6 ad_translation(const Vec3& r) {
  Mat6 m = Mat6::Zero();
  m.bottomLeftCorner<3, 3>() = skew(r);
  return m;
}

}  // namespace screwkin
