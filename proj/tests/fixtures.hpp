// Shared benchmark linkages and their hand-derived reference data: the
// planar 4-bar with both choices of input joint, the 4C loop with its
// constraint maps, tangent cone modes, differentials and minor polynomials,
// and the two Delassus-style helical loops. Used by the module tests and by
// the acceptance checks.
#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "screwkin/chain.hpp"

namespace testutil {

using screwkin::Chain;
using screwkin::Mat4;
using screwkin::PitchClass;
using screwkin::ScrewVec;
using screwkin::UnitScrew;
using screwkin::Vec3;
using screwkin::VecX;

// ---- chains -----------------------------------------------------------------

// Planar 4-bar: revolute z axes through (0,0), (2,0), (1,1), (0,1). The loop
// closes identically at q = 0.
inline Chain fourbar_chain() {
  Chain c;
  const Vec3 pts[4] = {{0, 0, 0}, {2, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  for (const Vec3& p : pts) {
    c.joints.push_back(UnitScrew{Vec3::UnitZ(), p, PitchClass::Revolute, 0.0});
  }
  return c;
}

// 4C loop: four cylindric joints along x, y, x, y through the origin, each
// expanded into a revolute plus a prismatic on the same axis. Joint variables
// are (q1..q8) with odd = rotations, even = translations.
inline Chain linkage_4c_chain() {
  Chain c;
  const Vec3 ax[4] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitY()};
  for (const Vec3& a : ax) {
    c.joints.push_back(UnitScrew{a, Vec3::Zero(), PitchClass::Revolute, 0.0});
    c.joints.push_back(UnitScrew{a, Vec3::Zero(), PitchClass::Prismatic, 0.0});
  }
  return c;
}

// Two revolute and two cylindric joints, all axes parallel to z at the unit
// square corners; 6 joint variables after expansion.
inline Chain linkage_2r2c_chain() {
  Chain c;
  c.joints.push_back(UnitScrew{Vec3::UnitZ(), {0, 0, 0}, PitchClass::Revolute, 0.0});
  c.joints.push_back(UnitScrew{Vec3::UnitZ(), {1, 0, 0}, PitchClass::Revolute, 0.0});
  for (const Vec3& p : {Vec3{1, 1, 0}, Vec3{0, 1, 0}}) {
    c.joints.push_back(UnitScrew{Vec3::UnitZ(), p, PitchClass::Revolute, 0.0});
    c.joints.push_back(UnitScrew{Vec3::UnitZ(), p, PitchClass::Prismatic, 0.0});
  }
  return c;
}

// Four helical joints with parallel z axes at the unit square corners.
inline Chain delassus_4h_chain(double h1, double h2, double h3, double h4) {
  Chain c;
  const Vec3 pts[4] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const double hh[4] = {h1, h2, h3, h4};
  for (int i = 0; i < 4; ++i) {
    c.joints.push_back(UnitScrew{Vec3::UnitZ(), pts[i], PitchClass::Helical, hh[i]});
  }
  return c;
}

// ---- planar 4-bar golden joint derivatives ----------------------------------

// Dependent-joint derivatives through order 4 when joint 4 drives, as
// functions of (u1..u4) = derivatives of q4. Row l-1 holds the order-l
// derivative of (q1..q4).
inline std::array<Eigen::Vector4d, 4> fourbar_golden_a(double u1, double u2, double u3,
                                                       double u4) {
  std::array<Eigen::Vector4d, 4> g;
  g[0] << -u1 / 2, u1 / 2, -u1, u1;
  g[1] << (u1 * u1 - 2 * u2) / 4, (2 * u2 + u1 * u1) / 4, -u2 - u1 * u1 / 2, u2;
  g[2] << (-2 * u3 + 3 * u1 * u1 * u1 + 3 * u1 * u2) / 4, (2 * u3 + 3 * u1 * u2) / 4,
      (-4 * u3 - 3 * u1 * u1 * u1 - 6 * u1 * u2) / 4, u3;
  const double u12 = u1 * u1, u14 = u12 * u12;
  g[3] << (-2 * u4 + 3 * u2 * u2 + 8 * u14 + 4 * u3 * u1 + 18 * u12 * u2) / 4,
      (2 * u4 + 3 * u2 * u2 + 2 * u14 + 4 * u3 * u1) / 4,
      (-2 * u4 - 3 * u2 * u2 - 5 * u14 - 4 * u3 * u1 - 9 * u12 * u2) / 2, u4;
  return g;
}

// Same with joint 1 driving; (w1..w4) = derivatives of q1. The first-rate
// entry for joint 4 is -2*w1 (the variant without the rate is dimensionally
// inconsistent; see DISCREPANCIES.md).
inline std::array<Eigen::Vector4d, 4> fourbar_golden_b(double w1, double w2, double w3,
                                                       double w4) {
  std::array<Eigen::Vector4d, 4> g;
  const double w12 = w1 * w1, w13 = w12 * w1, w14 = w12 * w12;
  g[0] << w1, -w1, 2 * w1, -2 * w1;
  g[1] << w2, 2 * w12 - w2, 2 * w2 - 4 * w12, 2 * (w12 - w2);
  g[2] << w3, -w3 - 12 * w13 + 6 * w1 * w2, 2 * (w3 + 15 * w13 - 6 * w1 * w2),
      -2 * (w3 + 9 * w13 - 3 * w1 * w2);
  g[3] << w4, -w4 + 6 * w2 * w2 + 154 * w14 + 8 * w3 * w1 - 72 * w12 * w2,
      -2 * (-w4 + 6 * w2 * w2 + 184 * w14 + 8 * w3 * w1 - 90 * w12 * w2),
      -2 * w4 + 6 * w2 * w2 + 214 * w14 + 8 * w3 * w1 - 108 * w12 * w2;
  return g;
}

// Fourth-order motion polynomials for the two driven cases with input sin t.
// The driving coordinate is kept exact.
inline Eigen::Vector4d fourbar_taylor_a(double t) {
  Eigen::Vector4d q;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  q << (t4 + 5 * t3 + 3 * t2 - 12 * t) / 24, -(t4 + 4 * t3 - 6 * t2 - 24 * t) / 48,
      -(t4 - 2 * t3 + 12 * t2 + 48 * t) / 48, std::sin(t);
  return q;
}

inline Eigen::Vector4d fourbar_taylor_b(double t) {
  Eigen::Vector4d q;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  q << std::sin(t), 73.0 / 12 * t4 - 11.0 / 6 * t3 + t2 - t,
      -2.0 / 3 * (22 * t4 - 7 * t3 + 3 * t2 - 3 * t),
      103.0 / 12 * t4 - 8.0 / 3 * t3 + t2 - 2 * t;
  return q;
}

// ---- 4C reference data -------------------------------------------------------

// Hand-expanded loop constraint maps at q = 0: value, first and second time
// derivative of the loop twist for joint derivative vectors x, y, z.
// Components ordered (wx, wy, wz, vx, vy, vz).
inline ScrewVec fourc_H1(const VecX& x) {
  ScrewVec h;
  h << x[0] + x[4], x[2] + x[6], 0, x[1] + x[5], x[3] + x[7], 0;
  return h;
}

inline ScrewVec fourc_H2(const VecX& x, const VecX& y) {
  ScrewVec h;
  h << y[0] + y[4], y[2] + y[6], x[4] * (-x[2] + x[6]) + x[0] * (x[2] + x[6]),
      y[1] + y[5], y[3] + y[7],
      -x[3] * x[4] - x[2] * x[5] + x[5] * x[6] + x[1] * (x[2] + x[6]) + x[4] * x[7] +
          x[0] * (x[3] + x[7]);
  return h;
}

inline ScrewVec fourc_H3(const VecX& x, const VecX& y, const VecX& z) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4], x6 = x[5],
               x7 = x[6], x8 = x[7];
  const double y1 = y[0], y2 = y[1], y3 = y[2], y4 = y[3], y5 = y[4], y6 = y[5],
               y7 = y[6], y8 = y[7];
  ScrewVec h;
  h << -x3 * x5 * (x3 - 2 * x7) + z[0] + z[4],
      -x7 * (x1 + x5) * (x1 + x5) - x1 * x3 * (x1 - 2 * x5) + z[2] + z[6],
      x3 * y1 + 2 * x1 * y3 - x5 * y3 - 2 * x3 * y5 + x7 * (y1 + y5) +
          2 * (x1 + x5) * y7,
      2 * (-x4 * x5 + x8 * x5 + x6 * x7) * x3 - x3 * x3 * x6 + 2 * x4 * x5 * x7 +
          z[1] + z[5],
      -2 * (-x4 * x5 + x8 * x5 - x3 * x6 + x6 * x7 + x2 * (x3 + x7)) * x1 -
          x1 * x1 * (x4 + x8) -
          x5 * (-2 * x2 * x3 + 2 * (x2 + x6) * x7 + x5 * x8) + z[3] + z[7],
      -x6 * y3 + 2 * x1 * y4 - x5 * y4 + x8 * (y1 + y5) + x4 * (y1 - 2 * y5) +
          x7 * (y2 + y6) + x3 * (y2 - 2 * y6) + 2 * x6 * y7 + 2 * x2 * (y3 + y7) +
          2 * (x1 + x5) * y8;
  return h;
}

// First-order cone: x = (t, s, u, v, -t, -s, -u, -v).
inline Eigen::MatrixXd fourc_k1_basis() {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(8, 4);
  for (int j = 0; j < 4; ++j) {
    b(j, j) = 1.0;
    b(j + 4, j) = -1.0;
  }
  return b;
}

// The three families whose union is the second- and higher-order cone.
inline VecX fourc_k2_mode(int which, double a, double b) {
  VecX x = VecX::Zero(8);
  switch (which) {
    case 0:
      x[2] = a; x[3] = b; x[6] = -a; x[7] = -b;
      break;
    case 1:
      x[1] = a; x[3] = b; x[5] = -a; x[7] = -b;
      break;
    default:
      x[0] = a; x[1] = b; x[4] = -a; x[5] = -b;
      break;
  }
  return x;
}

// First differential of the closure map at q = 0 as a 4x4 matrix function.
inline Mat4 fourc_d1f(const VecX& x) {
  Mat4 m = Mat4::Zero();
  const double wx = x[0] + x[4], wy = x[2] + x[6];
  const double vx = x[1] + x[5], vy = x[3] + x[7];
  m(0, 2) = wy;  m(0, 3) = vx;
  m(1, 2) = -wx; m(1, 3) = vy;
  m(2, 0) = -wy; m(2, 1) = wx;
  return m;
}

// d1f + d2f/2 at q = 0. Entry (1,3) keeps the linear term x4+x8 carried over
// from the first differential; the second differential contributes nothing
// there (see DISCREPANCIES.md on the variant that zeroes it).
inline Mat4 fourc_d1f_half_d2f(const VecX& x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4], x6 = x[5],
               x7 = x[6], x8 = x[7];
  Mat4 m = Mat4::Zero();
  m(0, 0) = -0.5 * (x3 + x7) * (x3 + x7);
  m(0, 1) = x3 * x5;
  m(0, 2) = x3 + x7;
  m(0, 3) = x2 + x6;
  m(1, 0) = x5 * x7 + x1 * (x3 + x7);
  m(1, 1) = -0.5 * (x1 + x5) * (x1 + x5);
  m(1, 2) = -x1 - x5;
  m(1, 3) = x4 + x8;
  m(2, 0) = -x3 - x7;
  m(2, 1) = x1 + x5;
  m(2, 2) = -0.5 * ((x1 + x5) * (x1 + x5) + (x3 + x7) * (x3 + x7));
  m(2, 3) = -x3 * x6 + x5 * x8 + x1 * (x4 + x8);
  return m;
}

// Nonzero second derivatives of the 6x6 minors at q = 0 as polynomial
// functions of x, and the nonzero first derivatives of the 5x5 minors.
inline std::array<std::function<double(const VecX&)>, 8> fourc_minor6_polys() {
  return {
      [](const VecX& x) { return -2 * x[2] * x[2]; },
      [](const VecX& x) { return 2 * x[2] * x[2]; },
      [](const VecX& x) { return -2 * x[2] * x[4]; },
      [](const VecX& x) { return 2 * x[2] * x[4]; },
      [](const VecX& x) { return -2 * x[4] * x[4]; },
      [](const VecX& x) { return 2 * x[4] * x[4]; },
      [](const VecX& x) { return 2 * x[3] * x[4] - 2 * x[2] * x[5]; },
      [](const VecX& x) { return -2 * x[3] * x[4] + 2 * x[2] * x[5]; },
  };
}

inline std::array<std::function<double(const VecX&)>, 8> fourc_minor5_polys() {
  return {
      [](const VecX& x) { return -x[2]; }, [](const VecX& x) { return x[2]; },
      [](const VecX& x) { return -x[3]; }, [](const VecX& x) { return x[3]; },
      [](const VecX& x) { return -x[4]; }, [](const VecX& x) { return x[4]; },
      [](const VecX& x) { return -x[5]; }, [](const VecX& x) { return x[5]; },
  };
}

}  // namespace testutil
