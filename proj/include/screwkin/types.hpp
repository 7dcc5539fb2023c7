#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace screwkin {

// Thrown when a computation is refused or breaks down for numeric reasons
// (singular or ill-conditioned system, non-closing loop, ...). Input shape
// and validation problems throw std::invalid_argument instead.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Screw coordinate vectors stack the angular part over the linear part
// (ray coordinates). Twists, joint screws and their brackets all share
// this layout, so a plain 6-vector is used throughout.
using ScrewVec = Vec6;

inline Vec3 angular(const ScrewVec& s) { return s.head<3>(); }
inline Vec3 linear(const ScrewVec& s) { return s.tail<3>(); }

inline ScrewVec screw_vec(const Vec3& xi, const Vec3& eta) {
  ScrewVec s;
  s << xi, eta;
  return s;
}

// Tolerance table. Every numeric gate in the library reads from here so the
// thresholds live in one place; SCREWKIN_TOL scales them uniformly.
struct Tolerances {
  double orthonormality = 1e-9;   // pose validation
  double loop_closure = 1e-8;     // ||f(q) - I|| gate for on-variety inputs
  double cone = 1e-9;             // feasibility residual, scaled by chain size
  double svd_rank_rel = 1e-10;    // relative singular-value cutoff
  double condition_gate = 1e8;    // refuse linear solves beyond this
  double rank_gap_flag = 1e3;     // sigma_k/sigma_{k+1} below this => flag
  double small_angle = 1e-4;      // switch to Taylor for sinc-type terms

  static Tolerances from_env();   // applies SCREWKIN_TOL scale if set
};

inline constexpr int kMaxDerivativeOrder = 8;

// Binomial coefficients through kMaxDerivativeOrder-sized problems.
double binomial(int n, int k);
double factorial(int n);

}  // namespace screwkin
