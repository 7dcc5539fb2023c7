#pragma once

#include <string>
#include <vector>

#include "screwkin/derivatives.hpp"

namespace screwkin {

// k-th differential of the instantaneous screw of joint i at q, evaluated on
// the direction x (homogeneous of degree k in x). Computed by the bracket
// recursion over lower joint screw differentials.
ScrewVec screw_differential(const Chain& c, const VecX& q, int i, int k, const VecX& x);

namespace detail {
// Full table dS[i-1][l] = l-th screw differential of joint i at q along x,
// for l = 0..K. Shared by the Taylor and minor expansions.
std::vector<std::vector<ScrewVec>> screw_differential_table(const Chain& c, const VecX& q,
                                                            int K, const VecX& x);
}  // namespace detail

// Differentials of the kinematic map of the last link at q, all evaluated on
// the same direction x. Homogeneous 4x4 matrix coefficients:
//   df[k-1]    = k-th differential of f            (k = 1..order)
//   dfinv[k-1] = k-th differential of f^{-1}
//   h[k-1]     = k-th right-logarithmic derivative (df composed with f^{-1}
//                plus lower-order correction terms)
struct KinematicMapDifferentials {
  int order = 0;
  Mat4 f0 = Mat4::Identity();      // f(q)
  std::vector<Mat4> df, dfinv, h;
};

KinematicMapDifferentials km_differentials(const Chain& c, const VecX& q, int order,
                                           const VecX& x);

// Truncated Taylor value f(q) + sum_{k<=order} d^k f(x) / k!.
Mat4 km_taylor_eval(const Chain& c, const VecX& q, int order, const VecX& x);

// Nearest rigid displacement to an approximate homogeneous matrix: polar
// projection of the rotation block, translation kept. Reported separately
// from the raw Taylor value; the library never projects silently.
Pose project_to_rigid(const Mat4& m);

// ---- polynomial systems ----------------------------------------------------

// Sparse multivariate polynomial system over x_1..x_nvars with monomials in
// multi-index exponent form. Serializes to a plain-text line format
// "c*x1^a1*...*xn^an" with terms joined by " + ".
struct PolySystem {
  struct Term {
    double coeff = 0.0;
    std::vector<int> expo;
  };
  struct Poly {
    std::vector<Term> terms;
  };

  int nvars = 0;
  std::vector<Poly> polys;

  double eval(int which, const VecX& x) const;
  std::string to_text() const;
};

// Polynomial equations in the direction x whose solution set is the degree-K
// Taylor approximation of the configuration variety of a closed chain at q:
// entries of the truncated Taylor expansion of f(q + x) - f(q), with f(q)
// assumed to close the loop. Coefficients are extracted exactly by finite
// differences of the homogeneous pieces on integer grid points, then rows
// below drop_tol are discarded.
PolySystem cspace_poly_system(const Chain& c, const VecX& q, int K,
                              double drop_tol = 1e-12);

}  // namespace screwkin
