#pragma once

#include <vector>

#include "screwkin/taylor.hpp"

namespace screwkin {

// ---- loop constraint maps ---------------------------------------------------

// Values of the loop velocity constraint and its time derivatives through
// order k for a closed chain: the i-th entry is the (i-1)-th time derivative
// of the twist of the last link, which must vanish identically along any
// motion that keeps the loop closed. Stack order k is sufficient; the top
// derivative enters only through the Jacobian term.
std::vector<ScrewVec> loop_constraint_map(const Chain& c, const DerivativeStack& st, int k);

// ---- tangent cone membership ------------------------------------------------

enum class ConeVerdict { Member, NonMember, Undecided };

struct ConeOrderResult {
  int order = 0;
  double residual = 0.0;        // least-squares infeasibility of this order
  ConeVerdict verdict = ConeVerdict::Undecided;
};

struct ConeResult {
  std::vector<ConeOrderResult> orders;  // one entry per tested order
  ConeVerdict final_verdict = ConeVerdict::Undecided;
  int decided_at = 0;                   // order where the verdict was reached
  MatX first_order_kernel;              // n x dim basis of { x : J x = 0 }

  // Higher joint derivatives found while certifying membership; entry l-1
  // holds the order-(l) derivative vector (entry 0 is x itself).
  std::vector<VecX> witness;
};

// Decide whether the velocity vector x is tangent to the configuration
// variety of the closed chain at q, to the given order. Order 1 checks
// J x = 0. Each higher order r asks for joint derivative vectors that kill
// the r-th constraint derivative; the top two derivative levels enter that
// equation affinely, so feasibility is a linear least-squares problem over
// them with all deeper levels frozen at previously found witnesses. A
// residual below tol certifies membership; a residual above tol at order 2
// certifies exclusion (there is no free lower level), while at order >= 3 it
// is reported Undecided since frozen witnesses may hide a feasible choice.
ConeResult tangent_cone_membership(const Chain& c, const VecX& q, const VecX& x,
                                   int max_order,
                                   const Tolerances& tol = Tolerances::from_env());

// ---- rank strata ------------------------------------------------------------

struct RankStratumResult {
  ConeResult cone;                       // closure feasibility bookkeeping
  std::vector<double> minor_residuals;   // max |minor derivative| per order
  ConeVerdict final_verdict = ConeVerdict::Undecided;
  int decided_at = 0;
};

// Membership of x in the order-i approximation of the stratum where the loop
// stays closed and all k x k minors of the Jacobian stay zero. The closure
// part reuses the cone machinery; the minor equations are evaluated at the
// witness stack and, when nonzero, a short Gauss-Newton pass over the free
// parameters of the current feasibility family tries to zero them before a
// verdict is made. Exclusions are certified at order 1 only (both maps there
// depend on x alone); later failures return Undecided.
RankStratumResult rank_stratum_membership(const Chain& c, const VecX& q, const VecX& x,
                                          int k_rank, int max_order,
                                          const Tolerances& tol = Tolerances::from_env());

// Polynomial system cutting out the order-K local model of the rank stratum:
// the truncated closure equations plus the truncated expansions of all
// k_rank x k_rank minors.
PolySystem rank_stratum_poly_system(const Chain& c, const VecX& q, int k_rank, int K,
                                    double drop_tol = 1e-12);

// ---- closure algebra and structural mobility ---------------------------------

struct ClosureAlgebra {
  MatX basis;   // 6 x g orthonormal
  int g = 0;    // dimension
  int depth = 0;  // bracket generations actually needed (0..3)
};

// Smallest bracket-closed subspace containing the given screws. Nested
// brackets of depth three always suffice to saturate; generation stops as
// soon as the rank stalls.
ClosureAlgebra closure_algebra(const std::vector<ScrewVec>& screws,
                               const Tolerances& tol = Tolerances::from_env());

struct MobilityEstimate {
  std::vector<ClosureAlgebra> per_loop;
  int total_joint_dof = 0;
  int delta = 0;                    // total dof minus sum of loop algebra dims
  bool paradox_candidate = false;   // delta <= 0: motion may still exist
};

// Structural mobility estimate for a mechanism given its independent loops
// (each as a chain of the traversed joints, in reference configuration).
// total_joint_dof counts distinct joints once even when loops share them.
MobilityEstimate structural_mobility(const std::vector<Chain>& loops, int total_joint_dof);

// Row-reduced Jacobian of the closed chain: the full 6 x n Jacobian projected
// onto the closure algebra of the joint screws. Removes rows that are
// identically dependent for every configuration, never configuration-specific
// rank loss.
MatX reduce_constraints(const Chain& c, const VecX& q,
                        const Tolerances& tol = Tolerances::from_env());

}  // namespace screwkin
