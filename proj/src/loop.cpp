#include "screwkin/loop.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace screwkin {

double closure_residual(const Chain& c, const VecX& q) {
  return (kinematic_map(c, q, c.n()).matrix() - Mat4::Identity()).norm();
}

CoordinateSplit select_split(const Chain& c, const VecX& q, const Tolerances& tol) {
  const MatX Jred = reduce_constraints(c, q, tol);
  const int g = static_cast<int>(Jred.rows());
  const int n = c.n();
  if (g >= n) {
    throw NumericError("no independent coordinates: constraint space dimension " +
                       std::to_string(g) + " with " + std::to_string(n) + " joints");
  }
  Eigen::ColPivHouseholderQR<MatX> qr(Jred);
  const auto perm = qr.colsPermutation().indices();
  CoordinateSplit split;
  for (int i = 0; i < n; ++i) {
    (i < g ? split.dependent : split.independent).push_back(perm[i] + 1);
  }
  std::sort(split.dependent.begin(), split.dependent.end());
  std::sort(split.independent.begin(), split.independent.end());
  return split;
}

namespace {

MatX cols(const MatX& m, const std::vector<int>& idx) {
  MatX out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j] - 1);
  }
  return out;
}

}  // namespace

LoopDerivatives loop_derivatives(const Chain& c, const VecX& q, const CoordinateSplit& split,
                                 const std::vector<VecX>& u_derivs, int k,
                                 bool allow_pseudoinverse, const Tolerances& tol) {
  const int n = c.n();
  if (static_cast<int>(q.size()) != n) throw std::invalid_argument("q has wrong size");
  if (k < 1 || k > kMaxDerivativeOrder) throw std::invalid_argument("order out of range");

  const double L = c.characteristic_length();
  const double closure = closure_residual(c, q);
  if (closure > tol.loop_closure * L) {
    throw NumericError("configuration does not close the loop (residual " +
                       std::to_string(closure) + ")");
  }

  LoopDerivatives out;
  out.split = split;
  out.reduced_jacobian = reduce_constraints(c, q, tol);
  const int g = static_cast<int>(out.reduced_jacobian.rows());
  const int nu = n - g;

  std::vector<bool> seen(static_cast<size_t>(n), false);
  auto mark = [&](const std::vector<int>& idx) {
    for (int j : idx) {
      if (j < 1 || j > n || seen[static_cast<size_t>(j) - 1]) {
        throw std::invalid_argument("split is not a partition of the joint indices");
      }
      seen[static_cast<size_t>(j) - 1] = true;
    }
  };
  mark(split.dependent);
  mark(split.independent);
  if (static_cast<int>(split.dependent.size()) != g) {
    throw std::invalid_argument("dependent block must match the constraint dimension " +
                                std::to_string(g));
  }
  if (static_cast<int>(u_derivs.size()) < k) {
    throw std::invalid_argument("need independent derivatives through order k");
  }
  for (const auto& u : u_derivs) {
    if (static_cast<int>(u.size()) != nu) {
      throw std::invalid_argument("independent derivative has wrong size");
    }
  }

  // Inverse (or pseudoinverse) of the dependent block at q.
  const MatX Jd0 = cols(out.reduced_jacobian, split.dependent);
  Eigen::JacobiSVD<MatX> svd(Jd0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  out.cond_dependent = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[0] > 0.0 && sv[i] > tol.svd_rank_rel * sv[0]) ++rank;
  }
  MatX Jd_inv;
  if (rank == g && out.cond_dependent < tol.condition_gate) {
    Jd_inv = Jd0.inverse();
  } else if (allow_pseudoinverse) {
    out.used_pseudoinverse = true;
    VecX inv_sv = VecX::Zero(sv.size());
    for (int i = 0; i < rank; ++i) inv_sv[i] = 1.0 / sv[i];
    Jd_inv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  } else {
    throw NumericError("dependent block is singular or ill-conditioned (condition " +
                       std::to_string(out.cond_dependent) + "); pick another split");
  }

  // Order-by-order resolution. At the top of round r everything of order
  // r-1 is known: the joint derivatives, the Jacobian derivative, the
  // inverse-block derivative and the dependency matrix derivative. Round r
  // assembles the dependent derivative from the binomial sum over dependency
  // matrix rates against independent derivatives.
  std::vector<MatX> DJ;   // derivatives of the reduced Jacobian
  std::vector<MatX> Ei;   // derivatives of the inverse dependent block
  std::vector<MatX> DD;   // derivatives of the dependency matrix
  DJ.push_back(out.reduced_jacobian);
  Ei.push_back(Jd_inv);
  DD.push_back(-Jd_inv * cols(out.reduced_jacobian, split.independent));

  out.stack.q = q;

  std::vector<ScrewVec> ys;
  for (int j = 1; j <= n; ++j) ys.push_back(c.reference_screw(j));
  const ClosureAlgebra alg = closure_algebra(ys, tol);

  for (int r = 1; r <= k; ++r) {
    // Dependent derivative of order r from rates of the dependency matrix.
    VecX d_r = VecX::Zero(g);
    for (int l = 0; l <= r - 1; ++l) {
      d_r += binomial(r - 1, l) * DD[static_cast<size_t>(l)] *
             u_derivs[static_cast<size_t>(r - l) - 1];
    }
    VecX q_r = VecX::Zero(n);
    for (size_t j = 0; j < split.dependent.size(); ++j) {
      q_r[split.dependent[j] - 1] = d_r[static_cast<Eigen::Index>(j)];
    }
    for (size_t j = 0; j < split.independent.size(); ++j) {
      q_r[split.independent[j] - 1] = u_derivs[static_cast<size_t>(r) - 1][static_cast<Eigen::Index>(j)];
    }
    out.stack.derivs.push_back(q_r);
    if (r == k) break;

    // Prepare order r of the matrix recursions for the next round.
    DerivativeStack st = out.stack;
    st.derivs.push_back(VecX::Zero(n));
    const TwistDerivs td = twist_derivatives_recursive(c, st, r);
    MatX DJr(g, n);
    for (int j = 1; j <= n; ++j) {
      DJr.col(j - 1) =
          alg.basis.transpose() * td.S[static_cast<size_t>(j) - 1][static_cast<size_t>(r)];
    }
    DJ.push_back(DJr);

    MatX Er = MatX::Zero(g, g);
    for (int m = 1; m <= r; ++m) {
      Er -= binomial(r, m) * Jd_inv * cols(DJ[static_cast<size_t>(m)], split.dependent) *
            Ei[static_cast<size_t>(r - m)];
    }
    Ei.push_back(Er);

    MatX DDr = MatX::Zero(g, nu);
    for (int m = 0; m <= r; ++m) {
      DDr -= binomial(r, m) * Ei[static_cast<size_t>(m)] *
             cols(DJ[static_cast<size_t>(r - m)], split.independent);
    }
    DD.push_back(DDr);
  }
  return out;
}

VecX loop_taylor_motion(const DerivativeStack& stack, double t) {
  VecX q = stack.q;
  double tp = 1.0;
  for (int l = 1; l <= stack.order(); ++l) {
    tp *= t / l;
    q += stack.deriv(l) * tp;
  }
  return q;
}

}  // namespace screwkin
