#include "screwkin/ik.hpp"

#include <limits>
#include <stdexcept>

namespace screwkin {

IkResult ik_joint_derivatives(const Chain& c, const VecX& q,
                              const std::vector<ScrewVec>& task, int k,
                              const Tolerances& tol) {
  const int n = c.n();
  if (static_cast<int>(q.size()) != n) throw std::invalid_argument("q has wrong size");
  if (k < 1 || k > kMaxDerivativeOrder) throw std::invalid_argument("order out of range");
  if (static_cast<int>(task.size()) < k) {
    throw std::invalid_argument("need the twist and its derivatives through order k-1");
  }

  const MatX J = jacobian_spatial(c, q, n);
  Eigen::JacobiSVD<MatX> svd(J);
  const auto& sv = svd.singularValues();
  IkResult out;
  out.sigma_min = sv[sv.size() - 1];
  out.condition_number =
      out.sigma_min > 0.0 ? sv[0] / out.sigma_min : std::numeric_limits<double>::infinity();
  if (!(out.condition_number < tol.condition_gate)) {
    throw NumericError("Jacobian condition " + std::to_string(out.condition_number) +
                       " exceeds the solve gate (smallest singular value " +
                       std::to_string(out.sigma_min) + ")");
  }
  // One factorization for every order; minimum-norm solution when redundant.
  Eigen::CompleteOrthogonalDecomposition<MatX> cod(J);

  out.stack.q = q;
  for (int r = 1; r <= k; ++r) {
    ScrewVec rhs = task[static_cast<size_t>(r) - 1];
    if (r > 1) {
      // Subtract the screw-rate terms, which depend on joint derivatives
      // already solved (orders 1..r-1 only).
      DerivativeStack st = out.stack;
      st.derivs.push_back(VecX::Zero(n));
      const TwistDerivs td = twist_derivatives_recursive(c, st, r - 1);
      for (int i = 1; i <= n; ++i) {
        for (int l = 1; l <= r - 1; ++l) {
          rhs -= binomial(r - 1, l) * td.S[static_cast<size_t>(i) - 1][static_cast<size_t>(l)] *
                 out.stack.deriv(r - l)[i - 1];
        }
      }
    }
    out.stack.derivs.push_back(cod.solve(rhs));
  }
  return out;
}

namespace {

ScrewVec at(const std::vector<std::vector<ScrewVec>>& body_twists, int i, int l) {
  if (i == 0) return ScrewVec::Zero();  // the ground does not move
  return body_twists[static_cast<size_t>(i) - 1].at(static_cast<size_t>(l));
}

}  // namespace

DerivativeStack ik_per_joint(const Chain& c, const VecX& q,
                             const std::vector<std::vector<ScrewVec>>& body_twists,
                             int k) {
  const int n = c.n();
  if (static_cast<int>(q.size()) != n) throw std::invalid_argument("q has wrong size");
  if (k < 0 || k > 3) throw std::invalid_argument("per-joint forms cover orders 0..3");
  if (static_cast<int>(body_twists.size()) != n) {
    throw std::invalid_argument("need a twist set per body");
  }
  for (const auto& set : body_twists) {
    if (static_cast<int>(set.size()) < k + 1) {
      throw std::invalid_argument("body twist sets too shallow for requested order");
    }
  }

  const auto S = joint_screws_spatial(c, q);
  DerivativeStack out;
  out.q = q;
  out.derivs.assign(static_cast<size_t>(k) + 1, VecX::Zero(n));

  for (int i = 1; i <= n; ++i) {
    const ScrewVec& Si = S[static_cast<size_t>(i) - 1];
    const double nrm2 = Si.squaredNorm();  // >= 1 for unit screws
    auto project = [&](const ScrewVec& v) { return Si.dot(v) / nrm2; };

    const double qd = project(at(body_twists, i, 0) - at(body_twists, i - 1, 0));
    out.derivs[0][i - 1] = qd;
    if (k < 1) continue;

    // Operator polynomials in the twist rates of body i applied to its screw;
    // identical to the ones in the forward closed forms.
    const ScrewVec w1 = screw_bracket(at(body_twists, i, 0), Si);
    const double qdd = project(at(body_twists, i, 1) - at(body_twists, i - 1, 1) - qd * w1);
    out.derivs[1][i - 1] = qdd;
    if (k < 2) continue;

    const ScrewVec w2 =
        screw_bracket(at(body_twists, i, 1), Si) + screw_bracket(at(body_twists, i, 0), w1);
    const double qddd = project(at(body_twists, i, 2) - at(body_twists, i - 1, 2) -
                                2.0 * qdd * w1 - qd * w2);
    out.derivs[2][i - 1] = qddd;
    if (k < 3) continue;

    const ScrewVec w3 = screw_bracket(at(body_twists, i, 2), Si) +
                        2.0 * screw_bracket(at(body_twists, i, 1), w1) +
                        screw_bracket(at(body_twists, i, 0), w2);
    out.derivs[3][i - 1] = project(at(body_twists, i, 3) - at(body_twists, i - 1, 3) -
                                   3.0 * qddd * w1 - 3.0 * qdd * w2 - qd * w3);
  }
  return out;
}

VecX ik_per_joint_accel_geometric(const Chain& c, const VecX& q,
                                  const std::vector<std::vector<ScrewVec>>& body_twists) {
  const int n = c.n();
  if (static_cast<int>(q.size()) != n) throw std::invalid_argument("q has wrong size");
  if (static_cast<int>(body_twists.size()) != n) {
    throw std::invalid_argument("need a twist set per body");
  }
  const auto S = joint_screws_spatial(c, q);
  VecX qdd(n);
  for (int i = 1; i <= n; ++i) {
    const ScrewVec& Si = S[static_cast<size_t>(i) - 1];
    const double nrm2 = Si.squaredNorm();
    const double qd = Si.dot(at(body_twists, i, 0) - at(body_twists, i - 1, 0)) / nrm2;
    // The bracket correction projected on the screw reduces to the moment of
    // the axis against the body's linear velocity.
    const Vec3 moment = angular(Si).cross(linear(Si));
    const double corr = qd * moment.dot(linear(at(body_twists, i, 0))) / nrm2;
    qdd[i - 1] =
        Si.dot(at(body_twists, i, 1) - at(body_twists, i - 1, 1)) / nrm2 - corr;
  }
  return qdd;
}

}  // namespace screwkin
