#include "screwkin/mobility.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "screwkin/minors.hpp"

namespace screwkin {

std::vector<ScrewVec> loop_constraint_map(const Chain& c, const DerivativeStack& st, int k) {
  if (k < 1 || k > kMaxDerivativeOrder) {
    throw std::invalid_argument("constraint order out of range");
  }
  if (st.order() < k) throw std::invalid_argument("stack order too low");
  // The top joint derivative only feeds the last twist derivative, so pad one
  // zero level to satisfy the generic engine.
  DerivativeStack padded = st;
  padded.derivs.push_back(VecX::Zero(c.n()));
  const TwistDerivs td = twist_derivatives_recursive(c, padded, k - 1);
  std::vector<ScrewVec> H(static_cast<size_t>(k));
  for (int i = 1; i <= k; ++i) {
    H[static_cast<size_t>(i) - 1] = td.V[static_cast<size_t>(c.n()) - 1][static_cast<size_t>(i) - 1];
  }
  return H;
}

namespace {

// Shared state of the order-by-order feasibility march.
struct ConeCore {
  const Chain* chain = nullptr;
  VecX q;
  MatX J;                      // 6 x n end-link Jacobian
  Eigen::JacobiSVD<MatX> Jsvd;
  MatX kernel;                 // n x d basis of ker J
  std::vector<VecX> witness;   // witness[l-1] = found q^(l); witness[0] = x
  double length_scale = 1.0;
  double x_scale = 1.0;
};

ScrewVec constraint_top(const ConeCore& core, int order, const std::vector<VecX>& derivs) {
  DerivativeStack st;
  st.q = core.q;
  st.derivs = derivs;
  return loop_constraint_map(*core.chain, st, order).back();
}

double order_tolerance(const ConeCore& core, const Tolerances& tol, int r) {
  return tol.cone * core.length_scale * std::pow(core.x_scale, r);
}

ConeCore make_core(const Chain& c, const VecX& q, const VecX& x, const Tolerances& tol) {
  if (static_cast<int>(q.size()) != c.n() || static_cast<int>(x.size()) != c.n()) {
    throw std::invalid_argument("q or x has wrong size");
  }
  ConeCore core;
  core.chain = &c;
  core.q = q;
  core.length_scale = c.characteristic_length();
  core.x_scale = std::max(1.0, x.norm());
  const double closure = (kinematic_map(c, q, c.n()).matrix() - Mat4::Identity()).norm();
  if (closure > tol.loop_closure * core.length_scale) {
    throw NumericError("configuration does not close the loop (residual " +
                       std::to_string(closure) + ")");
  }
  core.J = jacobian_spatial(c, q, c.n());
  core.Jsvd.compute(core.J, Eigen::ComputeThinU | Eigen::ComputeFullV);
  core.Jsvd.setThreshold(tol.svd_rank_rel);
  const auto& sv = core.Jsvd.singularValues();
  int rank = 0;
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (smax > 0.0 && sv[i] > tol.svd_rank_rel * smax) ++rank;
  }
  core.kernel = core.Jsvd.matrixV().rightCols(c.n() - rank);
  core.witness = {x};
  return core;
}

// One order of the feasibility march. Order 1 is a direct evaluation; order
// r >= 2 solves for the top derivative, jointly with a correction of the
// level below when that level is itself free (r >= 3). Both enter affinely,
// the lower level through a coefficient matrix probed exactly by unit steps.
ConeOrderResult advance_order(ConeCore& core, int r, const Tolerances& tol) {
  const int n = core.chain->n();
  ConeOrderResult res;
  res.order = r;
  const double gate = order_tolerance(core, tol, r);

  if (r == 1) {
    res.residual = (core.J * core.witness[0]).norm();
    res.verdict = res.residual < gate ? ConeVerdict::Member : ConeVerdict::NonMember;
    return res;
  }

  std::vector<VecX> derivs(core.witness.begin(), core.witness.end());
  derivs.resize(static_cast<size_t>(r), VecX::Zero(n));
  const ScrewVec h_base = constraint_top(core, r, derivs);

  if (r == 2) {
    const VecX w = core.Jsvd.solve(-h_base);
    res.residual = (core.J * w + h_base).norm();
    res.verdict = res.residual < gate ? ConeVerdict::Member : ConeVerdict::NonMember;
    if (res.verdict == ConeVerdict::Member) core.witness.push_back(w);
    return res;
  }

  // Residual of the already-certified previous level at its witness.
  std::vector<VecX> prev_derivs(derivs.begin(), derivs.end() - 1);
  const ScrewVec h_prev = constraint_top(core, r - 1, prev_derivs);

  MatX A(6, n);
  for (int j = 0; j < n; ++j) {
    std::vector<VecX> probe = derivs;
    probe[static_cast<size_t>(r) - 2][j] += 1.0;
    A.col(j) = constraint_top(core, r, probe) - h_base;
  }

  MatX M = MatX::Zero(12, 2 * n);
  M.topLeftCorner(6, n) = core.J;
  M.bottomLeftCorner(6, n) = A;
  M.bottomRightCorner(6, n) = core.J;
  VecX rhs(12);
  rhs.head(6) = -h_prev;
  rhs.tail(6) = -h_base;
  Eigen::JacobiSVD<MatX> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(tol.svd_rank_rel);
  const VecX uw = svd.solve(rhs);
  res.residual = (M * uw - rhs).norm();
  res.verdict = res.residual < gate ? ConeVerdict::Member : ConeVerdict::Undecided;
  if (res.verdict == ConeVerdict::Member) {
    core.witness[static_cast<size_t>(r) - 2] += uw.head(n);
    core.witness.push_back(uw.tail(n));
  }
  return res;
}

}  // namespace

ConeResult tangent_cone_membership(const Chain& c, const VecX& q, const VecX& x,
                                   int max_order, const Tolerances& tol) {
  if (max_order < 1 || max_order > kMaxDerivativeOrder) {
    throw std::invalid_argument("max_order out of range");
  }
  ConeCore core = make_core(c, q, x, tol);
  ConeResult out;
  out.first_order_kernel = core.kernel;
  for (int r = 1; r <= max_order; ++r) {
    const ConeOrderResult res = advance_order(core, r, tol);
    out.orders.push_back(res);
    if (res.verdict != ConeVerdict::Member) {
      out.final_verdict = res.verdict;
      out.decided_at = r;
      out.witness = core.witness;
      return out;
    }
  }
  out.final_verdict = ConeVerdict::Member;
  out.decided_at = max_order;
  out.witness = core.witness;
  return out;
}

namespace {

// Largest k-minor derivative magnitude at the witness stack.
double minor_residual(const ConeCore& core, const std::vector<MinorIndex>& minors, int r) {
  DerivativeStack st;
  st.q = core.q;
  st.derivs = core.witness;
  while (st.order() < r + 1) st.derivs.push_back(VecX::Zero(core.chain->n()));
  const TwistDerivs td = twist_derivatives_recursive(*core.chain, st, r);
  double worst = 0.0;
  for (const auto& idx : minors) {
    worst = std::max(worst, std::abs(minor_time_derivative(td, idx, r)));
  }
  return worst;
}

}  // namespace

RankStratumResult rank_stratum_membership(const Chain& c, const VecX& q, const VecX& x,
                                          int k_rank, int max_order, const Tolerances& tol) {
  if (max_order < 1 || max_order > kMaxDerivativeOrder) {
    throw std::invalid_argument("max_order out of range");
  }
  if (k_rank < 1 || k_rank > 6) throw std::invalid_argument("minor size out of range");
  ConeCore core = make_core(c, q, x, tol);
  const auto minors = MinorIndex::all(c.n(), k_rank);

  RankStratumResult out;
  out.cone.first_order_kernel = core.kernel;
  const double mgate_base = tol.cone * std::pow(core.length_scale, k_rank);

  for (int r = 1; r <= max_order; ++r) {
    const ConeOrderResult res = advance_order(core, r, tol);
    out.cone.orders.push_back(res);
    if (res.verdict != ConeVerdict::Member) {
      out.final_verdict = res.verdict;
      out.decided_at = r;
      break;
    }

    const double mgate = mgate_base * std::pow(core.x_scale, r);
    double mres = minor_residual(core, minors, r);
    if (mres >= mgate && r >= 2 && core.kernel.cols() > 0) {
      // Try to absorb the minor defect with the order-r freedom that keeps
      // every closure equation intact: kernel directions of J added to the
      // top witness. Short Gauss-Newton with a numeric Jacobian.
      const int d = static_cast<int>(core.kernel.cols());
      const VecX w0 = core.witness[static_cast<size_t>(r) - 1];
      auto eval = [&](const VecX& z) {
        core.witness[static_cast<size_t>(r) - 1] = w0 + core.kernel * z;
        VecX R(static_cast<Eigen::Index>(minors.size()));
        DerivativeStack st;
        st.q = core.q;
        st.derivs = core.witness;
        while (st.order() < r + 1) st.derivs.push_back(VecX::Zero(c.n()));
        const TwistDerivs td = twist_derivatives_recursive(c, st, r);
        for (size_t i = 0; i < minors.size(); ++i) {
          R[static_cast<Eigen::Index>(i)] = minor_time_derivative(td, minors[i], r);
        }
        return R;
      };
      VecX z = VecX::Zero(d);
      for (int it = 0; it < 5; ++it) {
        const VecX R = eval(z);
        if (R.lpNorm<Eigen::Infinity>() < mgate) break;
        MatX Jz(R.size(), d);
        const double step = 1e-6 * std::max(1.0, w0.norm());
        for (int j = 0; j < d; ++j) {
          VecX zp = z;
          zp[j] += step;
          Jz.col(j) = (eval(zp) - R) / step;
        }
        Eigen::JacobiSVD<MatX> svd(Jz, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        z -= svd.solve(R);
      }
      mres = eval(z).lpNorm<Eigen::Infinity>();
      if (mres >= mgate) core.witness[static_cast<size_t>(r) - 1] = w0;
    }
    out.minor_residuals.push_back(mres);

    if (mres >= mgate) {
      // Order 1 depends on x alone, so failure there is conclusive; beyond
      // that the unexplored freedom leaves the question open.
      out.final_verdict = (r == 1) ? ConeVerdict::NonMember : ConeVerdict::Undecided;
      out.decided_at = r;
      break;
    }
    if (r == max_order) {
      out.final_verdict = ConeVerdict::Member;
      out.decided_at = max_order;
    }
  }
  out.cone.witness = core.witness;
  if (!out.cone.orders.empty()) {
    out.cone.final_verdict = out.cone.orders.back().verdict;
    out.cone.decided_at = out.cone.orders.back().order;
  }
  return out;
}

PolySystem rank_stratum_poly_system(const Chain& c, const VecX& q, int k_rank, int K,
                                    double drop_tol) {
  if (k_rank < 1 || k_rank > 6) throw std::invalid_argument("minor size out of range");
  PolySystem ps = cspace_poly_system(c, q, K, drop_tol);
  const int n = c.n();

  // Append the truncated expansion of every k-minor: coefficients extracted
  // the same way as for the closure rows, by exact finite differences of the
  // homogeneous minor differentials on integer points.
  const auto minors = MinorIndex::all(n, k_rank);
  std::vector<PolySystem::Poly> rows(minors.size());
  for (size_t mi = 0; mi < minors.size(); ++mi) {
    const double m0 = minor_value(c, q, minors[mi]);
    if (std::abs(m0) >= drop_tol) {
      rows[mi].terms.push_back({m0, std::vector<int>(static_cast<size_t>(n), 0)});
    }
  }
  std::map<std::vector<int>, std::vector<std::vector<double>>> probe;  // point -> [k][minor]
  for (int k = 0; k <= K; ++k) {
    for (const auto& m : MultiIndex::all_of_norm(n, k)) probe[m.a] = {};
  }
  for (auto& [pt, vals] : probe) {
    VecX xs(n);
    for (int j = 0; j < n; ++j) xs[j] = pt[static_cast<size_t>(j)];
    vals.assign(static_cast<size_t>(K), std::vector<double>(minors.size(), 0.0));
    for (int k = 1; k <= K; ++k) {
      for (size_t mi = 0; mi < minors.size(); ++mi) {
        vals[static_cast<size_t>(k) - 1][mi] = minor_differential(c, q, minors[mi], k, xs);
      }
    }
  }
  for (int k = 1; k <= K; ++k) {
    const double wk = factorial(k);
    for (const auto& m : MultiIndex::all_of_norm(n, k)) {
      std::vector<double> acc(minors.size(), 0.0);
      std::vector<int> s(static_cast<size_t>(n), 0);
      auto rec = [&](auto&& self, int slot, int parity) -> void {
        if (slot == n) {
          double w = (parity % 2 == 0) ? 1.0 : -1.0;
          for (int j = 0; j < n; ++j) {
            w *= binomial(m.a[static_cast<size_t>(j)], s[static_cast<size_t>(j)]);
          }
          const auto& vals = probe.at(s)[static_cast<size_t>(k) - 1];
          for (size_t mi = 0; mi < minors.size(); ++mi) acc[mi] += w * vals[mi];
          return;
        }
        for (int v = 0; v <= m.a[static_cast<size_t>(slot)]; ++v) {
          s[static_cast<size_t>(slot)] = v;
          self(self, slot + 1, parity + (m.a[static_cast<size_t>(slot)] - v));
        }
      };
      rec(rec, 0, 0);
      for (size_t mi = 0; mi < minors.size(); ++mi) {
        const double coeff = acc[mi] / (m.factorial() * wk);
        if (std::abs(coeff) >= drop_tol) rows[mi].terms.push_back({coeff, m.a});
      }
    }
  }
  for (auto& row : rows) {
    if (!row.terms.empty()) ps.polys.push_back(std::move(row));
  }
  return ps;
}

ClosureAlgebra closure_algebra(const std::vector<ScrewVec>& screws, const Tolerances& tol) {
  ClosureAlgebra out;
  const int m = static_cast<int>(screws.size());
  out.basis = MatX::Zero(6, 0);
  if (m == 0) return out;

  auto orthonormalize = [&](const MatX& cols, int& rank) {
    Eigen::JacobiSVD<MatX> svd(cols, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (smax > 0.0 && sv[i] > tol.svd_rank_rel * smax) ++rank;
    }
    return MatX(svd.matrixU().leftCols(rank));
  };

  MatX gen(6, m);
  for (int i = 0; i < m; ++i) gen.col(i) = screws[static_cast<size_t>(i)];
  int rank = 0;
  MatX basis = orthonormalize(gen, rank);

  // Grow by bracketing the generators against the current span; three
  // generations saturate any bracket-closed subspace reachable from screws.
  for (int d = 1; d <= 3 && rank < 6 && rank > 0; ++d) {
    MatX aug(6, rank + m * rank);
    aug.leftCols(rank) = basis;
    int col = rank;
    for (int i = 0; i < m; ++i) {
      for (int b = 0; b < rank; ++b) {
        aug.col(col++) = screw_bracket(screws[static_cast<size_t>(i)], basis.col(b));
      }
    }
    int newRank = 0;
    MatX nb = orthonormalize(aug, newRank);
    if (newRank == rank) break;
    basis = nb;
    rank = newRank;
    out.depth = d;
  }
  out.basis = basis;
  out.g = rank;
  return out;
}

MobilityEstimate structural_mobility(const std::vector<Chain>& loops, int total_joint_dof) {
  MobilityEstimate me;
  me.total_joint_dof = total_joint_dof;
  int gsum = 0;
  for (const auto& lc : loops) {
    std::vector<ScrewVec> ys;
    ys.reserve(static_cast<size_t>(lc.n()));
    for (int j = 1; j <= lc.n(); ++j) ys.push_back(lc.reference_screw(j));
    me.per_loop.push_back(closure_algebra(ys));
    gsum += me.per_loop.back().g;
  }
  me.delta = total_joint_dof - gsum;
  me.paradox_candidate = me.delta <= 0;
  return me;
}

MatX reduce_constraints(const Chain& c, const VecX& q, const Tolerances& tol) {
  std::vector<ScrewVec> ys;
  ys.reserve(static_cast<size_t>(c.n()));
  for (int j = 1; j <= c.n(); ++j) ys.push_back(c.reference_screw(j));
  const ClosureAlgebra alg = closure_algebra(ys, tol);
  return alg.basis.transpose() * jacobian_spatial(c, q, c.n());
}

}  // namespace screwkin
