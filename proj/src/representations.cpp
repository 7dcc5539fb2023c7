#include "screwkin/representations.hpp"

#include <stdexcept>

#include "screwkin/screw.hpp"

namespace screwkin {

namespace {

void check_link(const Chain& c, int i) {
  if (i < 1 || i > c.n()) throw std::invalid_argument("link index out of range");
}

void check_order(int k, int kmax) {
  if (k < 0 || k > kmax) throw std::invalid_argument("derivative order out of range");
}

}  // namespace

std::vector<ScrewVec> joint_screws_body(const Chain& c, const VecX& q, int i) {
  check_link(c, i);
  const Mat6 AdCinv = adjoint(link_pose(c, q, i).inverse());
  const auto S = joint_screws_spatial(c, q);
  std::vector<ScrewVec> B;
  B.reserve(static_cast<size_t>(i));
  for (int j = 1; j <= i; ++j) B.push_back(AdCinv * S[static_cast<size_t>(j) - 1]);
  return B;
}

MatX jacobian_body(const Chain& c, const VecX& q, int i) {
  const auto B = joint_screws_body(c, q, i);
  MatX J = MatX::Zero(6, c.n());
  for (int j = 1; j <= i; ++j) J.col(j - 1) = B[static_cast<size_t>(j) - 1];
  return J;
}

ScrewVec body_twist(const Chain& c, const VecX& q, const VecX& qdot, int i) {
  if (static_cast<int>(qdot.size()) != c.n()) {
    throw std::invalid_argument("qdot has wrong size");
  }
  const auto B = joint_screws_body(c, q, i);
  ScrewVec v = ScrewVec::Zero();
  for (int j = 1; j <= i; ++j) v += B[static_cast<size_t>(j) - 1] * qdot[j - 1];
  return v;
}

ScrewVec partial_screw_body(const Chain& c, const VecX& q, int i, int j,
                            const MultiIndex& a) {
  check_link(c, i);
  if (j < 1 || j > i) throw std::invalid_argument("joint index out of range");
  if (a.size() != c.n()) {
    throw std::invalid_argument("multi-index size does not match chain");
  }
  // A body-frame screw moves only under the joints between it and the link
  // frame carrying it, so derivatives in variables at or below j, or above i,
  // vanish identically.
  for (int m = 1; m <= c.n(); ++m) {
    if (a.a[static_cast<size_t>(m) - 1] > 0 && (m <= j || m > i)) {
      return ScrewVec::Zero();
    }
  }
  const auto B = joint_screws_body(c, q, i);
  ScrewVec r = B[static_cast<size_t>(j) - 1];
  // Nested brackets with ascending joint order, lowest index innermost; each
  // differentiation contributes one sign flip.
  for (int m = j + 1; m <= i; ++m) {
    for (int rep = 0; rep < a.a[static_cast<size_t>(m) - 1]; ++rep) {
      r = screw_bracket(B[static_cast<size_t>(m) - 1], r);
    }
  }
  return (a.norm() % 2 == 0) ? r : ScrewVec(-r);
}

std::vector<ScrewVec> body_twist_derivatives(const Chain& c, const DerivativeStack& st,
                                             int i, int k) {
  check_link(c, i);
  check_order(k, kMaxDerivativeOrder);
  if (static_cast<int>(st.q.size()) != c.n()) {
    throw std::invalid_argument("stack q has wrong size");
  }
  if (st.order() < k + 1) {
    throw std::invalid_argument("stack order " + std::to_string(st.order()) +
                                ", need at least " + std::to_string(k + 1));
  }

  // B[j][l]: l-th rate of the body-frame screw of joint j. R[j][l]: l-th rate
  // of the relative twist of the link with respect to body j-1, in the link
  // frame. The screw rate is a bracket binomial against the relative twist
  // one level down; the relative twist accumulates joint tails.
  const auto B0 = joint_screws_body(c, st.q, i);
  std::vector<std::vector<ScrewVec>> B(static_cast<size_t>(i),
                                       std::vector<ScrewVec>(static_cast<size_t>(k) + 1));
  std::vector<std::vector<ScrewVec>> R(static_cast<size_t>(i),
                                       std::vector<ScrewVec>(static_cast<size_t>(k) + 1));
  for (int j = 1; j <= i; ++j) B[static_cast<size_t>(j) - 1][0] = B0[static_cast<size_t>(j) - 1];
  {
    ScrewVec acc = ScrewVec::Zero();
    for (int j = i; j >= 1; --j) {
      acc += B[static_cast<size_t>(j) - 1][0] * st.deriv(1)[j - 1];
      R[static_cast<size_t>(j) - 1][0] = acc;
    }
  }
  for (int l = 1; l <= k; ++l) {
    for (int j = 1; j <= i; ++j) {
      auto& Bj = B[static_cast<size_t>(j) - 1];
      const auto& Rj = R[static_cast<size_t>(j) - 1];
      ScrewVec s = ScrewVec::Zero();
      for (int m = 0; m <= l - 1; ++m) {
        s += binomial(l - 1, m) *
             screw_bracket(Bj[static_cast<size_t>(m)], Rj[static_cast<size_t>(l - 1 - m)]);
      }
      Bj[static_cast<size_t>(l)] = s;
    }
    ScrewVec acc = ScrewVec::Zero();
    for (int j = i; j >= 1; --j) {
      const auto& Bj = B[static_cast<size_t>(j) - 1];
      for (int m = 0; m <= l; ++m) {
        acc += binomial(l, m) * Bj[static_cast<size_t>(m)] * st.deriv(l - m + 1)[j - 1];
      }
      R[static_cast<size_t>(j) - 1][static_cast<size_t>(l)] = acc;
    }
  }

  std::vector<ScrewVec> out;
  out.reserve(static_cast<size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) out.push_back(R[0][static_cast<size_t>(l)]);
  return out;
}

std::vector<ScrewVec> joint_screws_hybrid(const Chain& c, const VecX& q, int i) {
  check_link(c, i);
  const Vec3 r = link_pose(c, q, i).r;
  const Mat6 T = Mat6::Identity() - ad_translation(r);
  const auto S = joint_screws_spatial(c, q);
  std::vector<ScrewVec> H;
  H.reserve(static_cast<size_t>(i));
  for (int j = 1; j <= i; ++j) H.push_back(T * S[static_cast<size_t>(j) - 1]);
  return H;
}

MatX jacobian_hybrid(const Chain& c, const VecX& q, int i) {
  const auto H = joint_screws_hybrid(c, q, i);
  MatX J = MatX::Zero(6, c.n());
  for (int j = 1; j <= i; ++j) J.col(j - 1) = H[static_cast<size_t>(j) - 1];
  return J;
}

ScrewVec hybrid_twist(const Chain& c, const VecX& q, const VecX& qdot, int i) {
  if (static_cast<int>(qdot.size()) != c.n()) {
    throw std::invalid_argument("qdot has wrong size");
  }
  const auto H = joint_screws_hybrid(c, q, i);
  ScrewVec v = ScrewVec::Zero();
  for (int j = 1; j <= i; ++j) v += H[static_cast<size_t>(j) - 1] * qdot[j - 1];
  return v;
}

std::vector<ScrewVec> hybrid_twist_derivatives(const Chain& c, const DerivativeStack& st,
                                               int i, int k) {
  check_link(c, i);
  check_order(k, 2);
  const TwistDerivs td = twist_derivatives_recursive(c, st, k);

  // Origin rates of the link frame through order k, then rates of the
  // transport factor I - ad(r): linear in r, so the product rule is exact.
  const Vec3 r0 = link_pose(c, st.q, i).r;
  std::vector<Vec3> r(static_cast<size_t>(k) + 1);
  r[0] = r0;
  if (k >= 1) {
    const auto rd = position_derivatives(td.V[static_cast<size_t>(i) - 1], r0, k);
    for (int l = 1; l <= k; ++l) r[static_cast<size_t>(l)] = rd[static_cast<size_t>(l) - 1];
  }

  std::vector<std::vector<ScrewVec>> H(static_cast<size_t>(i),
                                       std::vector<ScrewVec>(static_cast<size_t>(k) + 1));
  for (int j = 1; j <= i; ++j) {
    const auto& Sj = td.S[static_cast<size_t>(j) - 1];
    for (int m = 0; m <= k; ++m) {
      ScrewVec h = Sj[static_cast<size_t>(m)];
      for (int l = 0; l <= m; ++l) {
        h -= binomial(m, l) *
             (ad_translation(r[static_cast<size_t>(l)]) * Sj[static_cast<size_t>(m - l)]);
      }
      H[static_cast<size_t>(j) - 1][static_cast<size_t>(m)] = h;
    }
  }

  std::vector<ScrewVec> out(static_cast<size_t>(k) + 1, ScrewVec::Zero());
  for (int m = 0; m <= k; ++m) {
    ScrewVec acc = ScrewVec::Zero();
    for (int j = 1; j <= i; ++j) {
      const auto& Hj = H[static_cast<size_t>(j) - 1];
      for (int l = 0; l <= m; ++l) {
        acc += binomial(m, l) * Hj[static_cast<size_t>(l)] * st.deriv(m - l + 1)[j - 1];
      }
    }
    out[static_cast<size_t>(m)] = acc;
  }
  return out;
}

std::vector<Vec3> position_derivatives(const std::vector<ScrewVec>& spatial, const Vec3& r,
                                       int k) {
  if (k < 0) throw std::invalid_argument("derivative order out of range");
  if (static_cast<int>(spatial.size()) < k) {
    throw std::invalid_argument("need spatial twist derivatives through order k - 1");
  }
  // rdot = v + w x r; differentiate the cross product by the product rule.
  std::vector<Vec3> rd(static_cast<size_t>(k) + 1);
  rd[0] = r;
  for (int m = 0; m < k; ++m) {
    Vec3 nxt = linear(spatial[static_cast<size_t>(m)]);
    for (int l = 0; l <= m; ++l) {
      nxt += binomial(m, l) *
             angular(spatial[static_cast<size_t>(l)]).cross(rd[static_cast<size_t>(m - l)]);
    }
    rd[static_cast<size_t>(m) + 1] = nxt;
  }
  return std::vector<Vec3>(rd.begin() + 1, rd.end());
}

namespace {

std::vector<ScrewVec> body_to_spatial(const std::vector<ScrewVec>& in, const Pose& C, int k) {
  // Rates of the frame adjoint close on the body stack itself: the adjoint
  // differentiates into itself times the body twist bracket.
  std::vector<Mat6> A;
  A.reserve(static_cast<size_t>(k) + 1);
  A.push_back(adjoint(C));
  for (int l = 1; l <= k; ++l) {
    Mat6 Al = Mat6::Zero();
    for (int t = 0; t <= l - 1; ++t) {
      Al += binomial(l - 1, t) * A[static_cast<size_t>(t)] *
            ad_matrix(in[static_cast<size_t>(l - 1 - t)]);
    }
    A.push_back(Al);
  }
  std::vector<ScrewVec> out(static_cast<size_t>(k) + 1, ScrewVec::Zero());
  for (int m = 0; m <= k; ++m) {
    ScrewVec s = ScrewVec::Zero();
    for (int l = 0; l <= m; ++l) {
      s += binomial(m, l) * (A[static_cast<size_t>(l)] * in[static_cast<size_t>(m - l)]);
    }
    out[static_cast<size_t>(m)] = s;
  }
  return out;
}

std::vector<ScrewVec> spatial_to_body(const std::vector<ScrewVec>& sp, const Pose& C, int k) {
  // Inverse-adjoint rates close on the spatial stack with a sign.
  std::vector<Mat6> E;
  E.reserve(static_cast<size_t>(k) + 1);
  E.push_back(adjoint(C.inverse()));
  for (int l = 1; l <= k; ++l) {
    Mat6 El = Mat6::Zero();
    for (int t = 0; t <= l - 1; ++t) {
      El -= binomial(l - 1, t) * E[static_cast<size_t>(t)] *
            ad_matrix(sp[static_cast<size_t>(l - 1 - t)]);
    }
    E.push_back(El);
  }
  std::vector<ScrewVec> out(static_cast<size_t>(k) + 1, ScrewVec::Zero());
  for (int m = 0; m <= k; ++m) {
    ScrewVec s = ScrewVec::Zero();
    for (int l = 0; l <= m; ++l) {
      s += binomial(m, l) * (E[static_cast<size_t>(l)] * sp[static_cast<size_t>(m - l)]);
    }
    out[static_cast<size_t>(m)] = s;
  }
  return out;
}

std::vector<ScrewVec> spatial_to_hybrid(const std::vector<ScrewVec>& sp, const Pose& C,
                                        int k) {
  std::vector<Vec3> r(static_cast<size_t>(k) + 1);
  r[0] = C.r;
  if (k >= 1) {
    const auto rd = position_derivatives(sp, C.r, k);
    for (int l = 1; l <= k; ++l) r[static_cast<size_t>(l)] = rd[static_cast<size_t>(l) - 1];
  }
  std::vector<ScrewVec> out(static_cast<size_t>(k) + 1, ScrewVec::Zero());
  for (int m = 0; m <= k; ++m) {
    ScrewVec s = sp[static_cast<size_t>(m)];
    for (int l = 0; l <= m; ++l) {
      s -= binomial(m, l) *
           (ad_translation(r[static_cast<size_t>(l)]) * sp[static_cast<size_t>(m - l)]);
    }
    out[static_cast<size_t>(m)] = s;
  }
  return out;
}

std::vector<ScrewVec> hybrid_to_spatial(const std::vector<ScrewVec>& in, const Pose& C,
                                        int k) {
  // The hybrid stack carries the origin rates in its own linear parts.
  std::vector<Vec3> r(static_cast<size_t>(k) + 1);
  r[0] = C.r;
  for (int l = 1; l <= k; ++l) r[static_cast<size_t>(l)] = linear(in[static_cast<size_t>(l) - 1]);
  std::vector<ScrewVec> out(static_cast<size_t>(k) + 1, ScrewVec::Zero());
  for (int m = 0; m <= k; ++m) {
    ScrewVec s = in[static_cast<size_t>(m)];
    for (int l = 0; l <= m; ++l) {
      s += binomial(m, l) *
           (ad_translation(r[static_cast<size_t>(l)]) * in[static_cast<size_t>(m - l)]);
    }
    out[static_cast<size_t>(m)] = s;
  }
  return out;
}

}  // namespace

std::vector<ScrewVec> convert_twist_derivatives(const std::vector<ScrewVec>& in,
                                                Rep from, Rep to, const Pose& C, int k) {
  check_order(k, kMaxDerivativeOrder);
  if (static_cast<int>(in.size()) < k + 1) {
    throw std::invalid_argument("need twist derivatives through order k");
  }
  if (from == to) return std::vector<ScrewVec>(in.begin(), in.begin() + k + 1);

  std::vector<ScrewVec> sp;
  switch (from) {
    case Rep::Spatial:
      sp.assign(in.begin(), in.begin() + k + 1);
      break;
    case Rep::Body:
      sp = body_to_spatial(in, C, k);
      break;
    case Rep::Hybrid:
      sp = hybrid_to_spatial(in, C, k);
      break;
  }
  switch (to) {
    case Rep::Spatial:
      return sp;
    case Rep::Body:
      return spatial_to_body(sp, C, k);
    case Rep::Hybrid:
      return spatial_to_hybrid(sp, C, k);
  }
  throw std::invalid_argument("unknown representation");
}

}  // namespace screwkin
