#include "screwkin/taylor.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

namespace screwkin {

namespace detail {

// Table of screw differentials d^l S_i(x) for i = 1..n, l = 0..K. Each entry
// is homogeneous of degree l in x. Row i is built from brackets of lower-joint
// rows: differentiating the transport of screw i pulls out one factor x_j per
// lower joint j, paired with a binomial split of the remaining differentials.
std::vector<std::vector<ScrewVec>> screw_differential_table(const Chain& c, const VecX& q,
                                                            int K, const VecX& x) {
  const int n = c.n();
  if (static_cast<int>(x.size()) != n) {
    throw std::invalid_argument("direction x has wrong size");
  }
  std::vector<std::vector<ScrewVec>> dS(
      static_cast<size_t>(n), std::vector<ScrewVec>(static_cast<size_t>(K) + 1));
  const auto S0 = joint_screws_spatial(c, q);
  for (int i = 1; i <= n; ++i) dS[static_cast<size_t>(i) - 1][0] = S0[static_cast<size_t>(i) - 1];
  for (int k = 1; k <= K; ++k) {
    for (int i = 1; i <= n; ++i) {
      ScrewVec s = ScrewVec::Zero();
      for (int j = 1; j < i; ++j) {
        if (x[j - 1] == 0.0) continue;
        ScrewVec inner = ScrewVec::Zero();
        for (int l = 0; l <= k - 1; ++l) {
          inner += binomial(k - 1, l) *
                   screw_bracket(dS[static_cast<size_t>(j) - 1][static_cast<size_t>(l)],
                                 dS[static_cast<size_t>(i) - 1][static_cast<size_t>(k - 1 - l)]);
        }
        s += x[j - 1] * inner;
      }
      dS[static_cast<size_t>(i) - 1][static_cast<size_t>(k)] = s;
    }
  }
  return dS;
}

}  // namespace detail

ScrewVec screw_differential(const Chain& c, const VecX& q, int i, int k, const VecX& x) {
  if (i < 1 || i > c.n()) throw std::invalid_argument("joint index out of range");
  if (k < 0 || k > kMaxDerivativeOrder) {
    throw std::invalid_argument("differential order out of range");
  }
  const auto dS = detail::screw_differential_table(c, q, k, x);
  return dS[static_cast<size_t>(i) - 1][static_cast<size_t>(k)];
}

KinematicMapDifferentials km_differentials(const Chain& c, const VecX& q, int order,
                                           const VecX& x) {
  if (order < 1 || order > kMaxDerivativeOrder) {
    throw std::invalid_argument("expansion order out of range");
  }
  const int n = c.n();
  const auto dS = detail::screw_differential_table(c, q, order - 1, x);

  KinematicMapDifferentials km;
  km.order = order;
  km.f0 = kinematic_map(c, q, n).matrix();
  const Mat4 Finv = kinematic_map(c, q, n).inverse().matrix();

  // Right-logarithmic coefficients: order k collects the (k-1)-th screw
  // differentials weighted by the matching direction component.
  km.h.resize(static_cast<size_t>(order));
  for (int k = 1; k <= order; ++k) {
    Mat4 hk = Mat4::Zero();
    for (int i = 1; i <= n; ++i) {
      if (x[i - 1] == 0.0) continue;
      hk += x[i - 1] * hat(dS[static_cast<size_t>(i) - 1][static_cast<size_t>(k) - 1]);
    }
    km.h[static_cast<size_t>(k) - 1] = hk;
  }

  // Interleaved recursion for the map differentials and the differentials of
  // the inverse map; each order closes over the previous ones.
  km.df.resize(static_cast<size_t>(order));
  km.dfinv.resize(static_cast<size_t>(order));
  auto D = [&](int k) -> const Mat4& { return km.df[static_cast<size_t>(k) - 1]; };
  auto E = [&](int k) -> const Mat4& {
    return km.dfinv[static_cast<size_t>(k) - 1];
  };
  for (int k = 1; k <= order; ++k) {
    Mat4 d = km.h[static_cast<size_t>(k) - 1] * km.f0;
    for (int i = 1; i <= k - 1; ++i) {
      d -= binomial(k - 1, i - 1) * D(i) * E(k - i) * km.f0;
    }
    km.df[static_cast<size_t>(k) - 1] = d;
    Mat4 e = Mat4::Zero();
    for (int i = 1; i <= k; ++i) {
      const Mat4 Eki = (i == k) ? Finv : E(k - i);
      e -= binomial(k, i) * D(i) * Eki;
    }
    km.dfinv[static_cast<size_t>(k) - 1] = Finv * e;
  }
  return km;
}

Mat4 km_taylor_eval(const Chain& c, const VecX& q, int order, const VecX& x) {
  const auto km = km_differentials(c, q, order, x);
  Mat4 m = km.f0;
  for (int k = 1; k <= order; ++k) {
    m += km.df[static_cast<size_t>(k) - 1] / factorial(k);
  }
  return m;
}

Pose project_to_rigid(const Mat4& m) {
  const Mat3 A = m.topLeftCorner<3, 3>();
  Eigen::JacobiSVD<Mat3> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    R = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return Pose{R, m.topRightCorner<3, 1>()};
}

double PolySystem::eval(int which, const VecX& x) const {
  if (static_cast<int>(x.size()) != nvars) {
    throw std::invalid_argument("eval: wrong number of variables");
  }
  const Poly& p = polys.at(static_cast<size_t>(which));
  double v = 0.0;
  for (const auto& t : p.terms) {
    double m = t.coeff;
    for (int j = 0; j < nvars; ++j) {
      for (int e = 0; e < t.expo[static_cast<size_t>(j)]; ++e) m *= x[j];
    }
    v += m;
  }
  return v;
}

std::string PolySystem::to_text() const {
  std::string out;
  char buf[64];
  for (const auto& p : polys) {
    if (p.terms.empty()) {
      out += "0\n";
      continue;
    }
    bool first = true;
    for (const auto& t : p.terms) {
      if (!first) out += " + ";
      first = false;
      std::snprintf(buf, sizeof buf, "%.17g", t.coeff);
      out += buf;
      for (int j = 0; j < nvars; ++j) {
        const int e = t.expo[static_cast<size_t>(j)];
        if (e == 0) continue;
        std::snprintf(buf, sizeof buf, "*x%d^%d", j + 1, e);
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

PolySystem cspace_poly_system(const Chain& c, const VecX& q, int K, double drop_tol) {
  if (K < 1 || K > kMaxDerivativeOrder) {
    throw std::invalid_argument("expansion order out of range");
  }
  const int n = c.n();

  // Evaluate the homogeneous differentials on every integer grid point at or
  // below total degree K; exact finite differences on those values then give
  // the monomial coefficients (the degree-k piece is a polynomial, so the
  // k-fold difference is exact, no step-size issues).
  std::map<std::vector<int>, std::vector<Mat4>> probe;
  for (int k = 0; k <= K; ++k) {
    for (const auto& m : MultiIndex::all_of_norm(n, k)) probe[m.a] = {};
  }
  for (auto& [pt, vals] : probe) {
    VecX xs(n);
    for (int j = 0; j < n; ++j) xs[j] = pt[static_cast<size_t>(j)];
    const auto km = km_differentials(c, q, K, xs);
    vals.resize(static_cast<size_t>(K));
    for (int k = 1; k <= K; ++k) vals[static_cast<size_t>(k) - 1] = km.df[static_cast<size_t>(k) - 1];
  }

  PolySystem ps;
  ps.nvars = n;
  // Equations: the 12 non-constant entries of the truncated expansion of the
  // loop closure map minus the identity.
  const Mat4 f0 = kinematic_map(c, q, n).matrix();
  std::vector<PolySystem::Poly> rows(12);
  for (int r = 0; r < 3; ++r) {
    for (int col = 0; col < 4; ++col) {
      const double c0 = f0(r, col) - (r == col ? 1.0 : 0.0);
      if (std::abs(c0) >= drop_tol) {
        rows[static_cast<size_t>(4 * r + col)].terms.push_back(
            {c0, std::vector<int>(static_cast<size_t>(n), 0)});
      }
    }
  }
  for (int k = 1; k <= K; ++k) {
    const double wk = factorial(k);
    for (const auto& m : MultiIndex::all_of_norm(n, k)) {
      // Alternating-sign box sum below the exponent vector.
      Mat4 acc = Mat4::Zero();
      std::vector<int> s(static_cast<size_t>(n), 0);
      auto rec = [&](auto&& self, int slot, int parity) -> void {
        if (slot == n) {
          double w = (parity % 2 == 0) ? 1.0 : -1.0;
          for (int j = 0; j < n; ++j) {
            w *= binomial(m.a[static_cast<size_t>(j)], s[static_cast<size_t>(j)]);
          }
          acc += w * probe.at(s)[static_cast<size_t>(k) - 1];
          return;
        }
        for (int v = 0; v <= m.a[static_cast<size_t>(slot)]; ++v) {
          s[static_cast<size_t>(slot)] = v;
          self(self, slot + 1, parity + (m.a[static_cast<size_t>(slot)] - v));
        }
      };
      rec(rec, 0, 0);
      const Mat4 coeff = acc / (m.factorial() * wk);
      for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 4; ++col) {
          if (std::abs(coeff(r, col)) >= drop_tol) {
            rows[static_cast<size_t>(4 * r + col)].terms.push_back({coeff(r, col), m.a});
          }
        }
      }
    }
  }
  for (auto& row : rows) {
    if (!row.terms.empty()) ps.polys.push_back(std::move(row));
  }
  return ps;
}

}  // namespace screwkin
