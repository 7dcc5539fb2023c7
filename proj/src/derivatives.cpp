#include "screwkin/derivatives.hpp"

#include <stdexcept>

namespace screwkin {

int MultiIndex::norm() const {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : a) f *= screwkin::factorial(v);
  return f;
}

std::vector<MultiIndex> MultiIndex::all_of_norm(int n, int k) {
  std::vector<MultiIndex> out;
  MultiIndex cur(n);
  // Distribute k units over n slots, leftmost slot first.
  auto rec = [&](auto&& self, int slot, int left) -> void {
    if (slot == n - 1) {
      cur.a[static_cast<size_t>(slot)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur.a[static_cast<size_t>(slot)] = v;
      self(self, slot + 1, left - v);
    }
  };
  if (n == 0) {
    if (k == 0) out.push_back(cur);
    return out;
  }
  rec(rec, 0, k);
  return out;
}

namespace {

void check_stack(const Chain& c, const DerivativeStack& st, int min_order) {
  if (static_cast<int>(st.q.size()) != c.n()) {
    throw std::invalid_argument("stack q has wrong size");
  }
  if (st.order() < min_order) {
    throw std::invalid_argument("stack order " + std::to_string(st.order()) +
                                ", need at least " + std::to_string(min_order));
  }
  for (const auto& d : st.derivs) {
    if (static_cast<int>(d.size()) != c.n()) {
      throw std::invalid_argument("stack derivative has wrong size");
    }
  }
}

}  // namespace

ScrewVec partial_screw(const Chain& c, const VecX& q, int i, const MultiIndex& a) {
  if (a.size() != c.n()) {
    throw std::invalid_argument("multi-index size does not match chain");
  }
  if (i < 1 || i > c.n()) throw std::invalid_argument("joint index out of range");
  // The screw of joint i is transported by joints strictly below i only, so
  // any derivative in a variable at or above i vanishes identically.
  for (int j = i; j <= c.n(); ++j) {
    if (a.a[static_cast<size_t>(j) - 1] > 0) return ScrewVec::Zero();
  }
  const auto S = joint_screws_spatial(c, q);
  ScrewVec r = S[static_cast<size_t>(i) - 1];
  // Nested brackets, innermost factor the highest differentiation index.
  for (int j = i - 1; j >= 1; --j) {
    for (int rep = 0; rep < a.a[static_cast<size_t>(j) - 1]; ++rep) {
      r = screw_bracket(S[static_cast<size_t>(j) - 1], r);
    }
  }
  return r;
}

ScrewVec partial_screw(const Chain& c, const VecX& q, int i, int j) {
  MultiIndex a(c.n());
  a.a.at(static_cast<size_t>(j) - 1) = 1;
  return partial_screw(c, q, i, a);
}

TwistDerivs twist_derivatives_recursive(const Chain& c, const DerivativeStack& st, int k) {
  if (k < 0 || k > kMaxDerivativeOrder) {
    throw std::invalid_argument("derivative order out of range");
  }
  check_stack(c, st, k + 1);
  const int n = c.n();
  TwistDerivs td;
  td.order = k;
  td.S.assign(static_cast<size_t>(n), std::vector<ScrewVec>(static_cast<size_t>(k) + 1));
  td.V.assign(static_cast<size_t>(n), std::vector<ScrewVec>(static_cast<size_t>(k) + 1));

  const auto S0 = joint_screws_spatial(c, st.q);
  ScrewVec acc = ScrewVec::Zero();
  for (int i = 1; i <= n; ++i) {
    td.S[static_cast<size_t>(i) - 1][0] = S0[static_cast<size_t>(i) - 1];
    acc += S0[static_cast<size_t>(i) - 1] * st.deriv(1)[i - 1];
    td.V[static_cast<size_t>(i) - 1][0] = acc;
  }

  for (int l = 1; l <= k; ++l) {
    // Screw derivatives first: the l-th rate of screw i is a binomial sum of
    // brackets of lower twist rates of body i with lower rates of the screw.
    for (int i = 1; i <= n; ++i) {
      auto& Si = td.S[static_cast<size_t>(i) - 1];
      const auto& Vi = td.V[static_cast<size_t>(i) - 1];
      ScrewVec s = ScrewVec::Zero();
      for (int m = 0; m <= l - 1; ++m) {
        s += binomial(l - 1, m) * screw_bracket(Vi[static_cast<size_t>(m)],
                                                Si[static_cast<size_t>(l - 1 - m)]);
      }
      Si[static_cast<size_t>(l)] = s;
    }
    // Then the twist rates, accumulated over the chain; the joint derivative
    // of order l+1 enters here, which is why the stack needs order k+1.
    acc = ScrewVec::Zero();
    for (int i = 1; i <= n; ++i) {
      const auto& Si = td.S[static_cast<size_t>(i) - 1];
      for (int m = 0; m <= l; ++m) {
        acc += binomial(l, m) * Si[static_cast<size_t>(m)] * st.deriv(l - m + 1)[i - 1];
      }
      td.V[static_cast<size_t>(i) - 1][static_cast<size_t>(l)] = acc;
    }
  }
  return td;
}

TwistDerivs twist_derivatives_closed(const Chain& c, const DerivativeStack& st, int k) {
  if (k < 0 || k > 3) {
    throw std::invalid_argument("closed forms cover orders 0..3");
  }
  check_stack(c, st, k + 1);
  const int n = c.n();
  TwistDerivs td;
  td.order = k;
  td.S.assign(static_cast<size_t>(n), std::vector<ScrewVec>(static_cast<size_t>(k) + 1));
  td.V.assign(static_cast<size_t>(n), std::vector<ScrewVec>(static_cast<size_t>(k) + 1));

  const auto S0 = joint_screws_spatial(c, st.q);
  ScrewVec v = ScrewVec::Zero();
  for (int i = 1; i <= n; ++i) {
    td.S[static_cast<size_t>(i) - 1][0] = S0[static_cast<size_t>(i) - 1];
    v += S0[static_cast<size_t>(i) - 1] * st.deriv(1)[i - 1];
    td.V[static_cast<size_t>(i) - 1][0] = v;
  }

  // One pass per order. w1, w2, w3 are the operator polynomials in the body
  // twist rates applied to the joint screw; they double as the screw rates.
  if (k >= 1) {
    ScrewVec a = ScrewVec::Zero();
    for (int i = 1; i <= n; ++i) {
      const size_t ii = static_cast<size_t>(i) - 1;
      const ScrewVec w1 = screw_bracket(td.V[ii][0], td.S[ii][0]);
      td.S[ii][1] = w1;
      a += st.deriv(2)[i - 1] * td.S[ii][0] + st.deriv(1)[i - 1] * w1;
      td.V[ii][1] = a;
    }
  }
  if (k >= 2) {
    ScrewVec a = ScrewVec::Zero();
    for (int i = 1; i <= n; ++i) {
      const size_t ii = static_cast<size_t>(i) - 1;
      const ScrewVec w1 = td.S[ii][1];
      const ScrewVec w2 =
          screw_bracket(td.V[ii][1], td.S[ii][0]) + screw_bracket(td.V[ii][0], w1);
      td.S[ii][2] = w2;
      a += st.deriv(3)[i - 1] * td.S[ii][0] + 2.0 * st.deriv(2)[i - 1] * w1 +
           st.deriv(1)[i - 1] * w2;
      td.V[ii][2] = a;
    }
  }
  if (k >= 3) {
    ScrewVec a = ScrewVec::Zero();
    for (int i = 1; i <= n; ++i) {
      const size_t ii = static_cast<size_t>(i) - 1;
      const ScrewVec w1 = td.S[ii][1];
      const ScrewVec w2 = td.S[ii][2];
      const ScrewVec w3 = screw_bracket(td.V[ii][2], td.S[ii][0]) +
                          2.0 * screw_bracket(td.V[ii][1], w1) +
                          screw_bracket(td.V[ii][0], w2);
      td.S[ii][3] = w3;
      a += st.deriv(4)[i - 1] * td.S[ii][0] + 3.0 * st.deriv(3)[i - 1] * w1 +
           3.0 * st.deriv(2)[i - 1] * w2 + st.deriv(1)[i - 1] * w3;
      td.V[ii][3] = a;
    }
  }
  return td;
}

ScrewVec acceleration_explicit(const Chain& c, const DerivativeStack& st, int i) {
  check_stack(c, st, 2);
  if (i < 1 || i > c.n()) throw std::invalid_argument("link index out of range");
  const auto S = joint_screws_spatial(c, st.q);
  const VecX& qd = st.deriv(1);
  const VecX& qdd = st.deriv(2);
  ScrewVec a = ScrewVec::Zero();
  for (int j = 1; j <= i; ++j) a += S[static_cast<size_t>(j) - 1] * qdd[j - 1];
  for (int j = 2; j <= i; ++j) {
    for (int m = 1; m < j; ++m) {
      a += screw_bracket(S[static_cast<size_t>(m) - 1], S[static_cast<size_t>(j) - 1]) *
           (qd[j - 1] * qd[m - 1]);
    }
  }
  return a;
}

ScrewVec jerk_explicit(const Chain& c, const DerivativeStack& st, int i) {
  check_stack(c, st, 3);
  if (i < 1 || i > c.n()) throw std::invalid_argument("link index out of range");
  const auto S = joint_screws_spatial(c, st.q);
  const VecX& qd = st.deriv(1);
  const VecX& qdd = st.deriv(2);
  const VecX& qddd = st.deriv(3);
  ScrewVec a = ScrewVec::Zero();
  for (int j = 1; j <= i; ++j) a += S[static_cast<size_t>(j) - 1] * qddd[j - 1];
  for (int j = 2; j <= i; ++j) {
    const ScrewVec& Sj = S[static_cast<size_t>(j) - 1];
    for (int m = 1; m < j; ++m) {
      const ScrewVec& Sm = S[static_cast<size_t>(m) - 1];
      const ScrewVec br = screw_bracket(Sm, Sj);
      a += br * (qdd[m - 1] * qd[j - 1] + 2.0 * qd[m - 1] * qdd[j - 1]);
      a += screw_bracket(Sm, br) * (qd[m - 1] * qd[m - 1] * qd[j - 1]);
      for (int l = 1; l < m; ++l) {
        a += 2.0 * screw_bracket(S[static_cast<size_t>(l) - 1], br) *
             (qd[l - 1] * qd[m - 1] * qd[j - 1]);
      }
    }
  }
  return a;
}

}  // namespace screwkin
