#include "screwkin/minors.hpp"

#include <stdexcept>

#include "screwkin/taylor.hpp"

namespace screwkin {

void MinorIndex::validate(int n) const {
  const int k = order();
  if (k < 1 || k > 6 || static_cast<int>(cols.size()) != k) {
    throw std::invalid_argument("minor selection must pick 1..6 rows and as many columns");
  }
  for (int i = 0; i < k; ++i) {
    if (rows[static_cast<size_t>(i)] < 1 || rows[static_cast<size_t>(i)] > 6 ||
        cols[static_cast<size_t>(i)] < 1 || cols[static_cast<size_t>(i)] > n) {
      throw std::invalid_argument("minor index out of range");
    }
    if (i > 0 && (rows[static_cast<size_t>(i)] <= rows[static_cast<size_t>(i) - 1] ||
                  cols[static_cast<size_t>(i)] <= cols[static_cast<size_t>(i) - 1])) {
      throw std::invalid_argument("minor indices must be strictly increasing");
    }
  }
}

namespace {

void combinations(int lo, int hi, int k, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (k == 0) {
    out.push_back(cur);
    return;
  }
  for (int v = lo; v <= hi - k + 1; ++v) {
    cur.push_back(v);
    combinations(v + 1, hi, k - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<MinorIndex> MinorIndex::all(int n, int k) {
  std::vector<std::vector<int>> rowSets, colSets;
  std::vector<int> cur;
  combinations(1, 6, k, cur, rowSets);
  combinations(1, n, k, cur, colSets);
  std::vector<MinorIndex> out;
  out.reserve(rowSets.size() * colSets.size());
  for (const auto& r : rowSets) {
    for (const auto& c : colSets) out.push_back(MinorIndex{r, c});
  }
  return out;
}

double det_small(const MatX& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det of non-square matrix");
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.partialPivLu().determinant();
  }
}

namespace {

// Assemble the selected submatrix from per-column screw vectors.
MatX pick(const std::vector<ScrewVec>& columns, const MinorIndex& idx) {
  const int k = idx.order();
  MatX m(k, k);
  for (int j = 0; j < k; ++j) {
    const ScrewVec& s = columns[static_cast<size_t>(j)];
    for (int r = 0; r < k; ++r) m(r, j) = s[idx.rows[static_cast<size_t>(r)] - 1];
  }
  return m;
}

// Shared product-rule expansion: the nu-th derivative of a determinant is the
// multinomial-weighted sum over all ways of distributing nu derivative hits
// across the columns. deriv(j, a) must return the a-th derivative of the
// screw in column j of the selection.
template <typename ColumnDeriv>
double det_derivative(const MinorIndex& idx, int nu, ColumnDeriv&& deriv) {
  const int k = idx.order();
  double total = 0.0;
  std::vector<int> a(static_cast<size_t>(k), 0);
  std::vector<ScrewVec> cols(static_cast<size_t>(k));
  auto rec = [&](auto&& self, int slot, int left) -> void {
    if (slot == k - 1) {
      a[static_cast<size_t>(slot)] = left;
      double w = factorial(nu);
      for (int j = 0; j < k; ++j) w /= factorial(a[static_cast<size_t>(j)]);
      for (int j = 0; j < k; ++j) cols[static_cast<size_t>(j)] = deriv(j, a[static_cast<size_t>(j)]);
      total += w * det_small(pick(cols, idx));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      a[static_cast<size_t>(slot)] = v;
      self(self, slot + 1, left - v);
    }
  };
  rec(rec, 0, nu);
  return total;
}

}  // namespace

double minor_value(const Chain& c, const VecX& q, const MinorIndex& idx) {
  idx.validate(c.n());
  const auto S = joint_screws_spatial(c, q);
  std::vector<ScrewVec> cols(static_cast<size_t>(idx.order()));
  for (int j = 0; j < idx.order(); ++j) {
    cols[static_cast<size_t>(j)] = S[static_cast<size_t>(idx.cols[static_cast<size_t>(j)]) - 1];
  }
  return det_small(pick(cols, idx));
}

double minor_time_derivative(const Chain& c, const DerivativeStack& st,
                             const MinorIndex& idx, int nu) {
  idx.validate(c.n());
  if (nu < 0 || nu > kMaxDerivativeOrder) {
    throw std::invalid_argument("derivative order out of range");
  }
  if (st.order() < nu) throw std::invalid_argument("stack order too low for minor derivative");
  // The screw derivatives need one order less than the top joint derivative;
  // pad the stack so the generic engine (which wants order nu+1) can run. The
  // padding only feeds twist entries this expansion never reads.
  DerivativeStack padded = st;
  while (padded.order() < nu + 1) padded.derivs.push_back(VecX::Zero(c.n()));
  const TwistDerivs td = twist_derivatives_recursive(c, padded, nu);
  return minor_time_derivative(td, idx, nu);
}

double minor_time_derivative(const TwistDerivs& td, const MinorIndex& idx, int nu) {
  idx.validate(static_cast<int>(td.S.size()));
  if (td.order < nu) throw std::invalid_argument("screw derivatives too shallow for minor");
  return det_derivative(idx, nu, [&](int j, int a) -> ScrewVec {
    const int col = idx.cols[static_cast<size_t>(j)];
    return td.S[static_cast<size_t>(col) - 1][static_cast<size_t>(a)];
  });
}

double minor_differential(const Chain& c, const VecX& q, const MinorIndex& idx, int k,
                          const VecX& x) {
  idx.validate(c.n());
  if (k < 0 || k > kMaxDerivativeOrder) {
    throw std::invalid_argument("differential order out of range");
  }
  const auto dS = detail::screw_differential_table(c, q, k, x);
  return det_derivative(idx, k, [&](int j, int a) -> ScrewVec {
    const int col = idx.cols[static_cast<size_t>(j)];
    return dS[static_cast<size_t>(col) - 1][static_cast<size_t>(a)];
  });
}

}  // namespace screwkin
